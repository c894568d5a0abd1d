#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ensemble/data_model.hpp"

namespace ens {

inline constexpr int kUnlimitedDepth = 1 << 20;

struct TreeConfig {
  int max_depth = kUnlimitedDepth;
  /// Minimum number of rows in each child of a split (n_min).
  int min_node_size = 1;
  /// Features drawn per node; unset means all features.
  std::optional<int> m_try = std::nullopt;
  std::uint64_t seed = 0;

  void validate(Index dim) const;
};

template <typename Scalar>
struct ClassWeights {
  Scalar positive{0};
  Scalar negative{0};

  Scalar total() const { return positive + negative; }
};

/// 1 - sum_k p_k^2 for one node; an empty node has impurity 0.
template <typename Scalar>
Scalar gini_impurity(const ClassWeights<Scalar>& c) {
  const Scalar t = c.total();
  if (!(t > Scalar(0))) return Scalar(0);
  const Scalar p = c.positive / t;
  const Scalar q = c.negative / t;
  return Scalar(1) - (p * p + q * q);
}

/// Child impurities weighted by each child's share of the total weight.
template <typename Scalar>
Scalar weighted_gini(const ClassWeights<Scalar>& left, const ClassWeights<Scalar>& right) {
  if (left.positive < Scalar(0) || left.negative < Scalar(0) || right.positive < Scalar(0) ||
      right.negative < Scalar(0)) {
    throw InvalidInput("class weights must be non-negative");
  }
  const Scalar total = left.total() + right.total();
  if (!(total > Scalar(0))) throw InvalidInput("weighted_gini needs at least one non-empty child");
  return left.total() / total * gini_impurity(left) + right.total() / total * gini_impurity(right);
}

/// Threshold between two distinct sorted values, always satisfying lo < t <= hi.
inline double midpoint_threshold(double lo, double hi) {
  const double t = lo + (hi - lo) / 2.0;
  return t > lo ? t : hi;
}

/// Midpoints of consecutive distinct values of an ascending sequence.
std::vector<double> candidate_midpoints(std::span<const double> sorted_values);

/// Per-feature row orderings by ascending value (ties by row index).
/// Computed once per design matrix and reused across boosting rounds.
class SortedColumns {
 public:
  explicit SortedColumns(const Matrix& features);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::span<const int> column(Index feature) const {
    return {order_.data() + feature * rows_, static_cast<std::size_t>(rows_)};
  }

 private:
  Index rows_;
  Index cols_;
  std::vector<int> order_;
};

/// Top-down weighted Gini induction with midpoint thresholds.
///
/// A node becomes a leaf when it is weight-pure, at max_depth, too small to
/// give both children min_node_size rows, or when no admissible split exists.
/// Splits with zero impurity reduction are admissible; otherwise XOR-like
/// layouts could never be separated. Leaves carry sign(sum w_i y_i), ties +1.
DecisionTree fit_tree(const LabeledDataset& data, const TreeConfig& config);

/// As above with explicit per-row weights and a precomputed ordering.
DecisionTree fit_tree(const LabeledDataset& data, const TreeConfig& config, const SortedColumns& sorted,
                      std::span<const double> weights);

}  // namespace ens
