#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "ensemble/data_model.hpp"
#include "ensemble/tree_learner.hpp"

namespace ens {

/// Exact brute-force Euclidean 1-NN; distance ties go to the lowest row index.
class OneNearestNeighbor {
 public:
  explicit OneNearestNeighbor(LabeledDataset data) : data_(std::move(data)) {}

  const LabeledDataset& data() const { return data_; }

  template <typename Derived>
  Index nearest(const Eigen::DenseBase<Derived>& x) const {
    const Matrix& X = data_.features();
    if (x.size() != X.cols()) throw InvalidInput("one-NN query has the wrong dimension");
    Index best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < X.rows(); ++i) {
      double d2 = 0.0;
      for (Index j = 0; j < X.cols(); ++j) {
        const double diff = X(i, j) - x(j);
        d2 += diff * diff;
      }
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    return best;
  }

  template <typename Derived>
  Label predict(const Eigen::DenseBase<Derived>& x) const {
    return data_.label(nearest(x));
  }

 private:
  LabeledDataset data_;
};

inline OneNearestNeighbor one_nn_fit(LabeledDataset data) { return OneNearestNeighbor(std::move(data)); }

template <typename Derived>
Label one_nn_predict(const OneNearestNeighbor& model, const Eigen::DenseBase<Derived>& x) {
  return model.predict(x);
}

struct PruneConfig {
  int folds = 10;
  /// Candidate penalties; empty means the critical values of the full tree.
  std::vector<double> complexity_grid;
  std::uint64_t seed = 0;
};

/// Weakest-link (cost-complexity) pruning of a fitted tree. Cost is the
/// weighted training misclassification rate plus alpha per leaf.
class PruningPath {
 public:
  PruningPath(const DecisionTree& tree, const LabeledDataset& data);

  /// Increasing critical penalties; alphas()[0] == 0 and the last one collapses the root.
  const std::vector<double>& alphas() const { return alphas_; }
  /// Smallest subtree minimizing cost at penalty alpha.
  DecisionTree subtree(double alpha) const;
  /// Leaf count of subtree(alpha) without materializing it.
  int leaf_count(double alpha) const;

 private:
  DecisionTree tree_;
  std::vector<Label> node_label_;
  std::vector<double> collapse_at_;  // +inf for leaves
  std::vector<double> alphas_;
};

struct PrunedCart {
  DecisionTree tree;
  DecisionTree full_tree;
  double alpha = 0.0;
  std::vector<double> candidates;
  std::vector<double> cv_error;  // aligned with candidates
};

/// Full tree, cost-complexity path, penalty chosen by k-fold CV error
/// (ties go to the larger penalty, i.e. the smaller tree).
PrunedCart pruned_cart_fit_detailed(const LabeledDataset& data, const PruneConfig& config);
DecisionTree pruned_cart_fit(const LabeledDataset& data, const PruneConfig& config);

}  // namespace ens
