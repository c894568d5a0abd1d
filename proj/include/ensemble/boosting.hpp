#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ensemble/data_model.hpp"
#include "ensemble/tree_learner.hpp"

namespace ens {

struct BoostConfig {
  int iterations = 100;
  TreeConfig tree{.max_depth = 8};
  /// err_m is clamped into [err_clamp, 1 - err_clamp] so alpha stays finite.
  double err_clamp = 1e-6;
  std::uint64_t seed = 0;

  void validate(Index dim) const;
};

/// What the fit reports after each round; references are valid only during the callback.
struct BoostRound {
  int iteration = 0;          // 1-based
  double raw_error = 0.0;     // before clamping
  double error = 0.0;         // clamped err_m
  double alpha = 0.0;
  double training_error = 0.0;  // of sign(f_m) after this round
  const DecisionTree& tree;
  const std::vector<char>& missed;  // I(y_i != G_m(x_i))
  const Vector& weights;            // renormalized weights entering round m + 1
};

using BoostObserver = std::function<void(const BoostRound&)>;

/// AdaBoost with weighted tree fitting. Always runs exactly config.iterations
/// rounds, including after the training error reaches zero.
BoostModel adaboost_fit(const LabeledDataset& data, const BoostConfig& config, const BoostObserver& observer = {});

/// Fraction of rows where sign(f_prefix(x_i)) != y_i.
double training_error(const BoostModel& model, const LabeledDataset& data, int prefix);

/// The sub-ensemble made of stages (j-1)*block_size + 1 .. (j-1)*block_size + count
/// (1-based j), classifying by the sign of its partial margin.
class BlockClassifier {
 public:
  BlockClassifier(const BoostModel& model, int block_index, int count, int block_size);

  int first_stage() const { return begin_; }
  int end_stage() const { return end_; }

  template <typename Derived>
  double margin(const Eigen::DenseBase<Derived>& x) const {
    return model_->range_margin(x, begin_, end_);
  }
  template <typename Derived>
  Label predict(const Eigen::DenseBase<Derived>& x) const {
    return sign_label(margin(x));
  }

 private:
  const BoostModel* model_;
  int begin_;
  int end_;
};

inline BlockClassifier block_classifier(const BoostModel& model, int block_index, int count, int block_size) {
  return BlockClassifier(model, block_index, count, block_size);
}

}  // namespace ens
