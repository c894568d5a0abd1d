#include "ensemble/boosting.hpp"

#include <algorithm>
#include <cmath>

#include "ensemble/rng.hpp"

namespace ens {

void BoostConfig::validate(Index dim) const {
  if (iterations < 1) throw InvalidInput("boosting needs at least one iteration");
  if (!(err_clamp > 0.0 && err_clamp < 0.5)) throw InvalidInput("err_clamp must lie in (0, 0.5)");
  tree.validate(dim);
}

BoostModel adaboost_fit(const LabeledDataset& data, const BoostConfig& config, const BoostObserver& observer) {
  config.validate(data.dim());
  if (data.has_weights()) throw InvalidInput("AdaBoost owns the observation weights; pass an unweighted dataset");

  const Index n = data.size();
  const SortedColumns sorted(data.features());
  Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector margins = Vector::Zero(n);
  std::vector<char> missed(static_cast<std::size_t>(n));
  std::vector<BoostStage> stages;
  stages.reserve(static_cast<std::size_t>(config.iterations));

  for (int m = 1; m <= config.iterations; ++m) {
    TreeConfig tree_config = config.tree;
    tree_config.seed = derive_seed(config.seed, static_cast<std::uint64_t>(m));
    DecisionTree tree = fit_tree(data, tree_config, sorted, {w.data(), static_cast<std::size_t>(n)});

    double wrong = 0.0;
    const double total = w.sum();
    for (Index i = 0; i < n; ++i) {
      const Label g = tree.predict(data.row(i));
      missed[static_cast<std::size_t>(i)] = g != data.label(i);
      if (missed[static_cast<std::size_t>(i)]) wrong += w(i);
    }
    const double raw_error = wrong / total;
    const double err = std::clamp(raw_error, config.err_clamp, 1.0 - config.err_clamp);
    const double alpha = std::log((1.0 - err) / err);

    const double boost = std::exp(alpha);
    for (Index i = 0; i < n; ++i) {
      if (missed[static_cast<std::size_t>(i)]) w(i) *= boost;
    }
    w /= w.sum();

    Index train_wrong = 0;
    for (Index i = 0; i < n; ++i) {
      const Label g = missed[static_cast<std::size_t>(i)] ? -data.label(i) : data.label(i);
      margins(i) += alpha * g;
      train_wrong += sign_label(margins(i)) != data.label(i);
    }

    stages.push_back({alpha, std::move(tree)});
    if (observer) {
      observer(BoostRound{m, raw_error, err, alpha,
                          static_cast<double>(train_wrong) / static_cast<double>(n), stages.back().tree, missed,
                          w});
    }
  }
  return BoostModel(std::move(stages));
}

double training_error(const BoostModel& model, const LabeledDataset& data, int prefix) {
  if (prefix < 1 || prefix > model.size()) throw InvalidInput("prefix out of range");
  Index wrong = 0;
  for (Index i = 0; i < data.size(); ++i) {
    wrong += predict_boost(model, data.row(i), prefix) != data.label(i);
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

BlockClassifier::BlockClassifier(const BoostModel& model, int block_index, int count, int block_size)
    : model_(&model) {
  if (block_size < 1 || count < 1 || count > block_size || block_index < 1) {
    throw InvalidInput("block arguments out of range");
  }
  begin_ = (block_index - 1) * block_size;
  end_ = begin_ + count;
  if (end_ > model.size()) throw InvalidInput("block extends past the last stage");
}

}  // namespace ens
