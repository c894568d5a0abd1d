#pragma once

#include <cstdint>

#include "ensemble/data_model.hpp"
#include "ensemble/tree_learner.hpp"

namespace ens {

struct ForestConfig {
  int n_trees = 500;
  /// Trees are grown to purity by default; an unset m_try becomes ceil(sqrt(d)).
  TreeConfig tree{};
  std::uint64_t seed = 0;
  /// Test hook: false fits every tree on the training rows in order.
  bool bootstrap = true;
};

int default_m_try(Index dim);

/// Random forest: B bootstrap samples of size n, one tree per sample, each
/// node restricted to m_try randomly drawn features. Tree b depends only on
/// (data, config, b), so `jobs` never changes the result.
ForestModel forest_fit(const LabeledDataset& data, const ForestConfig& config, int jobs = 1);

}  // namespace ens
