#include "ensemble/forest.hpp"

#include <cmath>
#include <numeric>

#include "ensemble/parallel.hpp"
#include "ensemble/rng.hpp"

namespace ens {

int default_m_try(Index dim) {
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim)))));
}

ForestModel forest_fit(const LabeledDataset& data, const ForestConfig& config, int jobs) {
  if (config.n_trees < 1) throw InvalidInput("forest needs at least one tree");
  if (data.has_weights()) throw InvalidInput("forest_fit expects an unweighted dataset");
  TreeConfig tree_config = config.tree;
  if (!tree_config.m_try) tree_config.m_try = default_m_try(data.dim());
  tree_config.validate(data.dim());

  const Index n = data.size();
  const auto B = static_cast<std::size_t>(config.n_trees);
  std::vector<DecisionTree> trees(B);
  std::vector<std::vector<Index>> samples(B);
  std::vector<std::uint64_t> seeds(B);

  parallel_for(B, jobs, [&](std::size_t b) {
    seeds[b] = derive_seed(config.seed, static_cast<std::uint64_t>(b));
    std::vector<Index>& rows = samples[b];
    rows.resize(static_cast<std::size_t>(n));
    if (config.bootstrap) {
      Rng rng = Rng::stream(seeds[b], "bootstrap");
      for (auto& r : rows) r = rng.below(n);
    } else {
      std::iota(rows.begin(), rows.end(), Index{0});
    }
    TreeConfig cfg = tree_config;
    cfg.seed = derive_seed(seeds[b], "tree");
    trees[b] = fit_tree(data.select_rows(rows), cfg);
  });

  return ForestModel(std::move(trees), std::move(samples), std::move(seeds), *tree_config.m_try, n);
}

}  // namespace ens
