#include "ensemble/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ensemble/rng.hpp"

namespace ens {

namespace {

constexpr double kAlphaTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

TreeConfig full_tree_config() { return TreeConfig{}; }

}  // namespace

PruningPath::PruningPath(const DecisionTree& tree, const LabeledDataset& data) : tree_(tree) {
  const auto& nodes = tree_.nodes();
  const std::size_t count = nodes.size();
  std::vector<ClassWeights<double>> stats(count);
  const Vector w = data.weights_or_uniform();
  const double total = w.sum();
  for (Index i = 0; i < data.size(); ++i) {
    int id = 0;
    const auto x = data.row(i);
    while (true) {
      auto& s = stats[static_cast<std::size_t>(id)];
      (data.label(i) == kPositive ? s.positive : s.negative) += w(i);
      const auto& node = nodes[static_cast<std::size_t>(id)];
      if (node.is_leaf()) break;
      id = node.rule.goes_left(x) ? node.left : node.right;
    }
  }

  node_label_.resize(count);
  std::vector<double> node_error(count);
  for (std::size_t t = 0; t < count; ++t) {
    node_label_[t] = sign_label(stats[t].positive - stats[t].negative);
    node_error[t] = (node_label_[t] == kPositive ? stats[t].negative : stats[t].positive) / total;
  }

  // Children always have larger indices than their parent, so a reverse sweep
  // is a bottom-up pass.
  collapse_at_.assign(count, kInf);
  std::vector<char> collapsed(count, 0);
  std::vector<double> subtree_error(count);
  std::vector<int> subtree_leaves(count);
  alphas_.push_back(0.0);
  while (true) {
    double weakest = kInf;
    std::vector<double> g(count, kInf);
    for (std::size_t t = count; t-- > 0;) {
      const auto& node = nodes[t];
      if (node.is_leaf() || collapsed[t]) {
        subtree_error[t] = node_error[t];
        subtree_leaves[t] = 1;
        continue;
      }
      const auto l = static_cast<std::size_t>(node.left);
      const auto r = static_cast<std::size_t>(node.right);
      subtree_error[t] = subtree_error[l] + subtree_error[r];
      subtree_leaves[t] = subtree_leaves[l] + subtree_leaves[r];
      g[t] = std::max(0.0, (node_error[t] - subtree_error[t]) / (subtree_leaves[t] - 1));
      weakest = std::min(weakest, g[t]);
    }
    if (weakest == kInf) break;
    const double alpha = std::max(weakest, alphas_.back());
    // Collapse every weakest link together with everything below it.
    for (std::size_t t = 0; t < count; ++t) {
      if (collapsed[t] || g[t] > weakest + kAlphaTolerance) continue;
      std::vector<int> stack{static_cast<int>(t)};
      while (!stack.empty()) {
        const auto s = static_cast<std::size_t>(stack.back());
        stack.pop_back();
        if (nodes[s].is_leaf() || collapsed[s]) continue;
        collapsed[s] = 1;
        collapse_at_[s] = alpha;
        stack.push_back(nodes[s].left);
        stack.push_back(nodes[s].right);
      }
    }
    if (alpha > alphas_.back() + kAlphaTolerance) alphas_.push_back(alpha);
    if (collapsed[0]) break;
  }
}

DecisionTree PruningPath::subtree(double alpha) const {
  const auto& nodes = tree_.nodes();
  std::vector<DecisionTree::Node> out;
  // Pre-order emission, the same layout fit_tree produces.
  auto emit = [&](auto&& self, int src) -> int {
    const auto& node = nodes[static_cast<std::size_t>(src)];
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    const bool cut = node.is_leaf() || collapse_at_[static_cast<std::size_t>(src)] <= alpha + kAlphaTolerance;
    out[static_cast<std::size_t>(id)].label = node.is_leaf() ? node.label : node_label_[static_cast<std::size_t>(src)];
    if (cut) return id;
    const int left = self(self, node.left);
    const int right = self(self, node.right);
    auto& copy = out[static_cast<std::size_t>(id)];
    copy.rule = node.rule;
    copy.left = left;
    copy.right = right;
    return id;
  };
  emit(emit, 0);
  return DecisionTree(std::move(out), tree_.input_dim());
}

int PruningPath::leaf_count(double alpha) const { return subtree(alpha).leaf_count(); }

PrunedCart pruned_cart_fit_detailed(const LabeledDataset& data, const PruneConfig& config) {
  const Index n = data.size();
  if (config.folds < 2 || config.folds > n) throw InvalidInput("folds must lie in [2, n]");
  for (double a : config.complexity_grid) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidInput("complexity grid values must be finite and >= 0");
  }

  PrunedCart result;
  result.full_tree = fit_tree(data, full_tree_config());
  const PruningPath path(result.full_tree, data);

  if (config.complexity_grid.empty()) {
    const auto& a = path.alphas();
    for (std::size_t k = 0; k < a.size(); ++k) {
      result.candidates.push_back(k + 1 < a.size() ? std::sqrt(a[k] * a[k + 1]) : a[k]);
    }
  } else {
    result.candidates = config.complexity_grid;
    std::sort(result.candidates.begin(), result.candidates.end());
  }

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = Rng::stream(config.seed, "folds");
  std::shuffle(perm.begin(), perm.end(), rng.engine());

  result.cv_error.assign(result.candidates.size(), 0.0);
  for (int fold = 0; fold < config.folds; ++fold) {
    std::vector<Index> train;
    std::vector<Index> test;
    for (std::size_t k = 0; k < perm.size(); ++k) {
      (static_cast<int>(k % static_cast<std::size_t>(config.folds)) == fold ? test : train).push_back(perm[k]);
    }
    const LabeledDataset fold_train = data.select_rows(train);
    const PruningPath fold_path(fit_tree(fold_train, full_tree_config()), fold_train);
    for (std::size_t c = 0; c < result.candidates.size(); ++c) {
      const DecisionTree t = fold_path.subtree(result.candidates[c]);
      for (Index r : test) result.cv_error[c] += t.predict(data.row(r)) != data.label(r);
    }
  }
  for (double& e : result.cv_error) e /= static_cast<double>(n);

  std::size_t best = 0;
  for (std::size_t c = 1; c < result.candidates.size(); ++c) {
    if (result.cv_error[c] <= result.cv_error[best]) best = c;
  }
  result.alpha = result.candidates[best];
  result.tree = path.subtree(result.alpha);
  return result;
}

DecisionTree pruned_cart_fit(const LabeledDataset& data, const PruneConfig& config) {
  return pruned_cart_fit_detailed(data, config).tree;
}

}  // namespace ens
