#include "ensemble/tree_learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ensemble/rng.hpp"

namespace ens {

namespace {

// Impurity differences below this are ties, resolved by (feature, threshold).
constexpr double kTieTolerance = 1e-12;

struct Candidate {
  double impurity = 0.0;
  int feature = -1;
  double threshold = 0.0;

  bool valid() const { return feature >= 0; }
};

bool better(const Candidate& c, const Candidate& best) {
  if (!best.valid()) return true;
  if (c.impurity < best.impurity - kTieTolerance) return true;
  if (c.impurity > best.impurity + kTieTolerance) return false;
  if (c.feature != best.feature) return c.feature < best.feature;
  return c.threshold < best.threshold;
}

class Builder {
 public:
  Builder(const LabeledDataset& data, const TreeConfig& config, const SortedColumns& sorted,
          std::span<const double> weights)
      : x_(data.features()),
        y_(data.labels()),
        w_(weights),
        config_(config),
        n_(data.size()),
        d_(data.dim()),
        order_(static_cast<std::size_t>(n_ * d_)),
        scratch_(static_cast<std::size_t>(n_)),
        goes_left_(static_cast<std::size_t>(n_), 0),
        features_(static_cast<std::size_t>(d_)) {
    for (Index f = 0; f < d_; ++f) {
      auto col = sorted.column(f);
      std::copy(col.begin(), col.end(), order_.begin() + f * n_);
    }
    m_try_ = config.m_try ? *config.m_try : static_cast<int>(d_);
  }

  DecisionTree build() {
    grow(0, n_, 0, config_.seed);
    return DecisionTree(std::move(nodes_), d_);
  }

 private:
  int* column(Index f) { return order_.data() + f * n_; }

  int grow(Index begin, Index end, int depth, std::uint64_t seed) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    ClassWeights<double> total;
    const int* rows = column(0);
    for (Index k = begin; k < end; ++k) {
      const int r = rows[k];
      (y_(r) == kPositive ? total.positive : total.negative) += w_[static_cast<std::size_t>(r)];
    }
    nodes_[static_cast<std::size_t>(id)].label = sign_label(total.positive - total.negative);

    const Index count = end - begin;
    if (total.positive == 0.0 || total.negative == 0.0 || depth >= config_.max_depth ||
        count < 2 * static_cast<Index>(config_.min_node_size)) {
      return id;
    }

    const Candidate best = find_split(begin, end, total, seed);
    if (!best.valid() || best.impurity > gini_impurity(total) + kTieTolerance) return id;

    const Index mid = partition(begin, end, best);
    const int left = grow(begin, mid, depth + 1, derive_seed(seed, 1));
    const int right = grow(mid, end, depth + 1, derive_seed(seed, 2));
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.rule = SplitRule{best.feature, best.threshold};
    node.left = left;
    node.right = right;
    return id;
  }

  Candidate find_split(Index begin, Index end, const ClassWeights<double>& total, std::uint64_t seed) {
    std::iota(features_.begin(), features_.end(), 0);
    if (m_try_ < d_) {
      Rng rng(seed);
      std::shuffle(features_.begin(), features_.end(), rng.engine());
    }
    Candidate best;
    // Scan the m_try drawn features; if none of them admits a split keep
    // drawing until one does.
    for (Index k = 0; k < d_; ++k) {
      if (k >= m_try_ && best.valid()) break;
      scan_feature(features_[static_cast<std::size_t>(k)], begin, end, total, best);
    }
    return best;
  }

  void scan_feature(int f, Index begin, Index end, const ClassWeights<double>& total, Candidate& best) {
    const int* rows = column(f);
    const Index count = end - begin;
    const Index min_child = config_.min_node_size;
    ClassWeights<double> left;
    for (Index k = begin; k + 1 < end; ++k) {
      const int r = rows[k];
      (y_(r) == kPositive ? left.positive : left.negative) += w_[static_cast<std::size_t>(r)];
      const Index left_count = k - begin + 1;
      const double v = x_(r, f);
      const double next = x_(rows[k + 1], f);
      if (!(next > v) || left_count < min_child || count - left_count < min_child) continue;
      const ClassWeights<double> right{std::max(0.0, total.positive - left.positive),
                                       std::max(0.0, total.negative - left.negative)};
      Candidate c{weighted_gini(left, right), f, midpoint_threshold(v, next)};
      if (better(c, best)) best = c;
    }
  }

  // Stable partition of every column block; returns the split position.
  Index partition(Index begin, Index end, const Candidate& split) {
    const int* rows = column(split.feature);
    Index n_left = 0;
    for (Index k = begin; k < end; ++k) {
      const int r = rows[k];
      const bool left = x_(r, split.feature) < split.threshold;
      goes_left_[static_cast<std::size_t>(r)] = left;
      n_left += left;
    }
    for (Index f = 0; f < d_; ++f) {
      int* col = column(f);
      Index l = 0;
      Index rpos = n_left;
      for (Index k = begin; k < end; ++k) {
        const int r = col[k];
        scratch_[static_cast<std::size_t>(goes_left_[static_cast<std::size_t>(r)] ? l++ : rpos++)] = r;
      }
      std::copy(scratch_.begin(), scratch_.begin() + (end - begin), col + begin);
    }
    return begin + n_left;
  }

  const Matrix& x_;
  const LabelVector& y_;
  std::span<const double> w_;
  const TreeConfig& config_;
  Index n_;
  Index d_;
  int m_try_ = 1;
  std::vector<int> order_;
  std::vector<int> scratch_;
  std::vector<char> goes_left_;
  std::vector<int> features_;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

void TreeConfig::validate(Index dim) const {
  if (max_depth < 1) throw InvalidInput("max_depth must be at least 1");
  if (min_node_size < 1) throw InvalidInput("min_node_size must be at least 1");
  if (m_try && (*m_try < 1 || *m_try > dim)) throw InvalidInput("m_try must lie in [1, d]");
}

std::vector<double> candidate_midpoints(std::span<const double> sorted_values) {
  std::vector<double> out;
  for (std::size_t i = 1; i < sorted_values.size(); ++i) {
    if (sorted_values[i] < sorted_values[i - 1]) throw InvalidInput("candidate_midpoints expects sorted input");
    if (sorted_values[i] > sorted_values[i - 1]) {
      out.push_back(midpoint_threshold(sorted_values[i - 1], sorted_values[i]));
    }
  }
  return out;
}

SortedColumns::SortedColumns(const Matrix& features)
    : rows_(features.rows()), cols_(features.cols()), order_(static_cast<std::size_t>(rows_ * cols_)) {
  for (Index f = 0; f < cols_; ++f) {
    auto first = order_.begin() + f * rows_;
    std::iota(first, first + rows_, 0);
    std::stable_sort(first, first + rows_, [&](int a, int b) { return features(a, f) < features(b, f); });
  }
}

DecisionTree fit_tree(const LabeledDataset& data, const TreeConfig& config) {
  const Vector w = data.weights_or_uniform();
  return fit_tree(data, config, SortedColumns(data.features()), {w.data(), static_cast<std::size_t>(w.size())});
}

DecisionTree fit_tree(const LabeledDataset& data, const TreeConfig& config, const SortedColumns& sorted,
                      std::span<const double> weights) {
  config.validate(data.dim());
  if (sorted.rows() != data.size() || sorted.cols() != data.dim()) {
    throw InvalidInput("sorted columns do not match the dataset");
  }
  if (static_cast<Index>(weights.size()) != data.size()) throw InvalidInput("weight count does not match rows");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("weights must be finite and non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw InvalidInput("all weights are zero");
  return Builder(data, config, sorted, weights).build();
}

}  // namespace ens
