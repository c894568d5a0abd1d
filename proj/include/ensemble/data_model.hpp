#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ens {

/// Thrown whenever an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Index = Eigen::Index;

/// Class labels are the integers -1 and +1 so that margins are plain sums.
using Label = int;
inline constexpr Label kPositive = +1;
inline constexpr Label kNegative = -1;

/// Row-major so that a single observation is a contiguous row.
template <typename Scalar>
using MatrixR = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixR<double>;
using Vector = VectorX<double>;
using LabelVector = Eigen::VectorXi;
using Point = Eigen::RowVectorXd;

/// sign() with the tie rule used everywhere: sign(0) = +1.
template <typename Scalar>
constexpr Label sign_label(Scalar value) {
  return value >= Scalar(0) ? kPositive : kNegative;
}

inline bool is_label(int value) { return value == kPositive || value == kNegative; }

/// Points in [0,1]^d with +/-1 labels and optional non-negative weights.
class LabeledDataset {
 public:
  LabeledDataset(Matrix features, LabelVector labels, std::optional<Vector> weights = std::nullopt);

  Index size() const { return features_.rows(); }
  Index dim() const { return features_.cols(); }

  const Matrix& features() const { return features_; }
  const LabelVector& labels() const { return labels_; }
  bool has_weights() const { return weights_.has_value(); }
  const std::optional<Vector>& weights() const { return weights_; }
  /// Explicit weights, or all ones when the dataset is unweighted.
  Vector weights_or_uniform() const;

  auto row(Index i) const { return features_.row(i); }
  Label label(Index i) const { return labels_(i); }

  /// Rows in the given order; duplicates allowed (bootstrap samples).
  LabeledDataset select_rows(std::span<const Index> rows) const;
  LabeledDataset with_weights(Vector weights) const;
  LabeledDataset without_weights() const;

  Index count_label(Label y) const;

 private:
  Matrix features_;
  LabelVector labels_;
  std::optional<Vector> weights_;
};

/// Axis-aligned split: rows with x[feature] < threshold go left.
struct SplitRule {
  int feature = 0;
  double threshold = 0.0;

  template <typename Derived>
  bool goes_left(const Eigen::DenseBase<Derived>& x) const {
    return x(feature) < threshold;
  }
};

/// Binary axis-aligned tree stored as an arena; node 0 is the root.
class DecisionTree {
 public:
  struct Node {
    SplitRule rule;
    int left = -1;
    int right = -1;
    Label label = kPositive;

    bool is_leaf() const { return left < 0; }
  };

  DecisionTree() : DecisionTree(constant(kPositive, 1)) {}
  /// Validates child links (every non-root node referenced exactly once, acyclic).
  DecisionTree(std::vector<Node> nodes, Index input_dim);

  static DecisionTree constant(Label label, Index input_dim);
  static DecisionTree stump(SplitRule rule, Label left, Label right, Index input_dim);

  const std::vector<Node>& nodes() const { return nodes_; }
  Index input_dim() const { return input_dim_; }
  int depth() const { return depth_; }
  int leaf_count() const { return leaves_; }

  template <typename Derived>
  Label predict(const Eigen::DenseBase<Derived>& x) const {
    if (x.size() != input_dim_) {
      throw InvalidInput("tree expects a point of dimension " + std::to_string(input_dim_) +
                         ", got " + std::to_string(x.size()));
    }
    const Node* node = &nodes_[0];
    while (!node->is_leaf()) {
      node = &nodes_[node->rule.goes_left(x) ? node->left : node->right];
    }
    return node->label;
  }

  /// Index of the leaf reached by x.
  template <typename Derived>
  int leaf_index(const Eigen::DenseBase<Derived>& x) const {
    int id = 0;
    while (!nodes_[id].is_leaf()) {
      id = nodes_[id].rule.goes_left(x) ? nodes_[id].left : nodes_[id].right;
    }
    return id;
  }

  bool operator==(const DecisionTree& other) const;

 private:
  std::vector<Node> nodes_;
  Index input_dim_ = 1;
  int depth_ = 0;
  int leaves_ = 1;
};

template <typename Derived>
Label predict_tree(const DecisionTree& tree, const Eigen::DenseBase<Derived>& x) {
  return tree.predict(x);
}

struct BoostStage {
  double alpha = 0.0;
  DecisionTree tree;
};

/// Ordered (alpha_m, G_m) pairs; f_M(x) = sum_m alpha_m G_m(x).
class BoostModel {
 public:
  BoostModel() = default;
  explicit BoostModel(std::vector<BoostStage> stages);

  int size() const { return static_cast<int>(stages_.size()); }
  const std::vector<BoostStage>& stages() const { return stages_; }
  const BoostStage& stage(int m) const { return stages_.at(static_cast<std::size_t>(m)); }
  Index input_dim() const;

  /// Sum over the half-open stage range [begin, end).
  template <typename Derived>
  double range_margin(const Eigen::DenseBase<Derived>& x, int begin, int end) const {
    double margin = 0.0;
    for (int m = begin; m < end; ++m) {
      const auto& s = stages_[static_cast<std::size_t>(m)];
      margin += s.alpha * s.tree.predict(x);
    }
    return margin;
  }

  BoostModel truncated(int prefix) const;

 private:
  std::vector<BoostStage> stages_;
};

/// f_prefix(x); the prefix defaults to every stage.
template <typename Derived>
double predict_margin(const BoostModel& model, const Eigen::DenseBase<Derived>& x,
                      std::optional<int> prefix = std::nullopt) {
  const int m = prefix.value_or(model.size());
  if (m <= 0 || m > model.size()) {
    throw InvalidInput("prefix " + std::to_string(m) + " outside [1, " +
                       std::to_string(model.size()) + "]");
  }
  return model.range_margin(x, 0, m);
}

template <typename Derived>
Label predict_boost(const BoostModel& model, const Eigen::DenseBase<Derived>& x,
                    std::optional<int> prefix = std::nullopt) {
  return sign_label(predict_margin(model, x, prefix));
}

struct VoteResult {
  Label label = kPositive;
  int plus = 0;
  int minus = 0;
};

/// Trees plus the bootstrap records needed to replay the fit exactly.
class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::vector<DecisionTree> trees, std::vector<std::vector<Index>> bootstrap_indices,
              std::vector<std::uint64_t> tree_seeds, int m_try, Index training_size);

  int size() const { return static_cast<int>(trees_.size()); }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<std::vector<Index>>& bootstrap_indices() const { return bootstrap_; }
  const std::vector<std::uint64_t>& tree_seeds() const { return seeds_; }
  int m_try() const { return m_try_; }
  Index training_size() const { return training_size_; }
  Index input_dim() const { return trees_.empty() ? 0 : trees_.front().input_dim(); }

  /// Majority vote over the first `count` trees (all by default); ties go to +1.
  template <typename Derived>
  VoteResult vote(const Eigen::DenseBase<Derived>& x, std::optional<int> count = std::nullopt) const {
    const int k = count.value_or(size());
    if (k <= 0 || k > size()) throw InvalidInput("vote tree count out of range");
    VoteResult r;
    for (int b = 0; b < k; ++b) {
      (trees_[static_cast<std::size_t>(b)].predict(x) == kPositive ? r.plus : r.minus) += 1;
    }
    r.label = r.plus >= r.minus ? kPositive : kNegative;
    return r;
  }

  ForestModel first_trees(int count) const;

 private:
  std::vector<DecisionTree> trees_;
  std::vector<std::vector<Index>> bootstrap_;
  std::vector<std::uint64_t> seeds_;
  int m_try_ = 1;
  Index training_size_ = 0;
};

template <typename Derived>
VoteResult forest_vote(const ForestModel& model, const Eigen::DenseBase<Derived>& x) {
  return model.vote(x);
}

/// p(y=+1|x) constant everywhere.
struct PureNoise {
  double p = 0.8;
};

/// p(y=+1|x) = p_in inside the disc over (x1, x2), p_out outside.
struct Circle {
  double center_x = 0.5;
  double center_y = 0.5;
  double radius = 0.4;
  double p_in = 0.1;
  double p_out = 0.9;
};

/// p(y=+1|x) = base + jump * I[x1 + x2 > 1].
struct Additive {
  double base = 0.2;
  double jump = 0.6;
};

/// Conditional class-probability model with its Bayes rule.
class LabelModel {
 public:
  using Kind = std::variant<PureNoise, Circle, Additive>;

  explicit LabelModel(Kind kind);
  static LabelModel pure_noise(double p) { return LabelModel(PureNoise{p}); }
  static LabelModel circle(Circle c = {}) { return LabelModel(c); }
  static LabelModel additive(double base = 0.2, double jump = 0.6) {
    return LabelModel(Additive{base, jump});
  }
  /// Parses "pure_noise:0.8", "circle:cx,cy,r,p_in,p_out" (or "circle"), "additive5d:0.2,0.6".
  static LabelModel parse(const std::string& text);

  const Kind& kind() const { return kind_; }
  std::string to_string() const;
  /// Smallest input dimension the model reads.
  Index min_dim() const;

  template <typename Derived>
  double positive_probability(const Eigen::DenseBase<Derived>& x) const {
    if (x.size() < min_dim()) throw InvalidInput("point dimension too small for label model");
    return std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, PureNoise>) {
            return m.p;
          } else if constexpr (std::is_same_v<T, Circle>) {
            const double dx = x(0) - m.center_x;
            const double dy = x(1) - m.center_y;
            return dx * dx + dy * dy <= m.radius * m.radius ? m.p_in : m.p_out;
          } else {
            return x(0) + x(1) > 1.0 ? m.base + m.jump : m.base;
          }
        },
        kind_);
  }

  template <typename Derived>
  Label bayes_label(const Eigen::DenseBase<Derived>& x) const {
    return positive_probability(x) > 0.5 ? kPositive : kNegative;
  }

  /// Bayes risk under x ~ Uniform[0,1]^d.
  double bayes_error() const;

  bool operator==(const LabelModel& other) const { return to_string() == other.to_string(); }

 private:
  Kind kind_;
};

}  // namespace ens
