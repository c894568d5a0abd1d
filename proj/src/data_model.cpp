#include "ensemble/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ens {

LabeledDataset::LabeledDataset(Matrix features, LabelVector labels, std::optional<Vector> weights)
    : features_(std::move(features)), labels_(std::move(labels)), weights_(std::move(weights)) {
  if (features_.rows() < 1 || features_.cols() < 1) {
    throw InvalidInput("dataset needs at least one row and one feature");
  }
  if (labels_.size() != features_.rows()) {
    throw InvalidInput("label count does not match row count");
  }
  if (!features_.allFinite()) throw InvalidInput("feature values must be finite");
  for (Index i = 0; i < labels_.size(); ++i) {
    if (!is_label(labels_(i))) {
      throw InvalidInput("label at row " + std::to_string(i) + " is not -1 or +1");
    }
  }
  if (weights_) {
    if (weights_->size() != features_.rows()) throw InvalidInput("weight count does not match row count");
    if (!weights_->allFinite() || (weights_->array() < 0.0).any()) {
      throw InvalidInput("weights must be finite and non-negative");
    }
    if (!(weights_->sum() > 0.0)) throw InvalidInput("weights must have a positive sum");
  }
}

Vector LabeledDataset::weights_or_uniform() const {
  return weights_ ? *weights_ : Vector::Ones(size());
}

LabeledDataset LabeledDataset::select_rows(std::span<const Index> rows) const {
  Matrix x(static_cast<Index>(rows.size()), dim());
  LabelVector y(static_cast<Index>(rows.size()));
  std::optional<Vector> w;
  if (weights_) w = Vector(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index r = rows[k];
    if (r < 0 || r >= size()) throw InvalidInput("row index out of range");
    const auto i = static_cast<Index>(k);
    x.row(i) = features_.row(r);
    y(i) = labels_(r);
    if (w) (*w)(i) = (*weights_)(r);
  }
  return LabeledDataset(std::move(x), std::move(y), std::move(w));
}

LabeledDataset LabeledDataset::with_weights(Vector weights) const {
  return LabeledDataset(features_, labels_, std::move(weights));
}

LabeledDataset LabeledDataset::without_weights() const { return LabeledDataset(features_, labels_); }

Index LabeledDataset::count_label(Label y) const { return (labels_.array() == y).count(); }

// ---------------------------------------------------------------------------

DecisionTree::DecisionTree(std::vector<Node> nodes, Index input_dim)
    : nodes_(std::move(nodes)), input_dim_(input_dim) {
  if (nodes_.empty()) throw InvalidInput("tree needs at least one node");
  if (input_dim_ < 1) throw InvalidInput("tree input dimension must be positive");
  const int count = static_cast<int>(nodes_.size());
  std::vector<int> parents(nodes_.size(), 0);
  for (const auto& node : nodes_) {
    if (node.is_leaf()) {
      if (node.right >= 0) throw InvalidInput("leaf with a right child");
      if (!is_label(node.label)) throw InvalidInput("leaf label must be -1 or +1");
      continue;
    }
    if (node.left <= 0 || node.right <= 0 || node.left >= count || node.right >= count) {
      throw InvalidInput("child index out of range");
    }
    if (node.rule.feature < 0 || node.rule.feature >= input_dim_) {
      throw InvalidInput("split feature out of range");
    }
    if (!std::isfinite(node.rule.threshold)) throw InvalidInput("split threshold must be finite");
    ++parents[static_cast<std::size_t>(node.left)];
    ++parents[static_cast<std::size_t>(node.right)];
  }
  for (int i = 1; i < count; ++i) {
    if (parents[static_cast<std::size_t>(i)] != 1) throw InvalidInput("node not referenced exactly once");
  }
  // Every non-root node has one parent, so a traversal from the root that
  // visits all nodes also rules out cycles.
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int visited = 0;
  leaves_ = 0;
  depth_ = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    if (++visited > count) throw InvalidInput("tree contains a cycle");
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.is_leaf()) {
      ++leaves_;
      depth_ = std::max(depth_, d);
    } else {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  if (visited != count) throw InvalidInput("tree has unreachable nodes");
}

DecisionTree DecisionTree::constant(Label label, Index input_dim) {
  Node leaf;
  leaf.label = label;
  return DecisionTree({leaf}, input_dim);
}

DecisionTree DecisionTree::stump(SplitRule rule, Label left, Label right, Index input_dim) {
  Node root;
  root.rule = rule;
  root.left = 1;
  root.right = 2;
  Node l;
  l.label = left;
  Node r;
  r.label = right;
  return DecisionTree({root, l, r}, input_dim);
}

bool DecisionTree::operator==(const DecisionTree& other) const {
  if (input_dim_ != other.input_dim_ || nodes_.size() != other.nodes_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& a = nodes_[i];
    const Node& b = other.nodes_[i];
    if (a.left != b.left || a.right != b.right) return false;
    if (a.is_leaf()) {
      if (a.label != b.label) return false;
    } else if (a.rule.feature != b.rule.feature || a.rule.threshold != b.rule.threshold) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

BoostModel::BoostModel(std::vector<BoostStage> stages) : stages_(std::move(stages)) {
  for (const auto& s : stages_) {
    if (!std::isfinite(s.alpha)) throw InvalidInput("stage coefficient must be finite");
    if (s.tree.input_dim() != stages_.front().tree.input_dim()) {
      throw InvalidInput("stages disagree on input dimension");
    }
  }
}

Index BoostModel::input_dim() const { return stages_.empty() ? 0 : stages_.front().tree.input_dim(); }

BoostModel BoostModel::truncated(int prefix) const {
  if (prefix <= 0 || prefix > size()) throw InvalidInput("truncation prefix out of range");
  return BoostModel(std::vector<BoostStage>(stages_.begin(), stages_.begin() + prefix));
}

// ---------------------------------------------------------------------------

ForestModel::ForestModel(std::vector<DecisionTree> trees, std::vector<std::vector<Index>> bootstrap_indices,
                         std::vector<std::uint64_t> tree_seeds, int m_try, Index training_size)
    : trees_(std::move(trees)),
      bootstrap_(std::move(bootstrap_indices)),
      seeds_(std::move(tree_seeds)),
      m_try_(m_try),
      training_size_(training_size) {
  if (trees_.empty()) throw InvalidInput("forest needs at least one tree");
  if (bootstrap_.size() != trees_.size() || seeds_.size() != trees_.size()) {
    throw InvalidInput("forest bootstrap/seed records must match the tree count");
  }
  for (const auto& rows : bootstrap_) {
    if (static_cast<Index>(rows.size()) != training_size_) {
      throw InvalidInput("bootstrap sample size must equal the training size");
    }
    for (Index r : rows) {
      if (r < 0 || r >= training_size_) throw InvalidInput("bootstrap index out of range");
    }
  }
  for (const auto& t : trees_) {
    if (t.input_dim() != trees_.front().input_dim()) throw InvalidInput("trees disagree on input dimension");
  }
  if (m_try_ < 1 || m_try_ > input_dim()) throw InvalidInput("m_try must lie in [1, d]");
}

ForestModel ForestModel::first_trees(int count) const {
  if (count <= 0 || count > size()) throw InvalidInput("tree count out of range");
  const auto k = static_cast<std::size_t>(count);
  return ForestModel({trees_.begin(), trees_.begin() + count}, {bootstrap_.begin(), bootstrap_.begin() + count},
                     {seeds_.begin(), seeds_.begin() + static_cast<std::ptrdiff_t>(k)}, m_try_, training_size_);
}

// ---------------------------------------------------------------------------

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput(std::string(what) + " must lie in [0, 1]");
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw InvalidInput("bad number '" + item + "'");
    } catch (const std::logic_error&) {
      throw InvalidInput("bad number '" + item + "' in label model");
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

LabelModel::LabelModel(Kind kind) : kind_(std::move(kind)) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PureNoise>) {
          check_probability(m.p, "pure noise p");
        } else if constexpr (std::is_same_v<T, Circle>) {
          check_probability(m.p_in, "circle p_in");
          check_probability(m.p_out, "circle p_out");
          if (!(m.radius > 0.0)) throw InvalidInput("circle radius must be positive");
          if (m.center_x - m.radius < 0.0 || m.center_x + m.radius > 1.0 || m.center_y - m.radius < 0.0 ||
              m.center_y + m.radius > 1.0) {
            throw InvalidInput("circle must lie inside the unit square");
          }
        } else {
          check_probability(m.base, "additive base");
          check_probability(m.base + m.jump, "additive base + jump");
        }
      },
      kind_);
}

LabelModel LabelModel::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::vector<double> args = colon == std::string::npos ? std::vector<double>{} : parse_numbers(text.substr(colon + 1));
  if (name == "pure_noise") {
    if (args.size() != 1) throw InvalidInput("pure_noise expects one probability");
    return pure_noise(args[0]);
  }
  if (name == "circle") {
    if (args.empty()) return circle();
    if (args.size() != 5) throw InvalidInput("circle expects cx,cy,r,p_in,p_out");
    return circle(Circle{args[0], args[1], args[2], args[3], args[4]});
  }
  if (name == "additive5d" || name == "additive") {
    if (args.empty()) return additive();
    if (args.size() != 2) throw InvalidInput("additive5d expects base,jump");
    return additive(args[0], args[1]);
  }
  throw InvalidInput("unknown label model '" + name + "'");
}

std::string LabelModel::to_string() const {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PureNoise>) {
          return "pure_noise:" + fmt(m.p);
        } else if constexpr (std::is_same_v<T, Circle>) {
          return "circle:" + fmt(m.center_x) + "," + fmt(m.center_y) + "," + fmt(m.radius) + "," + fmt(m.p_in) +
                 "," + fmt(m.p_out);
        } else {
          return "additive5d:" + fmt(m.base) + "," + fmt(m.jump);
        }
      },
      kind_);
}

Index LabelModel::min_dim() const { return std::holds_alternative<PureNoise>(kind_) ? 1 : 2; }

double LabelModel::bayes_error() const {
  const auto risk = [](double p) { return std::min(p, 1.0 - p); };
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PureNoise>) {
          return risk(m.p);
        } else if constexpr (std::is_same_v<T, Circle>) {
          const double inside = std::numbers::pi * m.radius * m.radius;
          return inside * risk(m.p_in) + (1.0 - inside) * risk(m.p_out);
        } else {
          // P(x1 + x2 > 1) = 1/2 for independent uniforms.
          return 0.5 * risk(m.base + m.jump) + 0.5 * risk(m.base);
        }
      },
      kind_);
}

}  // namespace ens
