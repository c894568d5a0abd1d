#include <doctest.h>

#include <random>

#include "ensemble/tree_learner.hpp"
#include "oracles.hpp"

using namespace ens;

namespace {

double weighted_error(const DecisionTree& tree, const LabeledDataset& data) {
  const Vector w = data.weights_or_uniform();
  double wrong = 0.0;
  for (Index i = 0; i < data.size(); ++i) {
    if (tree.predict(data.row(i)) != data.label(i)) wrong += w(i);
  }
  return wrong / w.sum();
}

}  // namespace

TEST_CASE("weighted gini examples") {
  CHECK(weighted_gini(ClassWeights<double>{1.0, 0.0}, ClassWeights<double>{0.0, 2.0}) == 0.0);
  CHECK(weighted_gini(ClassWeights<double>{0.5, 0.5}, ClassWeights<double>{0.0, 0.0}) == doctest::Approx(0.5));
  CHECK(weighted_gini(ClassWeights<double>{0.3, 0.2}, ClassWeights<double>{0.1, 0.4}) == doctest::Approx(0.4));
  CHECK_THROWS_AS(weighted_gini(ClassWeights<double>{}, ClassWeights<double>{}), InvalidInput);
  CHECK_THROWS_AS(weighted_gini(ClassWeights<double>{-0.1, 1.0}, ClassWeights<double>{}), InvalidInput);
  // The template also runs on long double.
  CHECK(weighted_gini(ClassWeights<long double>{1.0L, 1.0L}, ClassWeights<long double>{}) == doctest::Approx(0.5));
}

TEST_CASE("candidate midpoints") {
  const std::vector<double> a{0.2, 0.4};
  const auto ma = candidate_midpoints(a);
  REQUIRE(ma.size() == 1);
  CHECK(ma[0] == doctest::Approx(0.3));
  const std::vector<double> b{0.5, 0.5, 0.5};
  CHECK(candidate_midpoints(b).empty());
  const std::vector<double> c{0.1, 0.3, 0.3, 0.9};
  const auto mc = candidate_midpoints(c);
  REQUIRE(mc.size() == 2);
  CHECK(mc[0] == doctest::Approx(0.2));
  CHECK(mc[1] == doctest::Approx(0.6));
  const std::vector<double> one{0.7};
  CHECK(candidate_midpoints(one).empty());
  const std::vector<double> unsorted{0.4, 0.2};
  CHECK_THROWS_AS(candidate_midpoints(unsorted), InvalidInput);
}

TEST_CASE("midpoint threshold separates adjacent doubles") {
  const double lo = 0.5;
  const double hi = std::nextafter(lo, 1.0);
  const double t = midpoint_threshold(lo, hi);
  CHECK(lo < t);
  CHECK(t <= hi);
}

TEST_CASE("two points split at their midpoint") {
  Matrix x(2, 1);
  x << 0.25, 0.75;
  LabelVector y(2);
  y << -1, 1;
  const DecisionTree t = fit_tree({x, y}, TreeConfig{.max_depth = 1});
  REQUIRE(t.leaf_count() == 2);
  CHECK(t.nodes()[0].rule.feature == 0);
  CHECK(t.nodes()[0].rule.threshold == doctest::Approx(0.5));
  CHECK(t.predict(Point::Constant(1, 0.25)) == kNegative);
  CHECK(t.predict(Point::Constant(1, 0.75)) == kPositive);
}

TEST_CASE("pure data gives a single leaf") {
  Matrix x(4, 2);
  x << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8;
  const DecisionTree t = fit_tree({x, LabelVector::Ones(4)}, TreeConfig{});
  CHECK(t.leaf_count() == 1);
  CHECK(t.predict(x.row(0)) == kPositive);
}

TEST_CASE("eight alternating points: greedy splits peel off the ends") {
  Matrix x(8, 1);
  LabelVector y(8);
  for (int i = 0; i < 8; ++i) {
    x(i, 0) = (i + 0.5) / 8.0;
    y(i) = i % 2 == 0 ? kPositive : kNegative;
  }
  // Shapes frozen from a reference CART implementation on the same points.
  const DecisionTree shallow = fit_tree({x, y}, TreeConfig{.max_depth = 3, .min_node_size = 1});
  CHECK(shallow.leaf_count() == 4);
  CHECK(weighted_error(shallow, {x, y}) == 0.25);
  const DecisionTree full = fit_tree({x, y}, TreeConfig{.min_node_size = 1});
  CHECK(full.leaf_count() == 8);
  CHECK(full.depth() == 7);
  CHECK(weighted_error(full, {x, y}) == 0.0);
}

TEST_CASE("XOR needs a zero-gain split and still interpolates") {
  Matrix x(4, 2);
  x << 0.25, 0.25, 0.75, 0.75, 0.25, 0.75, 0.75, 0.25;
  LabelVector y(4);
  y << 1, 1, -1, -1;
  const DecisionTree t = fit_tree({x, y}, TreeConfig{});
  CHECK(weighted_error(t, {x, y}) == 0.0);
}

TEST_CASE("leaf labels follow the weighted majority with ties to +1") {
  Matrix x = Matrix::Constant(3, 1, 0.5);
  LabelVector y(3);
  y << 1, -1, -1;
  Vector w(3);
  w << 2.0, 1.0, 1.0;
  CHECK(fit_tree({x, y, w}, TreeConfig{}).predict(Point::Constant(1, 0.5)) == kPositive);
  w << 1.9, 1.0, 1.0;
  CHECK(fit_tree({x, y, w}, TreeConfig{}).predict(Point::Constant(1, 0.5)) == kNegative);
}

TEST_CASE("zero-weight rows do not influence the fit") {
  Matrix x(3, 1);
  x << 0.1, 0.5, 0.9;
  LabelVector y(3);
  y << 1, -1, 1;
  Vector w(3);
  w << 1.0, 0.0, 1.0;
  const DecisionTree t = fit_tree({x, y, w}, TreeConfig{});
  CHECK(t.leaf_count() == 1);
  CHECK(t.predict(Point::Constant(1, 0.5)) == kPositive);
}

TEST_CASE("input errors") {
  Matrix x(2, 2);
  x << 0.1, 0.2, 0.3, 0.4;
  LabelVector y(2);
  y << 1, -1;
  const LabeledDataset d{x, y};
  CHECK_THROWS_AS(fit_tree(d, TreeConfig{.max_depth = 0}), InvalidInput);
  CHECK_THROWS_AS(fit_tree(d, TreeConfig{.min_node_size = 0}), InvalidInput);
  CHECK_THROWS_AS(fit_tree(d, TreeConfig{.m_try = 3}), InvalidInput);
  const std::vector<double> zero(2, 0.0);
  CHECK_THROWS_AS(fit_tree(d, TreeConfig{}, SortedColumns(x), zero), InvalidInput);
}

TEST_CASE("min node size bounds every child") {
  std::mt19937_64 gen(3);
  const LabeledDataset d = oracle::random_continuous_dataset(gen, 60, 2);
  const DecisionTree t = fit_tree(d, TreeConfig{.min_node_size = 5});
  std::vector<int> counts(t.nodes().size(), 0);
  for (Index i = 0; i < d.size(); ++i) ++counts[static_cast<std::size_t>(t.leaf_index(d.row(i)))];
  for (std::size_t id = 0; id < t.nodes().size(); ++id) {
    if (t.nodes()[id].is_leaf()) CHECK(counts[id] >= 5);
  }
}

TEST_CASE("root split matches exhaustive search") {
  std::mt19937_64 gen(20240601);
  std::uniform_int_distribution<int> size(2, 12);
  std::uniform_int_distribution<int> dim(1, 2);
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const LabeledDataset base = oracle::random_small_dataset(gen, size(gen), dim(gen));
    std::vector<double> w(static_cast<std::size_t>(base.size()));
    for (auto& v : w) v = trial % 2 == 0 ? 1.0 : weight(gen);
    const LabeledDataset d = base.with_weights(Eigen::Map<const Vector>(w.data(), base.size()));
    const oracle::SplitChoice best = oracle::exhaustive_split(d, w);
    const int depth = 1 + trial % 2;
    const DecisionTree t = fit_tree(d, TreeConfig{.max_depth = depth});
    const auto& root = t.nodes()[0];
    if (root.is_leaf()) {
      // Only pure nodes or constant features stop at the root.
      const bool pure = d.count_label(kPositive) == 0 || d.count_label(kNegative) == 0;
      CHECK((pure || best.feature < 0));
      continue;
    }
    const double chosen = oracle::split_impurity(d, w, root.rule.feature, root.rule.threshold);
    CHECK(chosen == doctest::Approx(best.impurity).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("full-depth trees interpolate distinct points") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> size(2, 80);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const LabeledDataset d = oracle::random_continuous_dataset(gen, size(gen), dim(gen), 0.7);
    CHECK(weighted_error(fit_tree(d, TreeConfig{}), d) == 0.0);
  }
}

TEST_CASE("scaling all weights leaves the tree unchanged") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> weight(0.1, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const LabeledDataset base = oracle::random_continuous_dataset(gen, 40, 3);
    Vector w(base.size());
    for (Index i = 0; i < w.size(); ++i) w(i) = weight(gen);
    const TreeConfig config{.max_depth = 4, .m_try = 2, .seed = 17};
    const DecisionTree ref = fit_tree(base.with_weights(w), config);
    for (double c : {0.25, 2.0, 1024.0}) {
      CHECK(fit_tree(base.with_weights(w * c), config) == ref);
    }
  }
}

TEST_CASE("training error does not increase with depth") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const LabeledDataset d = oracle::random_continuous_dataset(gen, 120, 2, 0.6);
    double previous = 1.0;
    for (int depth = 1; depth <= 10; ++depth) {
      const double e = weighted_error(fit_tree(d, TreeConfig{.max_depth = depth, .m_try = 1, .seed = 4}), d);
      CHECK(e <= previous + 1e-15);
      previous = e;
    }
  }
}

TEST_CASE("stumps have one split") {
  std::mt19937_64 gen(2);
  const LabeledDataset d = oracle::random_continuous_dataset(gen, 50, 3);
  const DecisionTree s = fit_tree(d, TreeConfig{.max_depth = 1});
  CHECK(s.leaf_count() == 2);
  CHECK(s.depth() == 1);
}

TEST_CASE("identical inputs give identical trees") {
  std::mt19937_64 gen(12);
  const LabeledDataset d = oracle::random_continuous_dataset(gen, 200, 5);
  const TreeConfig config{.max_depth = 8, .m_try = 2, .seed = 77};
  CHECK(fit_tree(d, config) == fit_tree(d, config));
}
