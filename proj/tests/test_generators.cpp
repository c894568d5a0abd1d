#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ensemble/generators.hpp"
#include "ensemble/rng.hpp"

using namespace ens;

TEST_CASE("latin hypercube columns are permutations of the midpoints") {
  for (Index n : {1, 2, 7, 400}) {
    const Matrix x = lhs_midpoints(n, 5, 42);
    for (Index j = 0; j < 5; ++j) {
      std::vector<double> col(x.col(j).begin(), x.col(j).end());
      std::sort(col.begin(), col.end());
      for (Index i = 0; i < n; ++i) {
        CHECK(col[static_cast<std::size_t>(i)] == (2.0 * static_cast<double>(i + 1) - 1.0) / (2.0 * static_cast<double>(n)));
      }
    }
  }
}

TEST_CASE("designs depend only on the seed") {
  CHECK(lhs_midpoints(50, 3, 1) == lhs_midpoints(50, 3, 1));
  CHECK(lhs_midpoints(50, 3, 1) != lhs_midpoints(50, 3, 2));
  const Matrix u = iid_uniform(1000, 4, 3);
  CHECK(u == iid_uniform(1000, 4, 3));
  CHECK((u.array() >= 0.0).all());
  CHECK((u.array() < 1.0).all());
  CHECK(u.mean() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(generate_design({.n = 10, .d = 2, .scheme = DesignScheme::IidUniform, .seed = 3}) == iid_uniform(10, 2, 3));
  CHECK_THROWS_AS(lhs_midpoints(0, 2, 1), InvalidInput);
}

TEST_CASE("exact flips give exact label counts") {
  const Matrix x = lhs_midpoints(5000, 20, 1);
  const LabeledDataset d = label_dataset(x, LabelModel::pure_noise(0.8), NoiseSpec::exact_count(1000, 2));
  CHECK(d.count_label(kNegative) == 1000);
  CHECK(d.count_label(kPositive) == 4000);
  CHECK_THROWS_AS(label_dataset(x, LabelModel::pure_noise(0.8), NoiseSpec::exact_count(5001, 2)), InvalidInput);
}

TEST_CASE("bernoulli flip fraction stays within four standard deviations") {
  const Index n = 20000;
  const Matrix x = iid_uniform(n, 2, 5);
  const LabeledDataset d = label_dataset(x, LabelModel::pure_noise(0.8), NoiseSpec::bernoulli(0.8, 6));
  const double frac = static_cast<double>(d.count_label(kNegative)) / static_cast<double>(n);
  CHECK(std::abs(frac - 0.2) < 4.0 * std::sqrt(0.16 / static_cast<double>(n)));
}

TEST_CASE("model noise follows the conditional probability") {
  const Index n = 20000;
  const Matrix x = iid_uniform(n, 2, 7);
  const LabelModel circle = LabelModel::circle();
  const LabeledDataset d = label_dataset(x, circle, NoiseSpec::model(8));
  Index disagree = 0;
  for (Index i = 0; i < n; ++i) disagree += d.label(i) != circle.bayes_label(x.row(i));
  CHECK(std::abs(static_cast<double>(disagree) / static_cast<double>(n) - 0.1) < 4.0 * std::sqrt(0.09 / static_cast<double>(n)));
}

TEST_CASE("noise spec parsing") {
  CHECK(NoiseSpec::parse("exact:80").k == 80);
  CHECK(NoiseSpec::parse("bernoulli:0.75").p == 0.75);
  CHECK(NoiseSpec::parse("model").mode == NoiseSpec::Mode::Model);
  CHECK(NoiseSpec::parse(NoiseSpec::bernoulli(0.3).to_string()).p == 0.3);
  CHECK_THROWS_AS(NoiseSpec::parse("exact:-1"), InvalidInput);
  CHECK_THROWS_AS(NoiseSpec::parse("exact"), InvalidInput);
  CHECK_THROWS_AS(NoiseSpec::parse("flip:3"), InvalidInput);
  CHECK_THROWS_AS(NoiseSpec::parse("bernoulli:x"), InvalidInput);
}

TEST_CASE("points outside the cube are rejected") {
  Matrix x(1, 2);
  x << 0.5, 1.5;
  CHECK_THROWS_AS(label_dataset(x, LabelModel::pure_noise(0.8), NoiseSpec::model()), InvalidInput);
  CHECK_THROWS_AS(label_dataset(Matrix::Constant(1, 1, 0.5), LabelModel::circle(), NoiseSpec::model()), InvalidInput);
}

TEST_CASE("neighbor holdout points sit at the requested distance") {
  const Matrix x = lhs_midpoints(2000, 20, 3);
  const LabeledDataset d = label_dataset(x, LabelModel::pure_noise(0.8), NoiseSpec::exact_count(400, 4));
  const NeighborHoldout h = neighbor_holdout(d, 0.1, 5);
  REQUIRE(h.points.rows() == 400);
  CHECK(h.sources.size() == 400);
  for (Index k = 0; k < h.points.rows(); ++k) {
    const Index src = h.sources[static_cast<std::size_t>(k)];
    CHECK(d.label(src) == kNegative);
    CHECK(std::abs((h.points.row(k) - d.row(src)).norm() - 0.1) < 1e-12);
    CHECK((h.points.row(k).array() >= 0.0).all());
    CHECK((h.points.row(k).array() <= 1.0).all());
  }
  CHECK(neighbor_holdout(d, 0.1, 5).points == h.points);
  CHECK_THROWS_AS(neighbor_holdout(d, 0.0, 5), InvalidInput);
}

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, "design") != derive_seed(1, "labels"));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, "bootstrap") == derive_seed(7, "bootstrap"));
  Rng a = Rng::stream(3, "x");
  Rng b = Rng::stream(3, "x");
  for (int i = 0; i < 10; ++i) CHECK(a.engine()() == b.engine()());
  std::set<std::int64_t> seen;
  Rng c(9);
  for (int i = 0; i < 1000; ++i) {
    const auto v = c.below(5);
    CHECK(v >= 0);
    CHECK(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}
