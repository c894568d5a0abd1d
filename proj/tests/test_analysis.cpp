#include <doctest.h>

#include <cmath>
#include <random>

#include "ensemble/analysis.hpp"
#include "ensemble/forest.hpp"
#include "ensemble/generators.hpp"
#include "oracles.hpp"

using namespace ens;

TEST_CASE("rate formulas") {
  const RateFormulas r = rate_formulas(0.75, 20, 2);
  CHECK(r.local_rate == 0.0125);
  CHECK(r.onenn_rate == 0.375);
  CHECK(r.stump_lower_bound == 0.015625);
  CHECK(rate_formulas(0.8, 400, 1).stump_lower_bound == 0.0);
  CHECK(rate_formulas(0.8, 400, 1).local_rate == doctest::Approx(0.2));
  CHECK_THROWS_AS(rate_formulas(0.5, 20, 2), InvalidInput);
  CHECK_THROWS_AS(rate_formulas(1.0, 20, 2), InvalidInput);
  CHECK_THROWS_AS(rate_formulas(0.7, 0, 2), InvalidInput);
}

TEST_CASE("paired t test against a reference value") {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{2, 2, 5, 5};
  const PairedTest t = paired_t_test_less(a, b);
  CHECK(t.mean_difference == doctest::Approx(-1.0));
  CHECK(t.t_statistic == doctest::Approx(-2.449489742783178).epsilon(1e-12));
  CHECK(t.p_value == doctest::Approx(0.045860556655785936).epsilon(1e-9));
  const PairedTest reversed = paired_t_test_less(b, a);
  CHECK(reversed.p_value == doctest::Approx(1.0 - t.p_value).epsilon(1e-9));
  const std::vector<double> shifted{0, 1, 2, 3};
  CHECK(paired_t_test_less(shifted, a).p_value == 0.0);
  CHECK(paired_t_test_less(a, a).p_value == 1.0);
  CHECK_THROWS_AS(paired_t_test_less(std::vector<double>{1.0}, std::vector<double>{2.0}), InvalidInput);
}

TEST_CASE("grid layout runs over x fastest from the bottom row") {
  const Matrix g = grid_points(4, {});
  REQUIRE(g.rows() == 16);
  CHECK(g(0, 0) == 0.125);
  CHECK(g(0, 1) == 0.125);
  CHECK(g(1, 0) == 0.375);
  CHECK(g(4, 1) == 0.375);
  const Matrix sub = grid_points(2, {0.0, 0.5, 0.0, 0.5});
  CHECK(sub(3, 0) == 0.375);
  CHECK_THROWS_AS(grid_points(0, {}), InvalidInput);
  CHECK_THROWS_AS(grid_points(3, {0.5, 0.5, 0.0, 1.0}), InvalidInput);
}

TEST_CASE("surface grids and region overlap") {
  const auto left_minus = [](const auto& x) { return x(0) < 0.5 ? kNegative : kPositive; };
  const auto low_minus = [](const auto& x) { return x(1) < 0.25 ? kNegative : kPositive; };
  const SurfaceGrid a = surface_grid(left_minus, 2, 8);
  const SurfaceGrid b = surface_grid(low_minus, 2, 8);
  CHECK(a.plus_fraction() == 0.5);
  CHECK(b.minus_fraction() == 0.25);
  CHECK(a.labels(0, 0) == kNegative);
  CHECK(a.labels(0, 7) == kPositive);
  // 8 shared cells out of 32 + 16 - 8.
  CHECK(minus_region_jaccard(a, b) == doctest::Approx(8.0 / 40.0));
  CHECK(minus_region_jaccard(a, a) == 1.0);
  const SurfaceGrid plus = surface_grid(constant_classifier(kPositive), 2, 8);
  CHECK(minus_region_jaccard(plus, plus) == 1.0);
  CHECK_THROWS_AS(surface_grid(left_minus, 3, 8), InvalidInput);
  CHECK_THROWS_AS(minus_region_jaccard(a, surface_grid(left_minus, 2, 4)), InvalidInput);
}

TEST_CASE("pure-noise disagreement is the minus fraction") {
  const Matrix x = lhs_midpoints(200, 2, 1);
  const LabeledDataset d = label_dataset(x, LabelModel::pure_noise(0.8), NoiseSpec::exact_count(40, 2));
  const OneNearestNeighbor nn(d);
  const SurfaceGrid g = surface_grid(as_classifier(nn), 2, 50);
  const double dis = bayes_disagreement(as_classifier(nn), LabelModel::pure_noise(0.8), grid_points(50, {}));
  CHECK(dis == doctest::Approx(1.0 - g.plus_fraction()).epsilon(1e-15));
}

TEST_CASE("interpolators disagree with the Bayes rule exactly on the flipped points") {
  const Matrix x = lhs_midpoints(300, 2, 3);
  const LabelModel truth = LabelModel::pure_noise(0.8);
  const LabeledDataset d = label_dataset(x, truth, NoiseSpec::exact_count(60, 4));
  const double flips = 60.0 / 300.0;
  CHECK(bayes_disagreement(as_classifier(OneNearestNeighbor(d)), truth, x) == doctest::Approx(flips));
  const ForestModel forest = forest_fit(d, ForestConfig{.n_trees = 51, .seed = 5});
  REQUIRE(is_interpolating(as_classifier(forest), d));
  CHECK(bayes_disagreement(as_classifier(forest), truth, x) == doctest::Approx(flips));
}

TEST_CASE("expected error includes the Bayes error") {
  const LabelModel circle = LabelModel::circle();
  const Matrix g = grid_points(100, {});
  const LabelVector bayes = classify(bayes_classifier(circle), g);
  CHECK(expected_error(bayes, circle, g) == doctest::Approx(0.1).epsilon(1e-12));
  const LabelVector all_plus = LabelVector::Ones(g.rows());
  const double inside = 1.0 - static_cast<double>((bayes.array() == kPositive).count()) / static_cast<double>(g.rows());
  CHECK(expected_error(all_plus, circle, g) == doctest::Approx(0.1 + 0.8 * inside));
  CHECK(label_error(bayes, bayes) == 0.0);
  CHECK(label_error(all_plus, bayes) == doctest::Approx(inside));
}

TEST_CASE("classification does not depend on the worker count") {
  std::mt19937_64 gen(6);
  const LabeledDataset d = oracle::random_continuous_dataset(gen, 100, 2);
  const OneNearestNeighbor nn(d);
  const Matrix g = grid_points(70, {});
  CHECK(classify(as_classifier(nn), g, 1) == classify(as_classifier(nn), g, 4));
}

TEST_CASE("iteration schedule") {
  const auto s = iteration_schedule(250);
  CHECK(s.size() == 115);
  CHECK(s[99] == 100);
  CHECK(s[100] == 110);
  CHECK(s.back() == 250);
  const auto t = iteration_schedule(105);
  CHECK(t.back() == 105);
  CHECK(t[t.size() - 2] == 100);
  CHECK(iteration_schedule(1000).size() == 190);
  CHECK(iteration_schedule(1) == std::vector<int>{1});
}

TEST_CASE("prefix curves match direct prefix classifiers") {
  const Matrix x = lhs_midpoints(300, 3, 7);
  const LabelModel truth = LabelModel::pure_noise(0.8);
  const LabeledDataset d = label_dataset(x, truth, NoiseSpec::exact_count(60, 8));
  const BoostModel model = adaboost_fit(d, BoostConfig{.iterations = 30});
  const Matrix probe = iid_uniform(400, 3, 9);
  const std::vector<int> schedule{1, 2, 5, 17, 30};
  const Curve c = prefix_disagreement_curve(model, truth, probe, schedule, 2);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    CHECK(c.values[k] == bayes_disagreement(as_classifier(model, schedule[k]), truth, probe));
  }
  const std::vector<int> bad{3, 2};
  CHECK_THROWS_AS(prefix_disagreement_curve(model, truth, probe, bad), InvalidInput);
  const std::vector<int> beyond{31};
  CHECK_THROWS_AS(prefix_disagreement_curve(model, truth, probe, beyond), InvalidInput);

  const StagePredictions g = stage_predictions(model, probe, 3);
  for (Index i = 0; i < 20; ++i) {
    for (int m = 0; m < model.size(); ++m) CHECK(g(i, m) == model.stage(m).tree.predict(probe.row(i)));
  }
}

TEST_CASE("decomposition curves match block classifiers") {
  const Matrix x = lhs_midpoints(300, 3, 10);
  const LabelModel truth = LabelModel::pure_noise(0.8);
  const LabeledDataset d = label_dataset(x, truth, NoiseSpec::exact_count(60, 11));
  const BoostModel model = adaboost_fit(d, BoostConfig{.iterations = 60});
  const Matrix probe = iid_uniform(300, 3, 12);
  const DecompositionCurves dc = decomposition_curves(model, 20, truth, probe, d);
  REQUIRE(dc.blocks() == 3);
  for (int j = 0; j < 3; ++j) {
    for (int k : {1, 7, 20}) {
      const BlockClassifier h(model, j + 1, k, 20);
      CHECK(dc.disagreement(j, k - 1) == bayes_disagreement(as_classifier(h), truth, probe));
    }
    const BlockClassifier full(model, j + 1, 20, 20);
    LabelVector pred = classify(as_classifier(full), x);
    CHECK(dc.block_training_error[static_cast<std::size_t>(j)] == label_error(pred, d.labels()));
    CHECK(dc.block_interpolates(j) == is_interpolating(as_classifier(full), d));
  }
  CHECK_THROWS_AS(decomposition_curves(model, 7, truth, probe, d), InvalidInput);
}
