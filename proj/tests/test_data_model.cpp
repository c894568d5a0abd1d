#include <doctest.h>

#include <random>

#include "ensemble/data_model.hpp"
#include "oracles.hpp"

using namespace ens;

namespace {

LabeledDataset tiny() {
  Matrix x(3, 2);
  x << 0.1, 0.2, 0.5, 0.5, 0.9, 0.3;
  LabelVector y(3);
  y << 1, -1, 1;
  return {x, y};
}

}  // namespace

TEST_CASE("sign ties go to +1") {
  CHECK(sign_label(0.0) == kPositive);
  CHECK(sign_label(-0.0) == kPositive);
  CHECK(sign_label(-1e-300) == kNegative);
  CHECK(sign_label(2.5) == kPositive);
}

TEST_CASE("dataset validation") {
  Matrix x(2, 1);
  x << 0.1, 0.2;
  LabelVector bad(2);
  bad << 1, 0;
  CHECK_THROWS_AS(LabeledDataset(x, bad), InvalidInput);
  LabelVector short_labels(1);
  short_labels << 1;
  CHECK_THROWS_AS(LabeledDataset(x, short_labels), InvalidInput);
  LabelVector y(2);
  y << 1, -1;
  CHECK_THROWS_AS(LabeledDataset(x, y, Vector::Zero(2)), InvalidInput);
  Vector neg(2);
  neg << 1.0, -0.5;
  CHECK_THROWS_AS(LabeledDataset(x, y, neg), InvalidInput);
  CHECK_THROWS_AS(LabeledDataset(Matrix(0, 1), LabelVector(0)), InvalidInput);
  Matrix nan = x;
  nan(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(LabeledDataset(nan, y), InvalidInput);
}

TEST_CASE("row selection keeps duplicates and weights") {
  const LabeledDataset d = tiny();
  Vector w(3);
  w << 1.0, 2.0, 3.0;
  const LabeledDataset weighted = d.with_weights(w);
  const std::vector<Index> rows{2, 2, 0};
  const LabeledDataset s = weighted.select_rows(rows);
  REQUIRE(s.size() == 3);
  CHECK(s.row(0)(0) == doctest::Approx(0.9));
  CHECK(s.row(1)(1) == doctest::Approx(0.3));
  CHECK((*s.weights())(0) == 3.0);
  CHECK((*s.weights())(2) == 1.0);
  CHECK(d.count_label(kPositive) == 2);
  CHECK(d.weights_or_uniform().sum() == 3.0);
  const std::vector<Index> out_of_range{3};
  CHECK_THROWS_AS(d.select_rows(out_of_range), InvalidInput);
}

TEST_CASE("tree structure is validated") {
  using Node = DecisionTree::Node;
  Node root;
  root.rule = {0, 0.5};
  root.left = 1;
  root.right = 1;
  Node leaf;
  CHECK_THROWS_AS(DecisionTree({root, leaf}, 1), InvalidInput);
  root.right = 2;
  CHECK_THROWS_AS(DecisionTree({root, leaf}, 1), InvalidInput);
  root.rule.feature = 3;
  CHECK_THROWS_AS(DecisionTree({root, leaf, leaf}, 2), InvalidInput);
  root.rule.feature = 0;
  const DecisionTree t({root, leaf, leaf}, 2);
  CHECK(t.leaf_count() == 2);
  CHECK(t.depth() == 1);
}

TEST_CASE("stump prediction follows the strict left rule") {
  const DecisionTree s = DecisionTree::stump({0, 0.5}, kNegative, kPositive, 1);
  CHECK(s.predict(Point::Constant(1, 0.49)) == kNegative);
  CHECK(s.predict(Point::Constant(1, 0.5)) == kPositive);
  CHECK_THROWS_AS(s.predict(Point::Constant(2, 0.1)), InvalidInput);
  CHECK(DecisionTree::constant(kNegative, 3).predict(Point::Zero(3)) == kNegative);
}

TEST_CASE("boost margins add up over stage ranges") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<BoostStage> stages;
  for (int m = 0; m < 12; ++m) {
    stages.push_back({u(gen), DecisionTree::stump({m % 2, 0.5 + 0.3 * u(gen)}, kNegative, kPositive, 2)});
  }
  const BoostModel model(stages);
  for (int trial = 0; trial < 50; ++trial) {
    Point x(2);
    x << (u(gen) + 1) / 2, (u(gen) + 1) / 2;
    double manual = 0.0;
    for (const auto& s : stages) manual += s.alpha * s.tree.predict(x);
    CHECK(predict_margin(model, x) == doctest::Approx(manual).epsilon(1e-12));
    CHECK(model.range_margin(x, 0, 5) + model.range_margin(x, 5, 12) ==
          doctest::Approx(predict_margin(model, x)).epsilon(1e-12));
    CHECK(predict_boost(model, x, 4) == sign_label(model.range_margin(x, 0, 4)));
  }
  CHECK_THROWS_AS(predict_margin(model, Point::Zero(2), 13), InvalidInput);
  CHECK_THROWS_AS(predict_margin(model, Point::Zero(2), 0), InvalidInput);
  CHECK(model.truncated(3).size() == 3);
}

TEST_CASE("forest vote counts and tie rule") {
  const auto plus = DecisionTree::constant(kPositive, 1);
  const auto minus = DecisionTree::constant(kNegative, 1);
  const std::vector<Index> rows{0, 1};
  const ForestModel three({plus, plus, minus}, {rows, rows, rows}, {1, 2, 3}, 1, 2);
  const VoteResult v = forest_vote(three, Point::Zero(1));
  CHECK(v.label == kPositive);
  CHECK(v.plus == 2);
  CHECK(v.minus == 1);
  const ForestModel tie({plus, minus}, {rows, rows}, {1, 2}, 1, 2);
  CHECK(tie.vote(Point::Zero(1)).label == kPositive);
  CHECK(three.vote(Point::Zero(1), 1).plus == 1);
  CHECK_THROWS_AS(three.vote(Point::Zero(1), 4), InvalidInput);
  CHECK_THROWS_AS(ForestModel({plus}, {{0, 5}}, {1}, 1, 2), InvalidInput);
}

TEST_CASE("label models and their Bayes rules") {
  const LabelModel circle = LabelModel::circle();
  Point center(2);
  center << 0.5, 0.5;
  CHECK(circle.positive_probability(center) == 0.1);
  CHECK(circle.bayes_label(center) == kNegative);
  Point corner(2);
  corner << 0.02, 0.02;
  CHECK(circle.bayes_label(corner) == kPositive);
  CHECK(circle.bayes_error() == doctest::Approx(0.10).epsilon(1e-12));

  const LabelModel noise = LabelModel::pure_noise(0.8);
  CHECK(noise.bayes_error() == doctest::Approx(0.2));
  CHECK(noise.bayes_label(Point::Zero(7)) == kPositive);

  const LabelModel add = LabelModel::parse("additive5d:0.2,0.6");
  Point low = Point::Constant(5, 0.3);
  Point high = Point::Constant(5, 0.6);
  CHECK(add.positive_probability(low) == doctest::Approx(0.2));
  CHECK(add.positive_probability(high) == doctest::Approx(0.8));
  CHECK(add.bayes_error() == doctest::Approx(0.2));

  CHECK(LabelModel::parse(noise.to_string()) == noise);
  CHECK(LabelModel::parse(circle.to_string()) == circle);
  CHECK_THROWS_AS(LabelModel::parse("pure_noise:1.5"), InvalidInput);
  CHECK_THROWS_AS(LabelModel::parse("circle:0.5,0.5,0.7,0.1,0.9"), InvalidInput);
  CHECK_THROWS_AS(LabelModel::parse("spiral"), InvalidInput);
  CHECK_THROWS_AS(LabelModel::parse("pure_noise:x"), InvalidInput);
  CHECK_THROWS_AS(circle.positive_probability(Point::Zero(1)), InvalidInput);
}
