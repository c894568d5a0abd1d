#include <doctest.h>

#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "ensemble/boosting.hpp"
#include "ensemble/forest.hpp"
#include "ensemble/generators.hpp"
#include "ensemble/serialization.hpp"
#include "oracles.hpp"

using namespace ens;

namespace {

template <typename Model>
LabelVector predictions(const Model& m, const Matrix& probe) {
  LabelVector out(probe.rows());
  for (Index i = 0; i < probe.rows(); ++i) {
    if constexpr (std::is_same_v<Model, BoostModel>) {
      out(i) = predict_boost(m, probe.row(i));
    } else if constexpr (std::is_same_v<Model, ForestModel>) {
      out(i) = m.vote(probe.row(i)).label;
    } else {
      out(i) = m.predict(probe.row(i));
    }
  }
  return out;
}

template <typename Model>
void check_round_trip(const Model& model, const std::string& kind, const Matrix& probe) {
  const AnyModel any{model};
  CHECK(model_kind(any) == kind);
  const Json doc = model_to_json(any);
  const AnyModel back = model_from_json(Json::parse(doc.dump()));
  REQUIRE(std::holds_alternative<Model>(back));
  CHECK(model_to_json(back).dump() == doc.dump());
  CHECK(predictions(std::get<Model>(back), probe) == predictions(model, probe));
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ensemble-serialization-test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("every model kind survives a JSON round trip") {
  std::mt19937_64 gen(1);
  const LabeledDataset d = oracle::random_continuous_dataset(gen, 80, 3, 0.7);
  const Matrix probe = iid_uniform(300, 3, 2);
  check_round_trip(fit_tree(d, TreeConfig{}), "tree", probe);
  check_round_trip(adaboost_fit(d, BoostConfig{.iterations = 12, .tree = {.max_depth = 3}}), "boost", probe);
  check_round_trip(forest_fit(d, ForestConfig{.n_trees = 9, .seed = 4}), "forest", probe);
  check_round_trip(OneNearestNeighbor(d), "onenn", probe);
}

TEST_CASE("restored forests keep their bootstrap records") {
  std::mt19937_64 gen(2);
  const LabeledDataset d = oracle::random_continuous_dataset(gen, 40, 2);
  const ForestModel f = forest_fit(d, ForestConfig{.n_trees = 5, .seed = 6});
  const auto back = std::get<ForestModel>(model_from_json(model_to_json(f)));
  CHECK(back.bootstrap_indices() == f.bootstrap_indices());
  CHECK(back.tree_seeds() == f.tree_seeds());
  CHECK(back.m_try() == f.m_try());
  CHECK(back.training_size() == f.training_size());
  for (int b = 0; b < f.size(); ++b) CHECK(back.trees()[static_cast<std::size_t>(b)] == f.trees()[static_cast<std::size_t>(b)]);
}

TEST_CASE("model files on disk") {
  std::mt19937_64 gen(3);
  const LabeledDataset d = oracle::random_continuous_dataset(gen, 50, 2);
  const DecisionTree t = fit_tree(d, TreeConfig{.max_depth = 4});
  const auto path = scratch("tree.json");
  save_model(t, path);
  CHECK(std::get<DecisionTree>(load_model(path)) == t);
  CHECK_THROWS_AS(load_model(scratch("missing.json")), InvalidInput);
}

TEST_CASE("malformed model documents are rejected") {
  const Json good = model_to_json(DecisionTree::stump({0, 0.5}, kNegative, kPositive, 1));
  Json bad_version = good;
  bad_version["version"] = 99;
  CHECK_THROWS_AS(model_from_json(bad_version), InvalidInput);
  Json bad_kind = good;
  bad_kind["kind"] = "svm";
  CHECK_THROWS_AS(model_from_json(bad_kind), InvalidInput);
  CHECK_THROWS_AS(model_from_json(Json::object()), InvalidInput);
  CHECK_THROWS_AS(tree_from_json(Json{{"label", 0}}, 1), InvalidInput);
  CHECK(tree_from_json(tree_to_json(DecisionTree::constant(kNegative, 2)), 2) == DecisionTree::constant(kNegative, 2));
}

TEST_CASE("dataset CSV round trip with and without weights") {
  std::mt19937_64 gen(4);
  const LabeledDataset d = oracle::random_continuous_dataset(gen, 30, 4);
  std::stringstream plain;
  write_dataset_csv(d, plain);
  const LabeledDataset back = read_dataset_csv(plain);
  CHECK(back.features() == d.features());
  CHECK(back.labels() == d.labels());
  CHECK_FALSE(back.has_weights());

  Vector w = Vector::LinSpaced(30, 0.1, 3.0);
  const LabeledDataset weighted = d.with_weights(w);
  std::stringstream ws;
  write_dataset_csv(weighted, ws);
  CHECK(ws.str().substr(0, ws.str().find('\n')) == "x1,x2,x3,x4,label,weight");
  const LabeledDataset wback = read_dataset_csv(ws);
  REQUIRE(wback.has_weights());
  CHECK(*wback.weights() == w);

  const auto path = scratch("data.csv");
  save_dataset(weighted, path);
  CHECK(load_dataset(path).features() == d.features());
}

TEST_CASE("points CSV round trip") {
  const Matrix x = iid_uniform(25, 3, 5);
  std::stringstream ss;
  write_points_csv(x, ss);
  CHECK(read_points_csv(ss) == x);
  std::stringstream labeled("x1,x2,label\n0.1,0.2,1\n");
  CHECK(read_points_csv(labeled).cols() == 2);
}

TEST_CASE("malformed dataset CSV names the offending line") {
  const auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_dataset_csv(in);
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("x1,x2,label\n0.1,0.2,1\n0.3,oops,-1\n").find("line 3") != std::string::npos);
  CHECK(message("x1,label\n0.1,1\n0.2\n").find("line 3") != std::string::npos);
  CHECK(message("x1,label\n0.1,2\n").find("line 2") != std::string::npos);
  CHECK(message("a,b\n1,2\n").find("line 1") != std::string::npos);
  CHECK(message("").find("line 1") != std::string::npos);
  CHECK_FALSE(message("x1,label\n").empty());
  CHECK(message("x1,label\n0.5,1,\n").find("line 2") != std::string::npos);
  CHECK(message("x1,label\n\n0.5,+1\n").empty());
}

TEST_CASE("number formatting round-trips exactly") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.0) == "0");
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = i % 2 ? u(gen) : std::ldexp(u(gen), -40);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("text files create their parent directories") {
  const auto path = scratch("nested/deeper/note.txt");
  std::filesystem::remove_all(path.parent_path());
  write_text_file(path, "hello\n");
  CHECK(read_text_file(path) == "hello\n");
}
