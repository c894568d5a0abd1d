#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "ensemble/harness.hpp"
#include "ensemble/svg.hpp"

using namespace ens;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ensemble-harness-test" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("config documents") {
  const ExperimentConfig c = parse_config(Json{{"version", 1}, {"preset", "noise2d"}, {"seed", 7}, {"n", 50}, {"noise", "exact:10"}});
  CHECK(c.preset == "noise2d");
  CHECK(c.seed == 7);
  CHECK(c.jobs == 1);
  CHECK_FALSE(c.paper_scale);
  const PresetParams p = resolve_params(c);
  CHECK(p.n == 50);
  CHECK(p.noise == "exact:10");
  CHECK(p.d == 2);
  const Json round = config_to_json(c);
  CHECK(round["n"] == 50);
  CHECK(parse_config(round).seed == 7);
}

TEST_CASE("bad config documents are rejected") {
  CHECK_THROWS_AS(parse_config(Json{{"preset", "noise2d"}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json{{"version", 2}, {"preset", "noise2d"}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json{{"version", 1}, {"preset", "noise2d"}, {"bogus", 1}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json{{"version", 1}, {"preset", "nope"}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json{{"version", 1}, {"preset", "noise2d"}, {"n", "many"}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json{{"version", 1}, {"preset", "noise2d"}, {"n", 0}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json{{"version", 1}, {"preset", "noise2d"}, {"jobs", 0}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json{{"version", 1}, {"preset", "noise2d"}, {"noise", "flip"}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json{{"version", 1}, {"preset", "noise2d"}, {"neighbor_distance", -1.0}}), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json::array()), InvalidInput);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), InvalidInput);
}

TEST_CASE("preset defaults") {
  CHECK(preset_names().size() == 9);
  for (const auto& name : preset_names()) CHECK(is_preset(name));
  CHECK_FALSE(is_preset("noise3d"));
  CHECK(preset_defaults("noise2d", false).n == 400);
  CHECK(preset_defaults("noise2d", false).trees == 500);
  CHECK(preset_defaults("circle", false).n == 1000);
  CHECK(preset_defaults("circle", false).noise == "model");
  CHECK(preset_defaults("noise20d", false).iterations == 300);
  CHECK(preset_defaults("noise20d", true).iterations == 1000);
  CHECK(preset_defaults("noise20d", true).holdout == 10000);
  CHECK(preset_defaults("signal5d", true).repetitions == 200);
  CHECK(preset_defaults("stumps5d", false).iterations == 250);
  CHECK_THROWS_AS(preset_defaults("bogus", false), InvalidInput);
  const Json j = params_to_json(preset_defaults("noise20d", false));
  CHECK(j["d"] == 20);
  CHECK(j["m_try"].is_null());
}

TEST_CASE("output root resolution") {
  CHECK(resolve_output_root(std::filesystem::path("explicit")) == "explicit");
  ::setenv("ENSEMBLE_OUTPUT_DIR", "/tmp/from-env", 1);
  CHECK(resolve_output_root(std::nullopt) == "/tmp/from-env");
  ::setenv("ENSEMBLE_OUTPUT_DIR", "", 1);
  CHECK(resolve_output_root(std::nullopt) == "runs");
  ::unsetenv("ENSEMBLE_OUTPUT_DIR");
  CHECK(resolve_output_root(std::nullopt) == "runs");
}

TEST_CASE("sha256 reference digests") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("CSV writer enforces the column count") {
  CsvWriter w({"a", "b"});
  w.cell("x").cell(0.5).end_row();
  w.cell(3).cell(true).end_row();
  CHECK(w.str() == "a,b\nx,0.5\n3,true\n");
  CHECK_THROWS_AS(w.end_row(), std::logic_error);
  w.cell(1).cell(2);
  CHECK_THROWS_AS(w.cell(3), std::logic_error);
}

TEST_CASE("interpolation iteration") {
  CHECK(interpolation_iteration({0.1, 0.0, 0.1, 0.0, 0.0}) == 4);
  CHECK(interpolation_iteration({0.1}) == std::nullopt);
  CHECK(interpolation_iteration({0.0}) == 1);
  CHECK(interpolation_iteration({0.0, 0.0, 0.0}) == 1);
  CHECK(interpolation_iteration({0.2, 0.1, 0.0, 0.05}) == std::nullopt);
  CHECK(interpolation_iteration({}) == std::nullopt);
}

TEST_CASE("a run writes a manifest whose hashes match the files") {
  const auto root = scratch("run");
  ExperimentConfig c = parse_config(Json{{"version", 1}, {"preset", "theorem-a"}, {"theorem_n_max", 6}});
  c.output_dir = root;
  const RunResult r = run_experiment(c);
  CHECK(r.passed);
  CHECK(r.directory == root / "theorem-a");
  CHECK(r.summary["violations"] == 0);
  const Json manifest = Json::parse(read_text_file(r.directory / "manifest.json"));
  CHECK(manifest["config"]["preset"] == "theorem-a");
  CHECK_FALSE(manifest["config"].contains("jobs"));
  CHECK_FALSE(manifest["config"].contains("output_dir"));
  CHECK(manifest["config"]["params"]["theorem_n_max"] == 6);
  REQUIRE(manifest["files"].size() >= 2);
  bool has_summary = false;
  for (const auto& f : manifest["files"]) {
    const std::string text = read_text_file(r.directory / f["path"].get<std::string>());
    CHECK(f["bytes"] == text.size());
    CHECK(f["sha256"] == sha256_hex(text));
    has_summary = has_summary || f["path"] == "summary.json";
  }
  CHECK(has_summary);
  CHECK(Json::parse(read_text_file(r.directory / "summary.json")) == r.summary);
}

TEST_CASE("artifact writer records each file") {
  ArtifactWriter w(scratch("writer"));
  w.write("a/b.txt", "abc");
  w.write_json("c.json", Json{{"k", 1}});
  REQUIRE(w.entries().size() == 2);
  CHECK(w.entries()[0].path == "a/b.txt");
  CHECK(w.entries()[0].bytes == 3);
  CHECK(w.entries()[0].sha256 == sha256_hex("abc"));
  w.write_manifest(Json{{"preset", "x"}});
  CHECK(std::filesystem::exists(w.root() / "manifest.json"));
}

TEST_CASE("surface and curve figures") {
  Matrix x(2, 2);
  x << 0.1, 0.1, 0.9, 0.9;
  LabelVector y(2);
  y << -1, 1;
  const LabeledDataset d(x, y);
  const SurfaceGrid g = surface_grid([](const auto& p) { return p(0) < 0.5 ? kNegative : kPositive; }, 2, 10);
  const std::string svg = render_surface_svg(g, &d, "left half");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(count(svg, "<circle") == 2);
  CHECK(svg.find(SvgPalette::kMinusRegion) != std::string::npos);
  CHECK(svg.find(SvgPalette::kPlusRegion) != std::string::npos);
  CHECK(svg.find("left half") != std::string::npos);
  CHECK(count(render_surface_svg(g), "<circle") == 0);

  const std::string curves = render_curves_svg({{"a", "#000000", {1, 2, 3}, {0.1, 0.2, 0.1}}, {"b", "#FF0000", {1, 3}, {0.3, 0.3}}},
                                               "t", "iteration", "value");
  CHECK(count(curves, "<polyline") == 2);
  CHECK(curves.find("iteration") != std::string::npos);
}
