// Command-line front end: primitive steps (gen, train, eval, decompose,
// theorem, render) and the named experiment presets (run).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ensemble/analysis.hpp"
#include "ensemble/baselines.hpp"
#include "ensemble/boosting.hpp"
#include "ensemble/forest.hpp"
#include "ensemble/generators.hpp"
#include "ensemble/harness.hpp"
#include "ensemble/rng.hpp"
#include "ensemble/serialization.hpp"
#include "ensemble/svg.hpp"
#include "ensemble/vote_theory.hpp"

namespace {

using namespace ens;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

Bounds parse_bounds(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw InvalidInput("bounds must be x0,x1,y0,y1");
  return {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])};
}

Matrix load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path);
  return read_points_csv(in);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

template <typename F>
void with_classifier(const AnyModel& model, std::optional<int> prefix, F&& body) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BoostModel>) {
          body(as_classifier(m, prefix), m.input_dim());
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          body(as_classifier(m, prefix), m.input_dim());
        } else if constexpr (std::is_same_v<T, OneNearestNeighbor>) {
          body(as_classifier(m), m.data().dim());
        } else {
          body(as_classifier(m), m.input_dim());
        }
      },
      model);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble classifiers, interpolation experiments and exact vote-theory checks"};
  app.require_subcommand(1);

  // gen ---------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a labeled design (or unlabeled holdout points)");
  std::string gen_design = "lhs", gen_model = "pure_noise:0.8", gen_flips = "model", gen_out = "-";
  long long gen_n = 400, gen_d = 2;
  std::uint64_t gen_seed = 1;
  bool gen_unlabeled = false;
  gen->add_option("--design", gen_design, "lhs or iid")->check(CLI::IsMember({"lhs", "iid"}));
  gen->add_option("--n", gen_n, "number of points")->check(CLI::PositiveNumber);
  gen->add_option("--d", gen_d, "dimension")->check(CLI::PositiveNumber);
  gen->add_option("--model", gen_model, "pure_noise:P, circle[:cx,cy,r,pin,pout] or additive5d[:base,jump]");
  gen->add_option("--flips", gen_flips, "model, bernoulli:P or exact:K");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_flag("--unlabeled", gen_unlabeled, "write points only");
  gen->add_option("--out", gen_out, "output CSV ('-' for stdout)");

  // train -------------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Fit a classifier to a dataset CSV");
  std::string tr_algo = "adaboost", tr_data, tr_out = "model.json", tr_trace;
  int tr_depth = 8, tr_iters = 100, tr_trees = 500, tr_mtry = 0, tr_folds = 10, tr_jobs = 1;
  std::uint64_t tr_seed = 1;
  train->add_option("--algo", tr_algo, "adaboost, forest, onenn, cart or tree")
      ->check(CLI::IsMember({"adaboost", "forest", "onenn", "cart", "tree"}));
  train->add_option("--data", tr_data, "training CSV")->required();
  train->add_option("--depth", tr_depth, "maximum tree depth (adaboost, tree)")->check(CLI::PositiveNumber);
  train->add_option("--iters", tr_iters, "boosting iterations")->check(CLI::PositiveNumber);
  train->add_option("--trees", tr_trees, "forest size")->check(CLI::PositiveNumber);
  train->add_option("--m-try", tr_mtry, "features per split (forest; 0 = ceil(sqrt d))");
  train->add_option("--folds", tr_folds, "CV folds (cart)");
  train->add_option("--seed", tr_seed, "seed");
  train->add_option("--jobs", tr_jobs, "threads")->check(CLI::PositiveNumber);
  train->add_option("--trace", tr_trace, "per-iteration CSV (adaboost)");
  train->add_option("--out", tr_out, "model JSON");

  // eval --------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Evaluate a model: grid plus-fraction, Bayes disagreement, training error");
  std::string ev_model, ev_points, ev_truth, ev_data, ev_out = "-", ev_curve;
  int ev_grid = 0, ev_prefix = 0, ev_jobs = 1;
  eval->add_option("--model", ev_model, "model JSON")->required();
  eval->add_option("--grid", ev_grid, "grid resolution for planar models");
  eval->add_option("--points", ev_points, "holdout points CSV");
  eval->add_option("--truth", ev_truth, "label model for Bayes disagreement");
  eval->add_option("--data", ev_data, "training CSV for training error / interpolation");
  eval->add_option("--prefix", ev_prefix, "use only the first stages / trees");
  eval->add_option("--curve", ev_curve, "per-iteration disagreement CSV (boosted models, needs --points and --truth)");
  eval->add_option("--jobs", ev_jobs, "threads")->check(CLI::PositiveNumber);
  eval->add_option("--out", ev_out, "report JSON");

  // decompose ---------------------------------------------------------------
  auto* dec = app.add_subcommand("decompose", "Block decomposition curves of a boosted model");
  std::string dc_model, dc_points, dc_truth, dc_data, dc_out = "-";
  int dc_block = 100, dc_jobs = 1;
  dec->add_option("--model", dc_model, "boosted model JSON")->required();
  dec->add_option("--block", dc_block, "block size")->check(CLI::PositiveNumber);
  dec->add_option("--points", dc_points, "holdout points CSV")->required();
  dec->add_option("--truth", dc_truth, "label model")->required();
  dec->add_option("--data", dc_data, "training CSV")->required();
  dec->add_option("--jobs", dc_jobs, "threads")->check(CLI::PositiveNumber);
  dec->add_option("--out", dc_out, "curves CSV");

  // theorem -----------------------------------------------------------------
  auto* thm = app.add_subcommand("theorem", "Exact weighted-majority probabilities");
  int th_nmax = 10;
  std::string th_p = "3/5,3/4,9/10", th_z, th_out;
  thm->add_option("--n-max", th_nmax, "largest n to enumerate");
  thm->add_option("--p", th_p, "comma-separated probabilities (decimals or ratios)");
  thm->add_option("--z", th_z, "single weight vector, e.g. 1,1,1");
  thm->add_option("--out", th_out, "report CSV");

  // render ------------------------------------------------------------------
  auto* ren = app.add_subcommand("render", "Render a planar decision surface to SVG");
  std::string rn_model, rn_data, rn_out = "surface.svg", rn_bounds = "0,1,0,1", rn_title;
  int rn_grid = 400, rn_prefix = 0, rn_jobs = 1;
  ren->add_option("--model", rn_model, "model JSON")->required();
  ren->add_option("--grid", rn_grid, "resolution")->check(CLI::PositiveNumber);
  ren->add_option("--data", rn_data, "training CSV to overlay");
  ren->add_option("--bounds", rn_bounds, "x0,x1,y0,y1");
  ren->add_option("--prefix", rn_prefix, "use only the first stages / trees");
  ren->add_option("--title", rn_title, "figure title");
  ren->add_option("--jobs", rn_jobs, "threads")->check(CLI::PositiveNumber);
  ren->add_option("--out", rn_out, "SVG path");

  // run ---------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run a named experiment preset");
  std::string rp_name, rp_config, rp_out;
  std::uint64_t rp_seed = 20240601;
  int rp_jobs = 1;
  bool rp_paper = false, rp_list = false;
  std::vector<std::string> rp_set;
  run->add_option("preset", rp_name, "preset name");
  run->add_option("--config", rp_config, "experiment config JSON (flags override it)");
  run->add_option("--seed", rp_seed, "master seed");
  run->add_option("--jobs", rp_jobs, "threads; results do not depend on it")->check(CLI::PositiveNumber);
  run->add_flag("--paper-scale", rp_paper, "full-size runs");
  run->add_option("--set", rp_set, "parameter override key=value (repeatable)");
  run->add_option("--out", rp_out, "output root (default $ENSEMBLE_OUTPUT_DIR or ./runs)");
  run->add_flag("--list", rp_list, "list presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const LabelModel model = LabelModel::parse(gen_model);
      const DesignSpec spec{gen_n, gen_d, gen_design == "lhs" ? DesignScheme::LhsMidpoint : DesignScheme::IidUniform,
                            gen_seed};
      const Matrix x = generate_design(spec);
      std::ostringstream ss;
      if (gen_unlabeled) {
        write_points_csv(x, ss);
      } else {
        write_dataset_csv(label_dataset(x, model, NoiseSpec::parse(gen_flips, gen_seed)), ss);
      }
      emit(gen_out, ss.str());
      return 0;
    }

    if (train->parsed()) {
      const LabeledDataset data = load_dataset(tr_data);
      AnyModel model;
      if (tr_algo == "adaboost") {
        BoostConfig c;
        c.iterations = tr_iters;
        c.tree.max_depth = tr_depth;
        c.seed = tr_seed;
        CsvWriter trace({"iteration", "raw_error", "alpha", "training_error"});
        model = adaboost_fit(data, c, [&](const BoostRound& r) {
          trace.cell(r.iteration).cell(r.raw_error).cell(r.alpha).cell(r.training_error).end_row();
        });
        if (!tr_trace.empty()) write_text_file(tr_trace, trace.str());
      } else if (tr_algo == "forest") {
        ForestConfig c;
        c.n_trees = tr_trees;
        if (tr_mtry > 0) c.tree.m_try = tr_mtry;
        c.seed = tr_seed;
        model = forest_fit(data, c, tr_jobs);
      } else if (tr_algo == "onenn") {
        model = one_nn_fit(data);
      } else if (tr_algo == "cart") {
        PruneConfig c;
        c.folds = tr_folds;
        c.seed = tr_seed;
        model = pruned_cart_fit(data, c);
      } else {
        TreeConfig c;
        c.max_depth = tr_depth;
        c.seed = tr_seed;
        model = fit_tree(data, c);
      }
      save_model(model, tr_out);
      return 0;
    }

    if (eval->parsed()) {
      const AnyModel model = load_model(ev_model);
      const std::optional<int> prefix = ev_prefix > 0 ? std::optional<int>(ev_prefix) : std::nullopt;
      Json report{{"classifier_id", model_kind(model) + ":" + ev_model}};
      with_classifier(model, prefix, [&](const auto& clf, Index dim) {
        if (ev_grid > 0) {
          const SurfaceGrid g = surface_grid(clf, dim, ev_grid, {}, ev_jobs);
          report["plus_fraction"] = g.plus_fraction();
          report["grid"] = ev_grid;
        }
        if (!ev_points.empty() && !ev_truth.empty()) {
          const Matrix pts = load_points(ev_points);
          const LabelModel truth = LabelModel::parse(ev_truth);
          const LabelVector y = classify(clf, pts, ev_jobs);
          report["holdout_bayes_disagreement"] = bayes_disagreement(y, truth, pts);
          report["holdout_expected_error"] = expected_error(y, truth, pts);
          report["holdout_plus_fraction"] =
              static_cast<double>((y.array() == kPositive).count()) / static_cast<double>(y.size());
        }
        if (!ev_data.empty()) {
          const LabeledDataset data = load_dataset(ev_data);
          report["training_error"] = label_error(classify(clf, data.features(), ev_jobs), data.labels());
          report["interpolating"] = is_interpolating(clf, data);
        }
      });
      if (!ev_curve.empty()) {
        const auto* boost = std::get_if<BoostModel>(&model);
        if (boost == nullptr || ev_points.empty() || ev_truth.empty()) {
          throw InvalidInput("--curve needs a boosted model, --points and --truth");
        }
        const auto schedule = iteration_schedule(boost->size());
        const Curve c = prefix_disagreement_curve(*boost, LabelModel::parse(ev_truth), load_points(ev_points), schedule, ev_jobs);
        CsvWriter csv({"iteration", "bayes_disagreement"});
        for (std::size_t k = 0; k < c.values.size(); ++k) csv.cell(c.iterations[k]).cell(c.values[k]).end_row();
        write_text_file(ev_curve, csv.str());
      }
      emit(ev_out, report.dump(2) + "\n");
      return 0;
    }

    if (dec->parsed()) {
      const AnyModel model = load_model(dc_model);
      const auto* boost = std::get_if<BoostModel>(&model);
      if (boost == nullptr) throw InvalidInput("decompose needs a boosted model");
      const DecompositionCurves d = decomposition_curves(*boost, dc_block, LabelModel::parse(dc_truth),
                                                         load_points(dc_points), load_dataset(dc_data), dc_jobs);
      CsvWriter csv({"block", "K", "disagreement", "block_interpolates"});
      for (int j = 0; j < d.blocks(); ++j) {
        for (int k = 0; k < dc_block; ++k) {
          csv.cell(j + 1).cell(k + 1).cell(d.disagreement(j, k)).cell(d.block_interpolates(j)).end_row();
        }
      }
      emit(dc_out, csv.str());
      return 0;
    }

    if (thm->parsed()) {
      std::vector<Rational> ps;
      for (const auto& s : split(th_p, ',')) ps.push_back(parse_probability(s));
      if (!th_z.empty()) {
        std::vector<int> z;
        for (const auto& s : split(th_z, ',')) z.push_back(std::stoi(s));
        CsvWriter csv({"z", "p", "probability", "probability_decimal", "dp_decimal"});
        for (const auto& p : ps) {
          const VoteInstance inst{z, p};
          const Rational exact = majority_probability(inst);
          csv.cell(th_z).cell(to_string(p)).cell(to_string(exact)).cell(to_double(exact)).cell(majority_probability_dp(inst));
          csv.end_row();
        }
        emit(th_out, csv.str());
        return 0;
      }
      const TheoremReport report = verify_theorem_a(th_nmax, {}, ps);
      if (!th_out.empty()) {
        CsvWriter csv({"n", "M", "p", "z", "probability", "margin_over_p"});
        for (const auto& c : report.cases) {
          std::string zs;
          for (std::size_t i = 0; i < c.z.size(); ++i) zs += (i ? " " : "") + std::to_string(c.z[i]);
          csv.cell(c.n).cell(c.M).cell(to_string(c.p)).cell(zs).cell(to_string(c.probability));
          csv.cell(to_double(c.probability - c.p)).end_row();
        }
        write_text_file(th_out, csv.str());
      }
      std::cout << (report.passed() ? "PASS" : "FAIL") << ": " << report.cases.size() << " weight vectors, "
                << report.violations.size() << " violations\n";
      return report.passed() ? 0 : 1;
    }

    if (ren->parsed()) {
      const AnyModel model = load_model(rn_model);
      const std::optional<int> prefix = rn_prefix > 0 ? std::optional<int>(rn_prefix) : std::nullopt;
      std::optional<LabeledDataset> data;
      if (!rn_data.empty()) data = load_dataset(rn_data);
      with_classifier(model, prefix, [&](const auto& clf, Index dim) {
        const SurfaceGrid g = surface_grid(clf, dim, rn_grid, parse_bounds(rn_bounds), rn_jobs);
        write_text_file(rn_out, render_surface_svg(g, data ? &*data : nullptr, rn_title));
        std::cout << "plus_fraction " << format_double(g.plus_fraction()) << "\n";
      });
      return 0;
    }

    if (run->parsed()) {
      if (rp_list) {
        for (const auto& n : preset_names()) std::cout << n << "\n";
        return 0;
      }
      Json doc = rp_config.empty() ? Json{{"version", kConfigVersion}} : Json::parse(read_text_file(rp_config));
      if (!rp_name.empty()) doc["preset"] = rp_name;
      if (run->count("--seed") || !doc.contains("seed")) doc["seed"] = rp_seed;
      if (run->count("--jobs") || !doc.contains("jobs")) doc["jobs"] = rp_jobs;
      if (rp_paper) doc["paper_scale"] = true;
      if (!rp_out.empty()) doc["output_dir"] = rp_out;
      for (const auto& kv : rp_set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InvalidInput("--set expects key=value, got '" + kv + "'");
        const std::string value = kv.substr(eq + 1);
        Json parsed;
        try {
          parsed = Json::parse(value);
        } catch (const nlohmann::json::exception&) {
          parsed = value;
        }
        doc[kv.substr(0, eq)] = parsed;
      }
      if (!doc.contains("preset")) throw InvalidInput("no preset given (try --list)");
      const ExperimentConfig config = parse_config(doc);
      const RunResult result = run_experiment(config);
      std::cout << result.preset << ": " << result.headline << "\n" << "artifacts in " << result.directory.string() << "\n";
      return result.passed ? 0 : 1;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
