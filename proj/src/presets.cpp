#include "presets.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ensemble/analysis.hpp"
#include "ensemble/baselines.hpp"
#include "ensemble/boosting.hpp"
#include "ensemble/forest.hpp"
#include "ensemble/rng.hpp"
#include "ensemble/svg.hpp"
#include "ensemble/vote_theory.hpp"

namespace ens::detail {

namespace {

std::uint64_t trial_seed(std::uint64_t master, int t) {
  return t == 0 ? master : derive_seed(master, static_cast<std::uint64_t>(t));
}

struct Scenario {
  LabelModel model;
  LabeledDataset train;
};

Scenario make_scenario(const PresetParams& p, std::uint64_t seed) {
  LabelModel model = LabelModel::parse(p.label_model);
  const Matrix x = generate_design(DesignSpec{p.n, p.d, p.design, seed});
  LabeledDataset data = label_dataset(x, model, NoiseSpec::parse(p.noise, seed));
  return {std::move(model), std::move(data)};
}

Matrix make_holdout(const PresetParams& p, std::uint64_t seed) {
  return iid_uniform(p.holdout, p.d, derive_seed(seed, "holdout"));
}

struct BoostRun {
  BoostModel model;
  std::vector<double> training_error;
  std::vector<double> raw_error;
  std::vector<double> alpha;
  std::optional<int> interpolated_at;
};

BoostRun run_boost(const LabeledDataset& data, int iterations, int depth, std::uint64_t seed) {
  BoostConfig c;
  c.iterations = iterations;
  c.tree.max_depth = depth;
  c.seed = derive_seed(seed, "boost");
  BoostRun r;
  r.model = adaboost_fit(data, c, [&](const BoostRound& round) {
    r.training_error.push_back(round.training_error);
    r.raw_error.push_back(round.raw_error);
    r.alpha.push_back(round.alpha);
  });
  r.interpolated_at = interpolation_iteration(r.training_error);
  return r;
}

ForestModel run_forest(const LabeledDataset& data, const PresetParams& p, std::uint64_t seed, int jobs) {
  ForestConfig c;
  c.n_trees = p.trees;
  c.tree.m_try = p.m_try;
  c.seed = derive_seed(seed, "forest");
  return forest_fit(data, c, jobs);
}

Json optional_json(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

std::string boost_trace_csv(const BoostRun& r) {
  CsvWriter csv({"iteration", "raw_error", "alpha", "training_error"});
  for (std::size_t m = 0; m < r.alpha.size(); ++m) {
    csv.cell(static_cast<int>(m + 1)).cell(r.raw_error[m]).cell(r.alpha[m]).cell(r.training_error[m]);
    csv.end_row();
  }
  return csv.str();
}

std::string dataset_text(const LabeledDataset& d) {
  std::ostringstream ss;
  write_dataset_csv(d, ss);
  return ss.str();
}

void save_models(const PresetContext& ctx, const std::vector<std::pair<std::string, AnyModel>>& models) {
  if (!ctx.params.write_models) return;
  for (const auto& [name, model] : models) ctx.out.write("models/" + name + ".json", model_to_json(model).dump() + "\n");
}

std::vector<int> merged_schedule(int iterations, std::initializer_list<std::optional<int>> extra) {
  std::vector<int> s = iteration_schedule(iterations);
  for (const auto& e : extra) {
    if (e && *e >= 1 && *e <= iterations) s.push_back(*e);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double value_at(const Curve& c, int iteration) {
  const auto it = std::find(c.iterations.begin(), c.iterations.end(), iteration);
  if (it == c.iterations.end()) throw std::logic_error("iteration missing from curve");
  return c.values[static_cast<std::size_t>(it - c.iterations.begin())];
}

std::pair<int, double> curve_peak(const Curve& c) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < c.values.size(); ++k) {
    if (c.values[k] > c.values[best]) best = k;
  }
  return {c.iterations[best], c.values[best]};
}

std::pair<int, double> curve_minimum(const std::vector<int>& iterations, const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] < values[best]) best = k;
  }
  return {iterations[best], values[best]};
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------

struct Noise2dFit {
  Scenario s;
  OneNearestNeighbor onenn;
  BoostRun ada;
  ForestModel forest;
};

Noise2dFit fit_noise2d(const PresetParams& p, std::uint64_t seed, int jobs) {
  Scenario s = make_scenario(p, seed);
  OneNearestNeighbor nn(s.train);
  BoostRun ada = run_boost(s.train, p.iterations, p.depth, seed);
  ForestModel forest = run_forest(s.train, p, seed, jobs);
  return {std::move(s), std::move(nn), std::move(ada), std::move(forest)};
}

Json run_noise2d(const PresetContext& ctx, RunResult& result) {
  const PresetParams& p = ctx.params;
  const Noise2dFit f = fit_noise2d(p, ctx.seed, ctx.jobs);
  const int r = p.grid;
  const SurfaceGrid g_nn = surface_grid(as_classifier(f.onenn), p.d, r, {}, ctx.jobs);
  const SurfaceGrid g_ada = surface_grid(as_classifier(f.ada.model), p.d, r, {}, ctx.jobs);
  const SurfaceGrid g_rf = surface_grid(as_classifier(f.forest), p.d, r, {}, ctx.jobs);
  const Matrix cells = grid_points(r, {});

  ctx.out.write("train.csv", dataset_text(f.s.train));
  ctx.out.write("surface_onenn.svg", render_surface_svg(g_nn, &f.s.train, "one-NN"));
  ctx.out.write("surface_adaboost.svg", render_surface_svg(g_ada, &f.s.train, "AdaBoost"));
  ctx.out.write("surface_forest.svg", render_surface_svg(g_rf, &f.s.train, "random forest"));
  ctx.out.write("boost_trace.csv", boost_trace_csv(f.ada));

  struct Row {
    std::string id;
    const SurfaceGrid* grid;
    bool interpolates;
    double training_error;
  };
  const LabelVector nn_train = classify(as_classifier(f.onenn), f.s.train.features(), ctx.jobs);
  const LabelVector ada_train = classify(as_classifier(f.ada.model), f.s.train.features(), ctx.jobs);
  const LabelVector rf_train = classify(as_classifier(f.forest), f.s.train.features(), ctx.jobs);
  const std::vector<Row> rows{
      {"onenn", &g_nn, nn_train == f.s.train.labels(), label_error(nn_train, f.s.train.labels())},
      {"adaboost", &g_ada, ada_train == f.s.train.labels(), label_error(ada_train, f.s.train.labels())},
      {"forest", &g_rf, rf_train == f.s.train.labels(), label_error(rf_train, f.s.train.labels())}};

  Json summary;
  CsvWriter csv({"classifier", "plus_fraction", "bayes_disagreement", "training_error", "interpolates"});
  for (const auto& row : rows) {
    LabelVector flat(static_cast<Index>(r) * r);
    for (int iy = 0; iy < r; ++iy) {
      for (int ix = 0; ix < r; ++ix) flat(iy * r + ix) = row.grid->labels(iy, ix);
    }
    const double disagreement = bayes_disagreement(flat, f.s.model, cells);
    csv.cell(row.id).cell(row.grid->plus_fraction()).cell(disagreement).cell(row.training_error).cell(row.interpolates);
    csv.end_row();
    summary["plus_fraction"][row.id] = row.grid->plus_fraction();
    summary["bayes_disagreement"][row.id] = disagreement;
    summary["interpolates"][row.id] = row.interpolates;
  }
  ctx.out.write("plus_fraction.csv", csv.str());
  summary["adaboost_interpolation_iteration"] = optional_json(f.ada.interpolated_at);

  CsvWriter overlap({"pair", "minus_jaccard"});
  overlap.cell("adaboost-forest").cell(minus_region_jaccard(g_ada, g_rf)).end_row();
  overlap.cell("onenn-adaboost").cell(minus_region_jaccard(g_nn, g_ada)).end_row();
  overlap.cell("onenn-forest").cell(minus_region_jaccard(g_nn, g_rf)).end_row();
  ctx.out.write("overlap.csv", overlap.str());
  summary["minus_jaccard"]["adaboost-forest"] = minus_region_jaccard(g_ada, g_rf);
  summary["minus_jaccard"]["onenn-forest"] = minus_region_jaccard(g_nn, g_rf);

  CsvWriter trials({"trial", "seed", "onenn", "adaboost", "forest", "adaboost_interpolation_iteration", "ordered"});
  Json trial_list = Json::array();
  int ordered = 0;
  for (int t = 0; t < p.trials; ++t) {
    const std::uint64_t seed = trial_seed(ctx.seed, t);
    const Noise2dFit tf = t == 0 ? f : fit_noise2d(p, seed, ctx.jobs);
    const double a = surface_grid(as_classifier(tf.onenn), p.d, p.trial_grid, {}, ctx.jobs).plus_fraction();
    const double b = surface_grid(as_classifier(tf.ada.model), p.d, p.trial_grid, {}, ctx.jobs).plus_fraction();
    const double c = surface_grid(as_classifier(tf.forest), p.d, p.trial_grid, {}, ctx.jobs).plus_fraction();
    const bool in_order = a < b && b < c;
    ordered += in_order;
    trials.cell(t).cell(std::to_string(seed)).cell(a).cell(b).cell(c);
    trials.cell(tf.ada.interpolated_at ? std::to_string(*tf.ada.interpolated_at) : std::string("none")).cell(in_order);
    trials.end_row();
    trial_list.push_back(Json{{"seed", seed},
                              {"onenn", a},
                              {"adaboost", b},
                              {"forest", c},
                              {"adaboost_interpolation_iteration", optional_json(tf.ada.interpolated_at)}});
  }
  ctx.out.write("trials.csv", trials.str());
  summary["trials"] = trial_list;
  summary["ordered_trials"] = ordered;
  save_models(ctx, {{"onenn", f.onenn}, {"adaboost", f.ada.model}, {"forest", f.forest}});

  result.headline = "plus fraction one-NN " + fixed(g_nn.plus_fraction()) + ", AdaBoost " +
                    fixed(g_ada.plus_fraction()) + ", forest " + fixed(g_rf.plus_fraction()) + "; ordered in " +
                    std::to_string(ordered) + "/" + std::to_string(p.trials) + " trials";
  return summary;
}

// ---------------------------------------------------------------------------

Json run_rf_votes(const PresetContext& ctx, RunResult& result) {
  const PresetParams& p = ctx.params;
  const Scenario s = make_scenario(p, ctx.seed);
  const ForestModel forest = run_forest(s.train, p, ctx.seed, ctx.jobs);
  const Bounds square{0.0, 0.5, 0.0, 0.5};
  CsvWriter csv({"classifier", "minus_fraction"});
  std::vector<double> areas;
  Json summary;
  for (int b = 0; b < forest.size(); ++b) {
    const DecisionTree& tree = forest.trees()[static_cast<std::size_t>(b)];
    const SurfaceGrid g = surface_grid(as_classifier(tree), p.d, p.grid, square, ctx.jobs);
    areas.push_back(g.minus_fraction());
    const std::string id = "tree_" + std::to_string(b + 1);
    csv.cell(id).cell(g.minus_fraction()).end_row();
    ctx.out.write(id + ".svg", render_surface_svg(g, &s.train, "tree " + std::to_string(b + 1)));
  }
  const SurfaceGrid vote = surface_grid(as_classifier(forest), p.d, p.grid, square, ctx.jobs);
  csv.cell("vote").cell(vote.minus_fraction()).end_row();
  ctx.out.write("vote.svg", render_surface_svg(vote, &s.train, "majority vote"));
  ctx.out.write("areas.csv", csv.str());
  ctx.out.write("train.csv", dataset_text(s.train));

  std::vector<double> sorted = areas;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = sorted.size();
  const double median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
  summary["tree_minus_fraction"] = areas;
  summary["median_tree_minus_fraction"] = median;
  summary["vote_minus_fraction"] = vote.minus_fraction();
  summary["vote_at_most_median"] = vote.minus_fraction() <= median;
  save_models(ctx, {{"forest", forest}});
  result.headline = "vote -1 area " + fixed(vote.minus_fraction()) + " vs median tree " + fixed(median);
  return summary;
}

// ---------------------------------------------------------------------------

struct CircleFit {
  Scenario s;
  OneNearestNeighbor onenn;
  BoostRun ada;
  ForestModel forest;
  PrunedCart cart;
};

CircleFit fit_circle(const PresetParams& p, std::uint64_t seed, int jobs) {
  Scenario s = make_scenario(p, seed);
  OneNearestNeighbor nn(s.train);
  BoostRun ada = run_boost(s.train, p.iterations, p.depth, seed);
  ForestModel forest = run_forest(s.train, p, seed, jobs);
  PruneConfig pc;
  pc.seed = derive_seed(seed, "cart");
  PrunedCart cart = pruned_cart_fit_detailed(s.train, pc);
  return {std::move(s), std::move(nn), std::move(ada), std::move(forest), std::move(cart)};
}

struct CircleErrors {
  double onenn, adaboost, forest, cart, bayes;
};

CircleErrors circle_errors(const CircleFit& f, int resolution, int jobs, std::vector<SurfaceGrid>* grids = nullptr) {
  const Matrix cells = grid_points(resolution, {});
  auto err = [&](const auto& clf) {
    const LabelVector y = classify(clf, cells, jobs);
    if (grids) {
      SurfaceGrid g{resolution, {}, Eigen::MatrixXi(resolution, resolution)};
      for (int iy = 0; iy < resolution; ++iy) {
        for (int ix = 0; ix < resolution; ++ix) g.labels(iy, ix) = y(iy * resolution + ix);
      }
      grids->push_back(std::move(g));
    }
    return expected_error(y, f.s.model, cells);
  };
  CircleErrors e{};
  e.onenn = err(as_classifier(f.onenn));
  e.adaboost = err(as_classifier(f.ada.model));
  e.forest = err(as_classifier(f.forest));
  e.cart = err(as_classifier(f.cart.tree));
  e.bayes = err(bayes_classifier(f.s.model));
  return e;
}

bool ensembles_win(const CircleErrors& e) {
  return e.adaboost < e.onenn && e.adaboost < e.cart && e.forest < e.onenn && e.forest < e.cart;
}

Json run_circle(const PresetContext& ctx, RunResult& result) {
  const PresetParams& p = ctx.params;
  const CircleFit f = fit_circle(p, ctx.seed, ctx.jobs);
  std::vector<SurfaceGrid> grids;
  const CircleErrors e = circle_errors(f, p.grid, ctx.jobs, &grids);
  const std::vector<std::string> ids{"onenn", "adaboost", "forest", "cart", "bayes"};
  const std::vector<double> errs{e.onenn, e.adaboost, e.forest, e.cart, e.bayes};
  Json summary;
  CsvWriter csv({"classifier", "expected_error", "plus_fraction"});
  for (std::size_t k = 0; k < ids.size(); ++k) {
    csv.cell(ids[k]).cell(errs[k]).cell(grids[k].plus_fraction()).end_row();
    summary["expected_error"][ids[k]] = errs[k];
    ctx.out.write("surface_" + ids[k] + ".svg", render_surface_svg(grids[k], k < 4 ? &f.s.train : nullptr, ids[k]));
  }
  ctx.out.write("errors.csv", csv.str());
  ctx.out.write("train.csv", dataset_text(f.s.train));
  ctx.out.write("boost_trace.csv", boost_trace_csv(f.ada));
  CsvWriter cart({"alpha", "cv_error"});
  for (std::size_t k = 0; k < f.cart.candidates.size(); ++k) cart.cell(f.cart.candidates[k]).cell(f.cart.cv_error[k]).end_row();
  ctx.out.write("cart_path.csv", cart.str());
  summary["cart_leaves"] = f.cart.tree.leaf_count();
  summary["cart_alpha"] = f.cart.alpha;
  summary["bayes_error"] = f.s.model.bayes_error();

  CsvWriter trials({"trial", "seed", "onenn", "adaboost", "forest", "cart", "ensembles_win"});
  Json trial_list = Json::array();
  int wins = 0;
  for (int t = 0; t < p.trials; ++t) {
    const std::uint64_t seed = trial_seed(ctx.seed, t);
    const CircleFit tf = t == 0 ? f : fit_circle(p, seed, ctx.jobs);
    const CircleErrors te = circle_errors(tf, p.trial_grid, ctx.jobs);
    const bool win = ensembles_win(te);
    wins += win;
    trials.cell(t).cell(std::to_string(seed)).cell(te.onenn).cell(te.adaboost).cell(te.forest).cell(te.cart).cell(win);
    trials.end_row();
    trial_list.push_back(
        Json{{"seed", seed}, {"onenn", te.onenn}, {"adaboost", te.adaboost}, {"forest", te.forest}, {"cart", te.cart}});
  }
  ctx.out.write("trials.csv", trials.str());
  summary["trials"] = trial_list;
  summary["ensemble_win_trials"] = wins;
  save_models(ctx, {{"adaboost", f.ada.model}, {"forest", f.forest}, {"cart", f.cart.tree}});
  result.headline = "error AdaBoost " + fixed(e.adaboost) + ", forest " + fixed(e.forest) + ", one-NN " +
                    fixed(e.onenn) + ", CART " + fixed(e.cart) + "; ensembles win " + std::to_string(wins) + "/" +
                    std::to_string(p.trials);
  return summary;
}

// ---------------------------------------------------------------------------

Json run_noise20d(const PresetContext& ctx, RunResult& result) {
  const PresetParams& p = ctx.params;
  const Scenario s = make_scenario(p, ctx.seed);
  const BoostRun ada = run_boost(s.train, p.iterations, p.depth, ctx.seed);
  const Matrix holdout = make_holdout(p, ctx.seed);
  const std::vector<int> schedule = merged_schedule(p.iterations, {ada.interpolated_at});
  const Curve curve = prefix_disagreement_curve(ada.model, s.model, holdout, schedule, ctx.jobs);
  const double onenn = bayes_disagreement(as_classifier(OneNearestNeighbor(s.train)), s.model, holdout, ctx.jobs);

  CsvWriter csv({"iteration", "training_error", "holdout_minus_fraction", "holdout_plus_fraction"});
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const int m = schedule[k];
    csv.cell(m).cell(ada.training_error[static_cast<std::size_t>(m) - 1]).cell(curve.values[k]).cell(1.0 - curve.values[k]);
    csv.end_row();
  }
  ctx.out.write("curve.csv", csv.str());
  ctx.out.write("boost_trace.csv", boost_trace_csv(ada));

  const auto [peak_at, peak] = curve_peak(curve);
  Json summary;
  summary["interpolation_iteration"] = optional_json(ada.interpolated_at);
  summary["peak_iteration"] = peak_at;
  summary["peak_disagreement"] = peak;
  summary["final_disagreement"] = curve.values.back();
  summary["disagreement_at_interpolation"] =
      ada.interpolated_at ? Json(value_at(curve, *ada.interpolated_at)) : Json(nullptr);
  summary["onenn_disagreement"] = onenn;
  summary["training_flip_fraction"] =
      static_cast<double>(s.train.count_label(kNegative)) / static_cast<double>(s.train.size());

  std::vector<CurveSeries> series{
      {"AdaBoost", "#000000", std::vector<double>(curve.iterations.begin(), curve.iterations.end()), curve.values},
      {"one-NN", "#0000FF", {1.0, static_cast<double>(p.iterations)}, {onenn, onenn}}};
  if (p.trees > 0) {
    const ForestModel forest = run_forest(s.train, p, ctx.seed, ctx.jobs);
    const double rf = bayes_disagreement(as_classifier(forest), s.model, holdout, ctx.jobs);
    summary["forest_disagreement"] = rf;
    summary["forest_interpolates"] = is_interpolating(as_classifier(forest), s.train);
    series.push_back({"random forest", "#008000", {1.0, static_cast<double>(p.iterations)}, {rf, rf}});
  }
  ctx.out.write("curve.svg", render_curves_svg(series, "holdout disagreement with the Bayes rule", "iteration",
                                               "fraction classified -1"));
  save_models(ctx, {{"adaboost", ada.model}});
  result.headline = "peak " + fixed(peak) + " at " + std::to_string(peak_at) + ", final " + fixed(curve.values.back()) +
                    ", interpolates at " +
                    (ada.interpolated_at ? std::to_string(*ada.interpolated_at) : std::string("never"));
  return summary;
}

Json run_decompose20d(const PresetContext& ctx, RunResult& result) {
  const PresetParams& p = ctx.params;
  const Scenario s = make_scenario(p, ctx.seed);
  const BoostRun ada = run_boost(s.train, p.iterations, p.depth, ctx.seed);
  const Matrix holdout = make_holdout(p, ctx.seed);
  const DecompositionCurves dc = decomposition_curves(ada.model, p.block_size, s.model, holdout, s.train, ctx.jobs);
  std::vector<int> ends;
  for (int j = 1; j <= dc.blocks(); ++j) ends.push_back(j * p.block_size);
  const Curve full = prefix_disagreement_curve(ada.model, s.model, holdout, ends, ctx.jobs);

  CsvWriter curves({"block", "K", "disagreement"});
  for (int j = 0; j < dc.blocks(); ++j) {
    for (int k = 0; k < p.block_size; ++k) curves.cell(j + 1).cell(k + 1).cell(dc.disagreement(j, k)).end_row();
  }
  ctx.out.write("blocks.csv", curves.str());
  CsvWriter blocks({"block", "first_stage", "last_stage", "training_error", "interpolates", "final_disagreement",
                    "prefix_disagreement"});
  bool all = true;
  Json list = Json::array();
  std::vector<CurveSeries> series;
  for (int j = 0; j < dc.blocks(); ++j) {
    const bool interp = dc.block_interpolates(j);
    all = all && interp;
    blocks.cell(j + 1).cell(j * p.block_size + 1).cell((j + 1) * p.block_size);
    blocks.cell(dc.block_training_error[static_cast<std::size_t>(j)]).cell(interp);
    blocks.cell(dc.disagreement(j, p.block_size - 1)).cell(full.values[static_cast<std::size_t>(j)]).end_row();
    list.push_back(Json{{"block", j + 1},
                        {"training_error", dc.block_training_error[static_cast<std::size_t>(j)]},
                        {"final_disagreement", dc.disagreement(j, p.block_size - 1)}});
    std::vector<double> ks(static_cast<std::size_t>(p.block_size));
    std::iota(ks.begin(), ks.end(), 1.0);
    std::vector<double> vals;
    for (int k = 0; k < p.block_size; ++k) vals.push_back(dc.disagreement(j, k));
    char color[8];
    std::snprintf(color, sizeof color, "#%02X%02X%02X", 40 + 20 * (j % 10), 60, 200 - 15 * (j % 10));
    series.push_back({"block " + std::to_string(j + 1), color, ks, vals});
  }
  ctx.out.write("block_summary.csv", blocks.str());
  ctx.out.write("blocks.svg", render_curves_svg(series, "block classifiers on the holdout", "K", "disagreement"));
  Json summary;
  summary["blocks"] = list;
  summary["all_blocks_interpolate"] = all;
  summary["full_final_disagreement"] = full.values.back();
  summary["interpolation_iteration"] = optional_json(ada.interpolated_at);
  save_models(ctx, {{"adaboost", ada.model}});
  result.headline = std::to_string(dc.blocks()) + " blocks, all interpolate: " + (all ? "yes" : "no") +
                    ", full-model disagreement " + fixed(full.values.back());
  return summary;
}

Json run_localize20d(const PresetContext& ctx, RunResult& result) {
  const PresetParams& p = ctx.params;
  const Scenario s = make_scenario(p, ctx.seed);
  const BoostRun ada = run_boost(s.train, p.iterations, p.depth, ctx.seed);
  const NeighborHoldout nb = neighbor_holdout(s.train, p.neighbor_distance, ctx.seed);
  const std::vector<int> schedule = merged_schedule(p.iterations, {ada.interpolated_at});
  const Curve curve = localization_curve(ada.model, nb.points, s.model, schedule, ctx.jobs);
  const double onenn = nb.points.rows() == 0
                           ? 0.0
                           : bayes_disagreement(as_classifier(OneNearestNeighbor(s.train)), s.model, nb.points, ctx.jobs);
  CsvWriter csv({"iteration", "training_error", "neighbor_disagreement"});
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    csv.cell(schedule[k]).cell(ada.training_error[static_cast<std::size_t>(schedule[k]) - 1]).cell(curve.values[k]).end_row();
  }
  ctx.out.write("localization.csv", csv.str());
  std::ostringstream pts;
  write_points_csv(nb.points, pts);
  ctx.out.write("neighbors.csv", pts.str());
  ctx.out.write("localization.svg",
                render_curves_svg({{"AdaBoost", "#000000",
                                    std::vector<double>(curve.iterations.begin(), curve.iterations.end()), curve.values},
                                   {"one-NN", "#0000FF", {1.0, static_cast<double>(p.iterations)}, {onenn, onenn}}},
                                  "disagreement near noise points", "iteration", "fraction classified -1"));
  Json summary;
  summary["neighbors"] = nb.points.rows();
  summary["redraws"] = nb.redraws;
  summary["interpolation_iteration"] = optional_json(ada.interpolated_at);
  summary["disagreement_at_interpolation"] =
      ada.interpolated_at && !curve.values.empty() ? Json(value_at(curve, *ada.interpolated_at)) : Json(nullptr);
  summary["final_disagreement"] = curve.values.empty() ? Json(nullptr) : Json(curve.values.back());
  summary["onenn_disagreement"] = onenn;
  result.headline = "neighbor disagreement " +
                    (ada.interpolated_at ? fixed(value_at(curve, *ada.interpolated_at)) + " at interpolation, "
                                         : std::string()) +
                    fixed(curve.values.back()) + " at the end; one-NN " + fixed(onenn);
  return summary;
}

// ---------------------------------------------------------------------------

Json run_signal5d(const PresetContext& ctx, RunResult& result) {
  const PresetParams& p = ctx.params;
  if (p.iterations % p.block_size != 0) throw InvalidInput("iterations must be a multiple of block_size");
  std::vector<double> first_block;
  std::vector<double> full;
  std::vector<double> onenn;
  CsvWriter reps({"repetition", "seed", "first_block", "full", "onenn", "interpolation_iteration",
                  "blocks_interpolating", "in_sample_disagreement", "flip_fraction"});
  for (int r = 0; r < p.repetitions; ++r) {
    const std::uint64_t seed = trial_seed(ctx.seed, r);
    const Scenario s = make_scenario(p, seed);
    const BoostRun ada = run_boost(s.train, p.iterations, p.depth, seed);
    const Matrix holdout = make_holdout(p, seed);
    const DecompositionCurves dc = decomposition_curves(ada.model, p.block_size, s.model, holdout, s.train, ctx.jobs);
    const std::array<int, 1> last{p.iterations};
    const double f = prefix_disagreement_curve(ada.model, s.model, holdout, last, ctx.jobs).values[0];
    const double a = dc.disagreement(0, p.block_size - 1);
    const double nn = bayes_disagreement(as_classifier(OneNearestNeighbor(s.train)), s.model, holdout, ctx.jobs);
    int interpolating = 0;
    for (int j = 0; j < dc.blocks(); ++j) interpolating += dc.block_interpolates(j);
    const LabelVector bayes_train = bayes_labels(s.model, s.train.features());
    const double flips = label_error(s.train.labels(), bayes_train);
    const double in_sample =
        label_error(classify(as_classifier(ada.model), s.train.features(), ctx.jobs), bayes_train);
    first_block.push_back(a);
    full.push_back(f);
    onenn.push_back(nn);
    reps.cell(r).cell(std::to_string(seed)).cell(a).cell(f).cell(nn);
    reps.cell(ada.interpolated_at ? std::to_string(*ada.interpolated_at) : std::string("none"));
    reps.cell(interpolating).cell(in_sample).cell(flips).end_row();
    if (r == 0) {
      CsvWriter curves({"block", "K", "disagreement"});
      for (int j = 0; j < dc.blocks(); ++j) {
        for (int k = 0; k < p.block_size; ++k) curves.cell(j + 1).cell(k + 1).cell(dc.disagreement(j, k)).end_row();
      }
      ctx.out.write("decomposition.csv", curves.str());
      ctx.out.write("train.csv", dataset_text(s.train));
      save_models(ctx, {{"adaboost", ada.model}});
    }
  }
  ctx.out.write("repetitions.csv", reps.str());

  const PairedTest t_full = paired_t_test_less(full, first_block);
  const PairedTest t_nn_first = paired_t_test_less(first_block, onenn);
  const PairedTest t_nn_full = paired_t_test_less(full, onenn);
  CsvWriter tests({"hypothesis", "mean_a", "mean_b", "t_statistic", "p_value"});
  tests.cell("full < first_block").cell(mean(full)).cell(mean(first_block)).cell(t_full.t_statistic).cell(t_full.p_value).end_row();
  tests.cell("first_block < onenn").cell(mean(first_block)).cell(mean(onenn)).cell(t_nn_first.t_statistic).cell(t_nn_first.p_value).end_row();
  tests.cell("full < onenn").cell(mean(full)).cell(mean(onenn)).cell(t_nn_full.t_statistic).cell(t_nn_full.p_value).end_row();
  ctx.out.write("tests.csv", tests.str());

  Json summary;
  summary["repetitions"] = p.repetitions;
  summary["mean_first_block"] = mean(first_block);
  summary["mean_full"] = mean(full);
  summary["mean_onenn"] = mean(onenn);
  summary["p_full_below_first_block"] = t_full.p_value;
  summary["p_first_block_below_onenn"] = t_nn_first.p_value;
  summary["p_full_below_onenn"] = t_nn_full.p_value;
  summary["first_repetition"] = Json{{"first_block", first_block[0]}, {"full", full[0]}};
  result.headline = "mean disagreement after " + std::to_string(p.block_size) + " " + fixed(mean(first_block)) +
                    ", after " + std::to_string(p.iterations) + " " + fixed(mean(full)) + ", one-NN " +
                    fixed(mean(onenn));
  return summary;
}

Json run_stumps5d(const PresetContext& ctx, RunResult& result) {
  const PresetParams& p = ctx.params;
  const std::vector<int> schedule = iteration_schedule(p.iterations);
  std::vector<double> stump_mean(schedule.size(), 0.0);
  std::vector<double> deep_mean(schedule.size(), 0.0);
  CsvWriter trials({"trial", "seed", "stump_final", "deep_final", "deep_better", "stump_argmin"});
  Json list = Json::array();
  int deep_better = 0;
  const int count = std::max(p.trials, 1);
  for (int t = 0; t < count; ++t) {
    const std::uint64_t seed = trial_seed(ctx.seed, t);
    const Scenario s = make_scenario(p, seed);
    const Matrix holdout = make_holdout(p, seed);
    const BoostRun stump = run_boost(s.train, p.iterations, 1, seed);
    const BoostRun deep = run_boost(s.train, p.iterations, p.depth, seed);
    const Curve cs = prefix_disagreement_curve(stump.model, s.model, holdout, schedule, ctx.jobs);
    const Curve cd = prefix_disagreement_curve(deep.model, s.model, holdout, schedule, ctx.jobs);
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      stump_mean[k] += cs.values[k] / count;
      deep_mean[k] += cd.values[k] / count;
    }
    const bool better = cd.values.back() < cs.values.back();
    deep_better += better;
    const int argmin = curve_minimum(cs.iterations, cs.values).first;
    trials.cell(t).cell(std::to_string(seed)).cell(cs.values.back()).cell(cd.values.back()).cell(better).cell(argmin).end_row();
    list.push_back(Json{{"seed", seed}, {"stump_final", cs.values.back()}, {"deep_final", cd.values.back()}, {"stump_argmin", argmin}});
    if (t == 0) {
      CsvWriter curves({"iteration", "stump", "deep"});
      for (std::size_t k = 0; k < schedule.size(); ++k) curves.cell(schedule[k]).cell(cs.values[k]).cell(cd.values[k]).end_row();
      ctx.out.write("curves.csv", curves.str());
    }
  }
  ctx.out.write("trials.csv", trials.str());
  CsvWriter mean_csv({"iteration", "stump", "deep"});
  for (std::size_t k = 0; k < schedule.size(); ++k) mean_csv.cell(schedule[k]).cell(stump_mean[k]).cell(deep_mean[k]).end_row();
  ctx.out.write("mean_curves.csv", mean_csv.str());
  const std::vector<double> xs(schedule.begin(), schedule.end());
  ctx.out.write("curves.svg", render_curves_svg({{"stumps", "#C00000", xs, stump_mean}, {"depth " + std::to_string(p.depth), "#000000", xs, deep_mean}},
                                                "mean holdout disagreement", "iteration", "disagreement"));
  const auto [argmin, minimum] = curve_minimum(schedule, stump_mean);
  Json summary;
  summary["trials"] = list;
  summary["deep_better_trials"] = deep_better;
  summary["trial_count"] = count;
  summary["mean_stump_argmin"] = argmin;
  summary["mean_stump_minimum"] = minimum;
  summary["mean_stump_final"] = stump_mean.back();
  summary["mean_deep_final"] = deep_mean.back();
  result.headline = "at " + std::to_string(p.iterations) + " iterations stumps " + fixed(stump_mean.back()) + " vs depth " +
                    std::to_string(p.depth) + " " + fixed(deep_mean.back()) + "; deep better in " +
                    std::to_string(deep_better) + "/" + std::to_string(count) + "; stump minimum at " + std::to_string(argmin);
  return summary;
}

// ---------------------------------------------------------------------------

std::string join(const std::vector<int>& z) {
  std::string s;
  for (std::size_t i = 0; i < z.size(); ++i) s += (i ? " " : "") + std::to_string(z[i]);
  return s;
}

Json run_theorem_a(const PresetContext& ctx, RunResult& result) {
  const PresetParams& p = ctx.params;
  std::vector<Rational> ps;
  for (const auto& text : p.theorem_p) ps.push_back(parse_probability(text));
  const TheoremReport report = verify_theorem_a(p.theorem_n_max, {}, ps);

  CsvWriter csv({"n", "M", "p", "z", "probability", "probability_decimal", "margin_over_p", "multiplicity", "equality"});
  for (const auto& c : report.cases) {
    csv.cell(c.n).cell(c.M).cell(to_string(c.p)).cell(join(c.z)).cell(to_string(c.probability));
    csv.cell(to_double(c.probability)).cell(to_double(c.probability - c.p)).cell(static_cast<long long>(c.multiplicity));
    csv.cell(c.equality()).end_row();
  }
  ctx.out.write("theorem_a.csv", csv.str());
  CsvWriter sum({"n", "M", "p", "min_z", "min_probability", "max_z", "max_probability", "equality_cases",
                 "degenerate_attains_min"});
  for (const auto& s : report.summaries) {
    sum.cell(s.n).cell(s.M).cell(to_string(s.p)).cell(join(s.min_case.z)).cell(to_string(s.min_case.probability));
    sum.cell(join(s.max_case.z)).cell(to_string(s.max_case.probability)).cell(s.equality_cases).cell(s.degenerate_attains_min);
    sum.end_row();
  }
  ctx.out.write("theorem_a_summary.csv", sum.str());

  // Every admissible mass shift for small n.
  CsvWriter shifts({"p", "z", "z_shifted", "pr_a", "pr_a_shifted", "b1", "b2", "inequality", "sizes_equal", "membership"});
  int shift_failures = 0;
  int shift_count = 0;
  Json counterexamples = Json::array();
  const int shift_n = std::min(p.theorem_n_max, 7);
  for (const Rational& prob : ps) {
    for (int n = 2; n <= shift_n; ++n) {
      for (int m = 1; m <= n; m += 2) {
        for (int head = 1; head <= m; ++head) {
          const auto tails = n == 2 ? std::vector<std::vector<int>>(m == head ? 1 : 0)
                                    : weight_partitions(m - head, n - 2);
          for (const auto& tail : tails) {
            std::vector<int> z{head, 0};
            z.insert(z.end(), tail.begin(), tail.end());
            for (int beta = 0; 2 * beta <= head; ++beta) {
              const MassShift ms = mass_shift_check(z, head - beta, beta, prob);
              shift_failures += !(ms.sizes_equal() && ms.membership_ok);
              if (!ms.inequality_holds()) {
                counterexamples.push_back({{"p", to_string(prob)}, {"z", ms.z}, {"z_shifted", ms.z_shifted},
                                           {"pr_a", to_string(ms.pr_a)}, {"pr_a_shifted", to_string(ms.pr_a_shifted)}});
              }
              ++shift_count;
              shifts.cell(to_string(prob)).cell(join(ms.z)).cell(join(ms.z_shifted)).cell(to_string(ms.pr_a));
              shifts.cell(to_string(ms.pr_a_shifted)).cell(static_cast<long long>(ms.b1_size));
              shifts.cell(static_cast<long long>(ms.b2_size)).cell(ms.inequality_holds()).cell(ms.sizes_equal());
              shifts.cell(ms.membership_ok).end_row();
            }
          }
        }
      }
    }
  }
  ctx.out.write("mass_shift.csv", shifts.str());

  int equalities = 0;
  for (const auto& s : report.summaries) equalities += s.equality_cases;
  result.passed = report.passed() && shift_failures == 0;
  const std::size_t decreases = counterexamples.size();
  Json summary;
  summary["cases"] = report.cases.size();
  summary["compositions_covered"] = report.compositions_covered;
  summary["violations"] = report.violations.size();
  summary["asymmetric_cases"] = report.asymmetric_cases;
  summary["equality_cases"] = equalities;
  summary["degenerate_attains_min"] = std::all_of(report.summaries.begin(), report.summaries.end(),
                                                  [](const TheoremSummary& s) { return s.degenerate_attains_min; });
  summary["mass_shifts"] = shift_count;
  summary["mass_shift_failures"] = shift_failures;
  // Shifts that lower the probability; the theorem's bound still holds on both sides.
  summary["mass_shift_decreases"] = counterexamples;
  summary["passed"] = result.passed;
  result.headline = std::string(result.passed ? "PASS" : "FAIL") + ": " + std::to_string(report.cases.size()) +
                    " weight vectors, " + std::to_string(report.violations.size()) + " violations, " +
                    std::to_string(equalities) + " equality cases, " + std::to_string(shift_count) + " mass shifts (" + std::to_string(decreases) + " decrease)";
  return summary;
}

}  // namespace

Json dispatch_preset(const std::string& name, const PresetContext& ctx, RunResult& result) {
  if (name == "noise2d") return run_noise2d(ctx, result);
  if (name == "rf-votes") return run_rf_votes(ctx, result);
  if (name == "circle") return run_circle(ctx, result);
  if (name == "noise20d") return run_noise20d(ctx, result);
  if (name == "decompose20d") return run_decompose20d(ctx, result);
  if (name == "localize20d") return run_localize20d(ctx, result);
  if (name == "signal5d") return run_signal5d(ctx, result);
  if (name == "stumps5d") return run_stumps5d(ctx, result);
  if (name == "theorem-a") return run_theorem_a(ctx, result);
  throw InvalidInput("unknown preset '" + name + "'");
}

}  // namespace ens::detail
