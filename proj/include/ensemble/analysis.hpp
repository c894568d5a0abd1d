#pragma once

#include <concepts>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensemble/baselines.hpp"
#include "ensemble/boosting.hpp"
#include "ensemble/data_model.hpp"
#include "ensemble/parallel.hpp"

namespace ens {

/// Anything that labels a single point.
template <typename F>
concept PointClassifier = requires(const F& f, const Point& x) {
  { f(x) } -> std::convertible_to<Label>;
};

inline auto as_classifier(const DecisionTree& m) {
  return [&m](const auto& x) { return m.predict(x); };
}
inline auto as_classifier(const BoostModel& m, std::optional<int> prefix = std::nullopt) {
  return [&m, prefix](const auto& x) { return predict_boost(m, x, prefix); };
}
inline auto as_classifier(const ForestModel& m, std::optional<int> count = std::nullopt) {
  return [&m, count](const auto& x) { return m.vote(x, count).label; };
}
inline auto as_classifier(const OneNearestNeighbor& m) {
  return [&m](const auto& x) { return m.predict(x); };
}
inline auto as_classifier(const BlockClassifier& m) {
  return [m](const auto& x) { return m.predict(x); };
}
inline auto bayes_classifier(const LabelModel& m) {
  return [m](const auto& x) { return m.bayes_label(x); };
}
inline auto constant_classifier(Label y) {
  return [y](const auto&) { return y; };
}

/// Labels every row; rows are split into contiguous chunks across `jobs` threads.
template <PointClassifier F>
LabelVector classify(const F& f, const Matrix& points, int jobs = 1) {
  LabelVector out(points.rows());
  constexpr Index kChunk = 1024;
  const Index chunks = (points.rows() + kChunk - 1) / kChunk;
  parallel_for(static_cast<std::size_t>(chunks), jobs, [&](std::size_t c) {
    const Index begin = static_cast<Index>(c) * kChunk;
    const Index end = std::min(points.rows(), begin + kChunk);
    for (Index i = begin; i < end; ++i) out(i) = f(points.row(i));
  });
  return out;
}

template <PointClassifier F>
bool is_interpolating(const F& f, const LabeledDataset& data) {
  for (Index i = 0; i < data.size(); ++i) {
    if (f(data.row(i)) != data.label(i)) return false;
  }
  return true;
}

/// Fraction of rows whose label differs from the data label.
double label_error(const LabelVector& predicted, const LabelVector& truth);

/// Fraction of points where the predicted label differs from the Bayes rule.
double bayes_disagreement(const LabelVector& predicted, const LabelModel& model, const Matrix& points);

template <PointClassifier F>
double bayes_disagreement(const F& f, const LabelModel& model, const Matrix& points, int jobs = 1) {
  if (points.rows() < 1) throw InvalidInput("bayes_disagreement needs at least one point");
  return bayes_disagreement(classify(f, points, jobs), model, points);
}

/// Mean of P(y != f(x) | x): the population error including the Bayes error.
double expected_error(const LabelVector& predicted, const LabelModel& model, const Matrix& points);

struct Bounds {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;
};

/// Labels at the centers of an r x r grid; labels(iy, ix) with iy = 0 the bottom row.
struct SurfaceGrid {
  int resolution = 0;
  Bounds bounds;
  Eigen::MatrixXi labels;

  double plus_fraction() const;
  double minus_fraction() const { return 1.0 - plus_fraction(); }
};

/// Cell centers in row-major order (ix fastest), as an (r*r) x 2 matrix.
Matrix grid_points(int resolution, const Bounds& bounds);

template <PointClassifier F>
SurfaceGrid surface_grid(const F& f, Index input_dim, int resolution, const Bounds& bounds = {}, int jobs = 1) {
  if (input_dim != 2) throw InvalidInput("surface grids are only defined for planar classifiers");
  if (resolution < 1) throw InvalidInput("grid resolution must be positive");
  const LabelVector flat = classify(f, grid_points(resolution, bounds), jobs);
  SurfaceGrid g{resolution, bounds, Eigen::MatrixXi(resolution, resolution)};
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) g.labels(iy, ix) = flat(iy * resolution + ix);
  }
  return g;
}

/// Jaccard index of the -1 regions of two grids over the same cells.
double minus_region_jaccard(const SurfaceGrid& a, const SurfaceGrid& b);

/// G_m(x) for every point (rows) and stage (columns).
using StagePredictions = Eigen::Matrix<signed char, Eigen::Dynamic, Eigen::Dynamic>;
StagePredictions stage_predictions(const BoostModel& model, const Matrix& points, int jobs = 1);

/// Every iteration up to 100, then every 10th, always ending at M.
std::vector<int> iteration_schedule(int iterations);

struct Curve {
  std::vector<int> iterations;
  std::vector<double> values;
};

/// Bayes disagreement of sign(f_m) on `points` for each m in the schedule.
Curve prefix_disagreement_curve(const BoostModel& model, const LabelModel& truth, const Matrix& points,
                                std::span<const int> schedule, int jobs = 1);

/// The same curve for the neighbor holdout built around the -1 training points.
inline Curve localization_curve(const BoostModel& model, const Matrix& neighbor_points, const LabelModel& truth,
                                std::span<const int> schedule, int jobs = 1) {
  return prefix_disagreement_curve(model, truth, neighbor_points, schedule, jobs);
}

struct DecompositionCurves {
  int block_size = 0;
  /// disagreement(j, K-1): holdout Bayes disagreement of block j+1 truncated to K stages.
  Eigen::MatrixXd disagreement;
  /// training error of each full block.
  std::vector<double> block_training_error;

  int blocks() const { return static_cast<int>(disagreement.rows()); }
  bool block_interpolates(int j) const { return block_training_error.at(static_cast<std::size_t>(j)) == 0.0; }
};

/// Splits f_M into M / block_size consecutive blocks and evaluates every
/// partial block sum h_K^j on the holdout.
DecompositionCurves decomposition_curves(const BoostModel& model, int block_size, const LabelModel& truth,
                                         const Matrix& holdout, const LabeledDataset& training, int jobs = 1);

struct RateFormulas {
  double local_rate = 0.0;         // (1-p) n / n^d
  double onenn_rate = 0.0;         // 2p(1-p)
  double stump_lower_bound = 0.0;  // (1-p)^d (1-1/d)^d
};

RateFormulas rate_formulas(double p, long long n, int d);

struct PairedTest {
  double mean_difference = 0.0;  // mean(a - b)
  double t_statistic = 0.0;
  double p_value = 1.0;          // one-sided, H1: mean(a) < mean(b)
};

/// One-sided paired t-test of H1: E[a] < E[b].
PairedTest paired_t_test_less(std::span<const double> a, std::span<const double> b);

struct EvaluationReport {
  std::string classifier_id;
  double holdout_bayes_disagreement = 0.0;
  double training_error = 0.0;
  std::optional<double> plus_fraction;
  std::optional<double> expected_error;
};

}  // namespace ens
