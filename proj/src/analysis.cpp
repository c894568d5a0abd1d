#include "ensemble/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace ens {

double label_error(const LabelVector& predicted, const LabelVector& truth) {
  if (predicted.size() != truth.size() || truth.size() == 0) throw InvalidInput("label vectors must match and be non-empty");
  return static_cast<double>((predicted.array() != truth.array()).count()) / static_cast<double>(truth.size());
}

double bayes_disagreement(const LabelVector& predicted, const LabelModel& model, const Matrix& points) {
  if (predicted.size() != points.rows()) throw InvalidInput("one prediction per point is required");
  if (points.rows() < 1) throw InvalidInput("bayes_disagreement needs at least one point");
  Index differ = 0;
  for (Index i = 0; i < points.rows(); ++i) differ += predicted(i) != model.bayes_label(points.row(i));
  return static_cast<double>(differ) / static_cast<double>(points.rows());
}

double expected_error(const LabelVector& predicted, const LabelModel& model, const Matrix& points) {
  if (predicted.size() != points.rows() || points.rows() < 1) throw InvalidInput("one prediction per point is required");
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    const double p = model.positive_probability(points.row(i));
    total += predicted(i) == kPositive ? 1.0 - p : p;
  }
  return total / static_cast<double>(points.rows());
}

double SurfaceGrid::plus_fraction() const {
  if (labels.size() == 0) return 0.0;
  return static_cast<double>((labels.array() == kPositive).count()) / static_cast<double>(labels.size());
}

Matrix grid_points(int resolution, const Bounds& b) {
  if (resolution < 1) throw InvalidInput("grid resolution must be positive");
  if (!(b.x1 > b.x0) || !(b.y1 > b.y0)) throw InvalidInput("grid bounds must have positive extent");
  const Index r = resolution;
  Matrix pts(r * r, 2);
  for (Index iy = 0; iy < r; ++iy) {
    const double y = b.y0 + (b.y1 - b.y0) * (static_cast<double>(iy) + 0.5) / static_cast<double>(r);
    for (Index ix = 0; ix < r; ++ix) {
      pts(iy * r + ix, 0) = b.x0 + (b.x1 - b.x0) * (static_cast<double>(ix) + 0.5) / static_cast<double>(r);
      pts(iy * r + ix, 1) = y;
    }
  }
  return pts;
}

double minus_region_jaccard(const SurfaceGrid& a, const SurfaceGrid& b) {
  if (a.labels.rows() != b.labels.rows() || a.labels.cols() != b.labels.cols()) {
    throw InvalidInput("grids must have the same resolution");
  }
  const auto ma = a.labels.array() == kNegative;
  const auto mb = b.labels.array() == kNegative;
  const auto both = (ma && mb).count();
  const auto either = (ma || mb).count();
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

StagePredictions stage_predictions(const BoostModel& model, const Matrix& points, int jobs) {
  if (points.cols() != model.input_dim()) throw InvalidInput("points have the wrong dimension for this model");
  StagePredictions out(points.rows(), model.size());
  parallel_for(static_cast<std::size_t>(model.size()), jobs, [&](std::size_t m) {
    const DecisionTree& tree = model.stage(static_cast<int>(m)).tree;
    for (Index i = 0; i < points.rows(); ++i) {
      out(i, static_cast<Index>(m)) = static_cast<signed char>(tree.predict(points.row(i)));
    }
  });
  return out;
}

std::vector<int> iteration_schedule(int iterations) {
  if (iterations < 1) throw InvalidInput("schedule needs at least one iteration");
  std::vector<int> s;
  for (int m = 1; m <= iterations; ++m) {
    if (m <= 100 || m % 10 == 0) s.push_back(m);
  }
  if (s.back() != iterations) s.push_back(iterations);
  return s;
}

namespace {

// Walks the stages in order, folding alpha_m G_m(x) into the running margin
// of every point and reporting at each scheduled prefix.
template <typename Report>
void sweep_prefixes(const BoostModel& model, const StagePredictions& g, int first, int last,
                    std::span<const int> schedule, Report&& report) {
  Vector margin = Vector::Zero(g.rows());
  std::size_t next = 0;
  for (int m = first; m < last; ++m) {
    const double alpha = model.stage(m).alpha;
    for (Index i = 0; i < g.rows(); ++i) margin(i) += alpha * static_cast<double>(g(i, m));
    const int k = m - first + 1;
    while (next < schedule.size() && schedule[next] == k) {
      report(next, margin);
      ++next;
    }
  }
}

void check_schedule(std::span<const int> schedule, int limit) {
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (schedule[k] < 1 || schedule[k] > limit) throw InvalidInput("schedule entry out of range");
    if (k > 0 && schedule[k] <= schedule[k - 1]) throw InvalidInput("schedule must be strictly increasing");
  }
}

}  // namespace

Curve prefix_disagreement_curve(const BoostModel& model, const LabelModel& truth, const Matrix& points,
                                std::span<const int> schedule, int jobs) {
  check_schedule(schedule, model.size());
  Curve c;
  c.iterations.assign(schedule.begin(), schedule.end());
  c.values.assign(schedule.size(), 0.0);
  if (points.rows() == 0) return c;
  const StagePredictions g = stage_predictions(model, points, jobs);
  LabelVector bayes(points.rows());
  for (Index i = 0; i < points.rows(); ++i) bayes(i) = truth.bayes_label(points.row(i));
  sweep_prefixes(model, g, 0, model.size(), schedule, [&](std::size_t k, const Vector& margin) {
    Index differ = 0;
    for (Index i = 0; i < margin.size(); ++i) differ += sign_label(margin(i)) != bayes(i);
    c.values[k] = static_cast<double>(differ) / static_cast<double>(margin.size());
  });
  return c;
}

DecompositionCurves decomposition_curves(const BoostModel& model, int block_size, const LabelModel& truth,
                                         const Matrix& holdout, const LabeledDataset& training, int jobs) {
  if (block_size < 1 || model.size() % block_size != 0) {
    throw InvalidInput("the number of stages must be a positive multiple of the block size");
  }
  if (holdout.rows() < 1) throw InvalidInput("holdout must be non-empty");
  const int blocks = model.size() / block_size;
  std::vector<int> every(static_cast<std::size_t>(block_size));
  std::iota(every.begin(), every.end(), 1);

  DecompositionCurves out;
  out.block_size = block_size;
  out.disagreement.resize(blocks, block_size);
  out.block_training_error.resize(static_cast<std::size_t>(blocks));

  const StagePredictions g = stage_predictions(model, holdout, jobs);
  const StagePredictions gt = stage_predictions(model, training.features(), jobs);
  LabelVector bayes(holdout.rows());
  for (Index i = 0; i < holdout.rows(); ++i) bayes(i) = truth.bayes_label(holdout.row(i));

  for (int j = 0; j < blocks; ++j) {
    const int first = j * block_size;
    sweep_prefixes(model, g, first, first + block_size, every, [&](std::size_t k, const Vector& margin) {
      Index differ = 0;
      for (Index i = 0; i < margin.size(); ++i) differ += sign_label(margin(i)) != bayes(i);
      out.disagreement(j, static_cast<Index>(k)) = static_cast<double>(differ) / static_cast<double>(margin.size());
    });
    const std::array<int, 1> last{block_size};
    sweep_prefixes(model, gt, first, first + block_size, last, [&](std::size_t, const Vector& margin) {
      Index wrong = 0;
      for (Index i = 0; i < margin.size(); ++i) wrong += sign_label(margin(i)) != training.label(i);
      out.block_training_error[static_cast<std::size_t>(j)] =
          static_cast<double>(wrong) / static_cast<double>(margin.size());
    });
  }
  return out;
}

RateFormulas rate_formulas(double p, long long n, int d) {
  if (!(p > 0.5 && p < 1.0)) throw InvalidInput("rate formulas need 0.5 < p < 1");
  if (n < 1 || d < 1) throw InvalidInput("rate formulas need n, d >= 1");
  RateFormulas r;
  const double nd = static_cast<double>(n);
  r.local_rate = (1.0 - p) * nd / std::pow(nd, d);
  r.onenn_rate = 2.0 * p * (1.0 - p);
  r.stump_lower_bound = std::pow(1.0 - p, d) * std::pow(1.0 - 1.0 / d, d);
  return r;
}

PairedTest paired_t_test_less(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidInput("paired test needs two equal samples of size >= 2");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : diff) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  PairedTest t;
  t.mean_difference = mean;
  if (sd == 0.0) {
    t.t_statistic = mean < 0.0 ? -std::numeric_limits<double>::infinity()
                               : (mean > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    t.p_value = mean < 0.0 ? 0.0 : 1.0;
    return t;
  }
  t.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  t.p_value = boost::math::cdf(dist, t.t_statistic);
  return t;
}

}  // namespace ens
