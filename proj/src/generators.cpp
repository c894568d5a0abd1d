#include "ensemble/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ensemble/rng.hpp"

namespace ens {

Matrix lhs_midpoints(Index n, Index d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw InvalidInput("design needs n >= 1 and d >= 1");
  Rng rng = Rng::stream(seed, "design");
  Matrix x(n, d);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), Index{1});
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    for (Index i = 0; i < n; ++i) {
      x(i, j) = (2.0 * static_cast<double>(perm[static_cast<std::size_t>(i)]) - 1.0) / (2.0 * static_cast<double>(n));
    }
  }
  return x;
}

Matrix iid_uniform(Index n, Index d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw InvalidInput("design needs n >= 1 and d >= 1");
  Rng rng = Rng::stream(seed, "design");
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) = rng.uniform();
  }
  return x;
}

Matrix generate_design(const DesignSpec& spec) {
  return spec.scheme == DesignScheme::LhsMidpoint ? lhs_midpoints(spec.n, spec.d, spec.seed)
                                                  : iid_uniform(spec.n, spec.d, spec.seed);
}

NoiseSpec NoiseSpec::parse(const std::string& text, std::uint64_t seed) {
  const auto colon = text.find(':');
  const std::string mode = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (mode == "model" && arg.empty()) return model(seed);
    if (mode == "bernoulli" && !arg.empty()) return bernoulli(std::stod(arg), seed);
    if (mode == "exact" && !arg.empty()) {
      const long long k = std::stoll(arg);
      if (k < 0) throw InvalidInput("flip count must be non-negative");
      return exact_count(static_cast<Index>(k), seed);
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidInput*>(&e)) throw;
  }
  throw InvalidInput("bad noise spec '" + text + "' (expected model, bernoulli:P or exact:K)");
}

std::string NoiseSpec::to_string() const {
  switch (mode) {
    case Mode::Model:
      return "model";
    case Mode::Bernoulli: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "bernoulli:%.17g", p);
      return buf;
    }
    case Mode::ExactCount:
      return "exact:" + std::to_string(k);
  }
  return "model";
}

LabelVector bayes_labels(const LabelModel& model, const Matrix& points) {
  LabelVector y(points.rows());
  for (Index i = 0; i < points.rows(); ++i) y(i) = model.bayes_label(points.row(i));
  return y;
}

LabeledDataset label_dataset(const Matrix& points, const LabelModel& model, const NoiseSpec& noise) {
  if (points.rows() < 1) throw InvalidInput("no points to label");
  if ((points.array() < 0.0).any() || (points.array() > 1.0).any()) {
    throw InvalidInput("points must lie in the unit cube");
  }
  if (points.cols() < model.min_dim()) throw InvalidInput("label model needs more dimensions");
  const Index n = points.rows();
  Rng rng = Rng::stream(noise.seed, "labels");
  LabelVector y = bayes_labels(model, points);
  switch (noise.mode) {
    case NoiseSpec::Mode::Model:
      for (Index i = 0; i < n; ++i) {
        y(i) = rng.bernoulli(model.positive_probability(points.row(i))) ? kPositive : kNegative;
      }
      break;
    case NoiseSpec::Mode::Bernoulli:
      if (!(noise.p >= 0.0 && noise.p <= 1.0)) throw InvalidInput("bernoulli keep probability must lie in [0,1]");
      for (Index i = 0; i < n; ++i) {
        if (!rng.bernoulli(noise.p)) y(i) = -y(i);
      }
      break;
    case NoiseSpec::Mode::ExactCount: {
      if (noise.k < 0 || noise.k > n) throw InvalidInput("flip count must lie in [0, n]");
      std::vector<Index> idx(static_cast<std::size_t>(n));
      std::iota(idx.begin(), idx.end(), Index{0});
      std::shuffle(idx.begin(), idx.end(), rng.engine());
      for (Index k = 0; k < noise.k; ++k) {
        const Index i = idx[static_cast<std::size_t>(k)];
        y(i) = -y(i);
      }
      break;
    }
  }
  return LabeledDataset(points, std::move(y));
}

NeighborHoldout neighbor_holdout(const LabeledDataset& training, double distance, std::uint64_t seed) {
  if (!(distance > 0.0)) throw InvalidInput("neighbor distance must be positive");
  constexpr int kMaxAttempts = 100000;
  const Index d = training.dim();
  Rng rng = Rng::stream(seed, "directions");
  NeighborHoldout out;
  std::vector<Point> rows;
  Point dir(d);
  for (Index i = 0; i < training.size(); ++i) {
    if (training.label(i) != kNegative) continue;
    const Point source = training.row(i);
    Point candidate(d);
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxAttempts) throw InvalidInput("could not place a neighbor inside the unit cube");
      double norm = 0.0;
      do {
        for (Index j = 0; j < d; ++j) dir(j) = rng.normal();
        norm = dir.norm();
      } while (!(norm > 0.0));
      candidate = source + (distance / norm) * dir;
      if ((candidate.array() >= 0.0).all() && (candidate.array() <= 1.0).all()) break;
    }
    out.redraws += attempt;
    rows.push_back(candidate);
    out.sources.push_back(i);
  }
  out.points.resize(static_cast<Index>(rows.size()), d);
  for (std::size_t k = 0; k < rows.size(); ++k) out.points.row(static_cast<Index>(k)) = rows[k];
  return out;
}

}  // namespace ens
