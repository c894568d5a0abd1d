#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ensemble/data_model.hpp"

namespace ens {

enum class DesignScheme { LhsMidpoint, IidUniform };

struct DesignSpec {
  Index n = 1;
  Index d = 1;
  DesignScheme scheme = DesignScheme::LhsMidpoint;
  std::uint64_t seed = 0;
};

/// Midpoint Latin hypercube: column j is an independent uniformly random
/// permutation of {(2i - 1) / (2n) : i = 1..n}.
Matrix lhs_midpoints(Index n, Index d, std::uint64_t seed);
Matrix iid_uniform(Index n, Index d, std::uint64_t seed);
Matrix generate_design(const DesignSpec& spec);

/// How labels are drawn given the label model.
struct NoiseSpec {
  enum class Mode {
    Model,       // y = +1 with probability p(y=+1|x)
    Bernoulli,   // keep the Bayes label with probability p, flip otherwise
    ExactCount,  // flip exactly k Bayes labels chosen uniformly without replacement
  };
  Mode mode = Mode::Model;
  double p = 1.0;
  Index k = 0;
  std::uint64_t seed = 0;

  static NoiseSpec model(std::uint64_t seed = 0) { return {Mode::Model, 1.0, 0, seed}; }
  static NoiseSpec bernoulli(double p, std::uint64_t seed = 0) { return {Mode::Bernoulli, p, 0, seed}; }
  static NoiseSpec exact_count(Index k, std::uint64_t seed = 0) { return {Mode::ExactCount, 1.0, k, seed}; }
  /// "model", "bernoulli:0.8" or "exact:80".
  static NoiseSpec parse(const std::string& text, std::uint64_t seed = 0);
  std::string to_string() const;
};

LabeledDataset label_dataset(const Matrix& points, const LabelModel& model, const NoiseSpec& noise);

/// Bayes labels of each row.
LabelVector bayes_labels(const LabelModel& model, const Matrix& points);

struct NeighborHoldout {
  Matrix points;
  std::vector<Index> sources;  // training row each point was drawn around
  Index redraws = 0;           // directions rejected for leaving the unit cube
};

/// One point per -1 training row at exactly `distance` in a uniformly random
/// direction (normalized Gaussian). Directions that leave [0,1]^d are redrawn.
NeighborHoldout neighbor_holdout(const LabeledDataset& training, double distance, std::uint64_t seed);

}  // namespace ens
