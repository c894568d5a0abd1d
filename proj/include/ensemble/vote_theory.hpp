#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ensemble/data_model.hpp"

namespace ens {

using Rational = boost::multiprecision::cpp_rational;

/// "0.75", "3/4" or "1" as an exact rational.
Rational parse_probability(const std::string& text);
double to_double(const Rational& r);
std::string to_string(const Rational& r);

/// Integer vote weights z with sum M (odd, M <= n) and success probability p > 1/2.
struct VoteInstance {
  std::vector<int> z;
  Rational p;

  int n() const { return static_cast<int>(z.size()); }
  int total() const;
  void validate() const;
};

constexpr int kMaxEnumerationSize = 24;

/// Exact Pr{sum z_i Y_i > M/2}, Y_i iid Bernoulli(p), by enumerating {0,1}^n.
Rational majority_probability(const VoteInstance& instance);

/// The same probability by a convolution over achievable weight sums 0..M.
template <typename Scalar>
Scalar majority_probability_dp(const std::vector<int>& z, const Scalar& p) {
  int total = 0;
  for (int w : z) {
    if (w < 0) throw InvalidInput("vote weights must be non-negative");
    total += w;
  }
  std::vector<Scalar> dist(static_cast<std::size_t>(total) + 1, Scalar(0));
  dist[0] = Scalar(1);
  const Scalar q = Scalar(1) - p;
  int reach = 0;
  for (int w : z) {
    if (w == 0) continue;
    reach += w;
    for (int s = reach; s >= 0; --s) {
      const auto us = static_cast<std::size_t>(s);
      Scalar v = dist[us] * q;
      if (s >= w) v += dist[us - static_cast<std::size_t>(w)] * p;
      dist[us] = v;
    }
  }
  Scalar result(0);
  for (int s = 0; s <= total; ++s) {
    if (2 * s > total) result += dist[static_cast<std::size_t>(s)];
  }
  return result;
}

double majority_probability_dp(const VoteInstance& instance);

/// Number of outcomes y in {0,1}^n with sum z_i y_i > M/2.
std::uint64_t majority_set_size(const std::vector<int>& z);

/// Non-increasing partitions of total into at most n parts, zero-padded to length n.
std::vector<std::vector<int>> weight_partitions(int total, int n);

/// Distinct orderings of z: n! / prod(multiplicity of each value)!.
std::uint64_t arrangement_count(const std::vector<int>& z);

struct TheoremCase {
  int n = 0;
  int M = 0;
  Rational p;
  std::vector<int> z;
  Rational probability;
  std::uint64_t multiplicity = 0;
  bool complement_symmetric = true;  // |A| == 2^(n-1)

  bool violates() const { return probability < p; }
  bool equality() const { return probability == p; }
  bool degenerate() const;
};

struct TheoremSummary {
  int n = 0;
  int M = 0;
  Rational p;
  TheoremCase min_case;
  TheoremCase max_case;
  int equality_cases = 0;
  bool degenerate_attains_min = false;
};

struct TheoremReport {
  std::vector<TheoremCase> cases;
  std::vector<TheoremSummary> summaries;
  std::vector<TheoremCase> violations;
  int asymmetric_cases = 0;
  std::uint64_t compositions_covered = 0;  // cases expanded by multiplicity

  bool passed() const;
};

/// Checks Pr{majority} >= p for every z (up to permutation) over n <= n_max,
/// each odd M in M_list with M <= n, and each p. An empty M_list means every odd M <= n.
TheoremReport verify_theorem_a(int n_max, const std::vector<int>& M_list, const std::vector<Rational>& p_list);

struct MassShift {
  std::vector<int> z;
  std::vector<int> z_shifted;
  Rational pr_a;
  Rational pr_a_shifted;
  std::uint64_t b1_size = 0;  // |A' \ A|
  std::uint64_t b2_size = 0;  // |A \ A'|
  bool membership_ok = true;  // B1 has y1=0,y2=1 and B2 has y1=1,y2=0

  bool inequality_holds() const { return pr_a_shifted >= pr_a; }
  bool sizes_equal() const { return b1_size == b2_size; }
};

/// Moves beta of the z[0] = alpha + beta units onto the empty z[1].
MassShift mass_shift_check(const std::vector<int>& z, int alpha, int beta, const Rational& p);

}  // namespace ens
