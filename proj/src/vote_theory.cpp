#include "ensemble/vote_theory.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>

namespace ens {

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_digits(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw InvalidInput("expected digits, got '" + s + "'");
  }
  return cpp_int(s);
}

// Counts outcomes in A by number of ones, walking {0,1}^n in Gray-code order.
std::vector<std::uint64_t> majority_counts_by_ones(const std::vector<int>& z) {
  const int n = static_cast<int>(z.size());
  if (n > kMaxEnumerationSize) throw InvalidInput("enumeration is limited to n <= 24");
  long long total = 0;
  for (int w : z) total += w;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  const std::uint64_t outcomes = std::uint64_t{1} << n;
  long long sum = 0;
  int ones = 0;
  std::uint64_t gray = 0;
  for (std::uint64_t i = 0;; ++i) {
    if (2 * sum > total) ++counts[static_cast<std::size_t>(ones)];
    if (i + 1 == outcomes) break;
    const int bit = std::countr_zero(i + 1);
    gray ^= std::uint64_t{1} << bit;
    if (gray >> bit & 1) {
      sum += z[static_cast<std::size_t>(bit)];
      ++ones;
    } else {
      sum -= z[static_cast<std::size_t>(bit)];
      --ones;
    }
  }
  return counts;
}

Rational weigh_counts(const std::vector<std::uint64_t>& counts, const Rational& p) {
  const int n = static_cast<int>(counts.size()) - 1;
  const Rational q = 1 - p;
  std::vector<Rational> pp(static_cast<std::size_t>(n) + 1, Rational(1));
  std::vector<Rational> qq(static_cast<std::size_t>(n) + 1, Rational(1));
  for (int k = 1; k <= n; ++k) {
    pp[static_cast<std::size_t>(k)] = pp[static_cast<std::size_t>(k) - 1] * p;
    qq[static_cast<std::size_t>(k)] = qq[static_cast<std::size_t>(k) - 1] * q;
  }
  Rational result(0);
  for (int k = 0; k <= n; ++k) {
    const auto c = counts[static_cast<std::size_t>(k)];
    if (c != 0) result += Rational(c) * pp[static_cast<std::size_t>(k)] * qq[static_cast<std::size_t>(n - k)];
  }
  return result;
}

void extend_partitions(int remaining, int max_part, int slots, std::vector<int>& prefix,
                       std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    std::vector<int> z = prefix;
    z.resize(prefix.size() + static_cast<std::size_t>(slots), 0);
    out.push_back(std::move(z));
    return;
  }
  if (slots == 0) return;
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    prefix.push_back(part);
    extend_partitions(remaining - part, part, slots - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

Rational parse_probability(const std::string& text) {
  Rational r;
  const auto slash = text.find('/');
  const auto dot = text.find('.');
  if (slash != std::string::npos) {
    const cpp_int den = parse_digits(text.substr(slash + 1));
    if (den == 0) throw InvalidInput("zero denominator in '" + text + "'");
    r = Rational(parse_digits(text.substr(0, slash)), den);
  } else if (dot != std::string::npos) {
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.empty()) throw InvalidInput("bad probability '" + text + "'");
    cpp_int den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    r = Rational(parse_digits(whole.empty() ? "0" : whole) * den + parse_digits(frac), den);
  } else {
    r = Rational(parse_digits(text));
  }
  if (r < 0 || r > 1) throw InvalidInput("probability '" + text + "' is outside [0,1]");
  return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  const cpp_int num = boost::multiprecision::numerator(r);
  const cpp_int den = boost::multiprecision::denominator(r);
  return den == 1 ? num.str() : num.str() + "/" + den.str();
}

int VoteInstance::total() const {
  int s = 0;
  for (int w : z) s += w;
  return s;
}

void VoteInstance::validate() const {
  if (z.empty()) throw InvalidInput("vote instance needs n >= 1");
  for (int w : z) {
    if (w < 0) throw InvalidInput("vote weights must be non-negative");
  }
  const int m = total();
  if (m < 1 || m % 2 == 0) throw InvalidInput("total weight M must be a positive odd integer");
  if (m > n()) throw InvalidInput("total weight M must not exceed n");
  if (!(p > Rational(1, 2) && p < 1)) throw InvalidInput("p must lie strictly between 1/2 and 1");
}

Rational majority_probability(const VoteInstance& instance) {
  instance.validate();
  return weigh_counts(majority_counts_by_ones(instance.z), instance.p);
}

double majority_probability_dp(const VoteInstance& instance) {
  instance.validate();
  return majority_probability_dp<double>(instance.z, to_double(instance.p));
}

std::uint64_t majority_set_size(const std::vector<int>& z) {
  std::uint64_t s = 0;
  for (auto c : majority_counts_by_ones(z)) s += c;
  return s;
}

std::vector<std::vector<int>> weight_partitions(int total, int n) {
  if (total < 0 || n < 1) throw InvalidInput("partitions need total >= 0 and n >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  extend_partitions(total, total, n, prefix, out);
  return out;
}

std::uint64_t arrangement_count(const std::vector<int>& z) {
  std::map<int, int> multiplicity;
  for (int w : z) ++multiplicity[w];
  // Multinomial built as a product of binomials to stay exact in 64 bits.
  std::uint64_t result = 1;
  std::uint64_t placed = 0;
  for (const auto& [value, count] : multiplicity) {
    for (int k = 1; k <= count; ++k) {
      ++placed;
      result = result * placed / static_cast<std::uint64_t>(k);
    }
  }
  return result;
}

bool TheoremCase::degenerate() const {
  return std::count_if(z.begin(), z.end(), [](int w) { return w != 0; }) == 1;
}

bool TheoremReport::passed() const {
  if (!violations.empty() || asymmetric_cases != 0) return false;
  return std::all_of(summaries.begin(), summaries.end(), [](const TheoremSummary& s) { return s.degenerate_attains_min; });
}

TheoremReport verify_theorem_a(int n_max, const std::vector<int>& M_list, const std::vector<Rational>& p_list) {
  if (n_max < 1 || n_max > kMaxEnumerationSize) throw InvalidInput("n_max must lie in [1, 24]");
  if (p_list.empty()) throw InvalidInput("at least one p is required");
  TheoremReport report;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<int> totals;
    if (M_list.empty()) {
      for (int m = 1; m <= n; m += 2) totals.push_back(m);
    } else {
      for (int m : M_list) {
        if (m >= 1 && m % 2 == 1 && m <= n) totals.push_back(m);
      }
    }
    for (int m : totals) {
      const auto partitions = weight_partitions(m, n);
      for (const Rational& p : p_list) {
        TheoremSummary summary;
        summary.n = n;
        summary.M = m;
        summary.p = p;
        bool first = true;
        for (const auto& z : partitions) {
          VoteInstance inst{z, p};
          inst.validate();
          const auto counts = majority_counts_by_ones(z);
          TheoremCase c;
          c.n = n;
          c.M = m;
          c.p = p;
          c.z = z;
          c.probability = weigh_counts(counts, p);
          c.multiplicity = arrangement_count(z);
          std::uint64_t size = 0;
          for (auto k : counts) size += k;
          c.complement_symmetric = size == (std::uint64_t{1} << (n - 1));
          if (!c.complement_symmetric) ++report.asymmetric_cases;
          if (c.violates()) report.violations.push_back(c);
          if (c.equality()) ++summary.equality_cases;
          if (first || c.probability < summary.min_case.probability ||
              (c.probability == summary.min_case.probability && c.degenerate())) {
            summary.min_case = c;
          }
          if (first || c.probability > summary.max_case.probability) summary.max_case = c;
          first = false;
          report.compositions_covered += c.multiplicity;
          report.cases.push_back(std::move(c));
        }
        summary.degenerate_attains_min = summary.min_case.degenerate() && summary.min_case.probability == p;
        report.summaries.push_back(std::move(summary));
      }
    }
  }
  return report;
}

MassShift mass_shift_check(const std::vector<int>& z, int alpha, int beta, const Rational& p) {
  if (z.size() < 2) throw InvalidInput("mass shift needs n >= 2");
  if (alpha < 1 || beta < 0 || alpha < beta) throw InvalidInput("mass shift needs alpha >= beta >= 0 and alpha >= 1");
  if (z[0] != alpha + beta || z[1] != 0) throw InvalidInput("mass shift needs z1 = alpha + beta and z2 = 0");
  VoteInstance before{z, p};
  before.validate();
  MassShift out;
  out.z = z;
  out.z_shifted = z;
  out.z_shifted[0] = alpha;
  out.z_shifted[1] = beta;
  out.pr_a = majority_probability(before);
  out.pr_a_shifted = majority_probability(VoteInstance{out.z_shifted, p});

  const int n = static_cast<int>(z.size());
  if (n > kMaxEnumerationSize) throw InvalidInput("enumeration is limited to n <= 24");
  const long long m = before.total();
  for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y) {
    long long s = 0;
    long long s2 = 0;
    for (int i = 0; i < n; ++i) {
      if (y >> i & 1) {
        s += z[static_cast<std::size_t>(i)];
        s2 += out.z_shifted[static_cast<std::size_t>(i)];
      }
    }
    const bool in_a = 2 * s > m;
    const bool in_a2 = 2 * s2 > m;
    const bool y1 = y & 1;
    const bool y2 = y >> 1 & 1;
    if (in_a2 && !in_a) {
      ++out.b1_size;
      if (y1 || !y2) out.membership_ok = false;
    }
    if (in_a && !in_a2) {
      ++out.b2_size;
      if (!y1 || y2) out.membership_ok = false;
    }
  }
  return out;
}

}  // namespace ens
