#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spx/assignment.hpp"
#include "spx/instance.hpp"
#include "spx/kernel.hpp"
#include "spx/rational.hpp"

namespace spx {

struct OracleLimits {
  std::size_t max_count_n = 30;         // full-cube minimization and counting
  std::size_t max_distribution_n = 20;  // exact flip-pattern distributions
  std::size_t max_table_n = 24;         // materialized value tables
};

inline constexpr OracleLimits kOracleLimits{};

class OracleTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct OracleOptions {
  // Keep at most this many minimizers (the lexicographically smallest).
  std::size_t cap_minimizers = 64;
  bool histogram = false;
  unsigned workers = 1;
};

struct OracleResult {
  Rational h_min;
  std::vector<Assignment> minimizers;  // lexicographic order, capped
  std::uint64_t minimizer_count = 0;   // uncapped
  std::optional<std::map<Rational, std::uint64_t>> histogram;
};

// Full Gray-code enumeration of {-1,+1}^n with incremental updates.
OracleResult brute_force_minimum(const Instance& inst, const OracleOptions& options = {});

// |{x : H(x) <= (1 - eta) h_min}|. Refuses h_min = 0 and trivial instances.
std::uint64_t threshold_set_count(const Instance& inst, const Rational& h_min, const Rational& eta, unsigned workers = 1);

// Scaled objective value of every point, indexed by bitmask.
std::vector<std::int64_t> value_table(const Kernel& kernel, unsigned workers = 1);

struct CorrelatedExpectation {
  Rational closed_form;               // sum_S b_S rho^|S|, b_S = c_S prod_{i in S} x*_i
  std::optional<Rational> enumerated; // sum_t q^|t| (1-q)^{n-|t|} H(x* . t), n <= 20
};

// Expected H over X = x* with each coordinate flipped independently w.p. q.
CorrelatedExpectation exact_correlated_expectation(const Lin2Instance& inst, const Assignment& x_star, const Rational& q);

// Pr[H(X) <= (1 - eta) H(x*)] under the same flip distribution; n <= 20.
Rational exact_landing_probability(const Lin2Instance& inst, const Assignment& x_star, const Rational& q,
                                   const Rational& eta);

}  // namespace spx
