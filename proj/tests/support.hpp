#pragma once

#include <cstdint>
#include <vector>

#include "spx/formats.hpp"
#include "spx/instance.hpp"
#include "spx/rng.hpp"

namespace spx::test {

inline Rational frac(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Naive references: plain mask loops over exact rational evaluation.
inline Assignment point(std::size_t n, std::uint64_t mask) { return Assignment::from_mask(n, mask); }

inline std::vector<Rational> naive_values(const Instance& inst) {
  const std::size_t n = instance_n(inst);
  std::vector<Rational> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) out.push_back(evaluate(inst, point(n, m)));
  return out;
}

struct NaiveMin {
  Rational h_min;
  std::vector<std::uint64_t> minimizers;  // masks, ascending
};

inline NaiveMin naive_min(const Instance& inst) {
  const auto vals = naive_values(inst);
  NaiveMin out{vals[0], {}};
  for (const auto& v : vals) {
    if (v < out.h_min) out.h_min = v;
  }
  for (std::uint64_t m = 0; m < vals.size(); ++m) {
    if (vals[m] == out.h_min) out.minimizers.push_back(m);
  }
  return out;
}

// m is clamped to C(n, k).
inline Lin2Instance random_lin2(std::size_t n, std::size_t k, std::size_t m, std::uint64_t seed) {
  BigInt total;
  mpz_bin_uiui(total.get_mpz_t(), n, k);
  if (total < static_cast<unsigned long>(m)) m = total.get_ui();
  return gen_random_lin2(n, k, m, {Rational(-2), Rational(-1), Rational(1), Rational(3, 2)}, seed);
}

inline CspInstance random_csp(std::size_t n, std::size_t k, std::size_t m, std::uint64_t seed, bool weighted = false,
                              PredicateFamily family = PredicateFamily::kRandom, bool mixed = true) {
  CspGenSpec spec;
  spec.n = n;
  spec.k = k;
  spec.m = m;
  spec.family = family;
  spec.mixed_arity = mixed;
  if (weighted) spec.weights = {Rational(1), Rational(3, 2), Rational(2), Rational(5, 3)};
  return gen_random_csp(spec, seed);
}

inline CspInstance planted_csp(std::size_t n, std::size_t k, std::size_t m, std::uint64_t seed,
                               PredicateFamily family = PredicateFamily::kSat, bool mixed = false,
                               Assignment* planted_out = nullptr) {
  RngStream rng(seed, 99);
  const Assignment planted = rng.uniform_assignment(n);
  if (planted_out != nullptr) *planted_out = planted;
  CspGenSpec spec;
  spec.n = n;
  spec.k = k;
  spec.m = m;
  spec.family = family;
  spec.mixed_arity = mixed;
  return gen_planted_csp(spec, planted, seed);
}

}  // namespace spx::test
