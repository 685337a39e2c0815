#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spx/assignment.hpp"
#include "spx/instance.hpp"
#include "spx/rational.hpp"
#include "spx/rng.hpp"

namespace spx {

enum class SolveStatus {
  kOptimal,          // value equals the supplied optimum (known-optimum solvers)
  kFound,            // unknown-optimum solver returned a point
  kBudgetExhausted,  // known-optimum solver ran out of draws or ball points
  kRefused,          // computed sample sizes exceed the configured caps
  kFailed,           // every sweep stage returned NULL and no fallback ran
};

std::string to_string(SolveStatus status);

struct SolveOutcome {
  Assignment best;
  Rational value;
  std::uint64_t iterations = 0;
  std::uint64_t raw_draws = 0;
  std::uint64_t ball_points = 0;
  double wall_seconds = 0;
  bool certified_optimal = false;
  SolveStatus status = SolveStatus::kFailed;
  std::string note;
};

struct Budget {
  std::uint64_t max_ball_points = 1'000'000;
  // Empty: 64 * 2^n raw draws per threshold sample.
  std::optional<std::uint64_t> max_raw_draws;
};

struct SearchRadius {
  // Replaces the radius the theory prescribes (r_ns or r_lip).
  std::optional<std::size_t> radius_override;
};

// Known optimum. Samples T_eta by rejection and searches B(x, r_ns) until a
// point of value h_min is found.
SolveOutcome solve_case1(const Lin2Instance& inst, const Rational& h_min, const Rational& eta, RngStream& rng,
                         const Budget& budget = {}, const SearchRadius& radius = {});

// Known optimum h_min < 0. Same loop with the light-coordinate ball of
// radius r_lip.
SolveOutcome solve_case2(const CspInstance& inst, const Rational& h_min, const Rational& eta, RngStream& rng,
                         const Budget& budget = {}, const SearchRadius& radius = {});

struct RankedOptions {
  Rational delta{1, 10};
  double slack = 1.0;  // multiplies the successful-set size estimate s
  std::optional<std::size_t> radius_override;
  std::uint64_t max_samples = std::uint64_t{1} << 26;
  std::uint64_t max_retained = std::uint64_t{1} << 20;
  std::uint64_t max_ball_points = std::uint64_t{1} << 34;
  bool keep_samples = false;
};

struct RankedTrace {
  double s = 0;  // successful-set size estimate
  double t = 0;  // threshold-set bound 2^{(1-gamma) n}
  std::uint64_t N = 0;
  std::uint64_t K = 0;
  std::size_t radius = 0;
  std::vector<Assignment> retained;
  std::vector<Assignment> samples;  // only with keep_samples
};

// Unknown optimum: draw N uniform points, keep the K lowest, search a ball
// around each and return the overall minimum.
SolveOutcome ranked_solve(const Lin2Instance& inst, const Rational& eta, double gamma_hint, RngStream& rng,
                          const RankedOptions& options = {}, RankedTrace* trace = nullptr);

enum class BoundedStatus {
  kFound,      // H(y) <= U
  kNull,       // final acceptance test failed
  kAbortCap,   // |K| exceeded the Markov cap
  kBudgetNull, // configured resource caps exceeded; not a verdict
};

std::string to_string(BoundedStatus status);

struct BoundedOptions {
  Rational delta{1, 10};
  double slack = 1.0;  // multiplies V_U
  // Replaces c_tail(U) in the cap; a larger value tightens it.
  std::optional<double> c_tail_override;
  std::uint64_t max_samples = std::uint64_t{1} << 26;
  std::uint64_t max_ball_points = std::uint64_t{1} << 34;
};

struct BoundedResult {
  BoundedStatus status = BoundedStatus::kNull;
  std::optional<Assignment> point;
  Rational value;  // H(point) when found
  std::size_t radius = 0;  // r(U)
  double V = 0;            // slack * |B_light(x, r(U))|
  double c_tail = 0;
  std::uint64_t N = 0;
  std::uint64_t cap = 0;
  std::uint64_t kept = 0;  // |K|
  std::uint64_t draws = 0;
  std::uint64_t ball_points = 0;
};

// One-sided: never returns a point with H > U, so U < H_min always yields
// NULL. Requires -W <= U < 0.
BoundedResult search_bounded(const CspInstance& inst, const Rational& U, const Rational& eta, RngStream& rng,
                             const BoundedOptions& options = {});

struct SweepStage {
  std::int64_t r = 0;
  Rational U;
  double budget_log2 = 0;  // (1 - c_eta(U_r)) n, nonincreasing in r
  BoundedResult result;
};

struct SweepTrace {
  Rational B;  // eta / (2 Lambda_max d_avg)
  std::int64_t R = 0;
  std::vector<SweepStage> stages;  // in execution order r = R, R-1, ...
  std::optional<std::int64_t> halt_stage;
  bool exhaustive_fallback = false;
};

struct SweepOptions {
  BoundedOptions stage;
  // After all stages return NULL, enumerate the cube when n <= 30.
  bool exhaustive_fallback = true;
};

SolveOutcome bounded_sweep_solve(const CspInstance& inst, const Rational& eta, RngStream& rng,
                                 const SweepOptions& options = {}, SweepTrace* trace = nullptr);

// Stage budgets 2^{(1 - c_eta(U_r)) n} for r = 1..R, as log2, indexed r - 1.
std::vector<double> sweep_budget_schedule(const CspInstance& inst, const Rational& eta);

}  // namespace spx
