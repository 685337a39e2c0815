#include "spx/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "spx/exponents.hpp"
#include "spx/kernel.hpp"
#include "spx/oracle.hpp"
#include "spx/sampling.hpp"

namespace spx {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFound:
      return "found";
    case SolveStatus::kBudgetExhausted:
      return "budget-exhausted";
    case SolveStatus::kRefused:
      return "refused";
    case SolveStatus::kFailed:
      return "failed";
  }
  return "?";
}

std::string to_string(BoundedStatus status) {
  switch (status) {
    case BoundedStatus::kFound:
      return "found";
    case BoundedStatus::kNull:
      return "null";
    case BoundedStatus::kAbortCap:
      return "null-cap";
    case BoundedStatus::kBudgetNull:
      return "null-budget";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Saturating conversion of a nonnegative double count.
std::uint64_t to_count(double v) {
  if (!(v < 1.8e19)) return UINT64_MAX;
  return static_cast<std::uint64_t>(v);
}

std::uint64_t ceil_count(double v) { return to_count(std::ceil(v)); }

struct Candidate {
  std::int64_t value;
  Assignment point;
  bool operator<(const Candidate& o) const {
    if (value != o.value) return value < o.value;
    return point < o.point;
  }
};

void offer(std::optional<Candidate>& best, std::int64_t value, const Assignment& point) {
  if (!best || value < best->value || (value == best->value && point < best->point)) best = Candidate{value, point};
}

// Sample T_eta, search the ball around the sample, repeat until the scaled
// target is reached or a budget runs out.
SolveOutcome known_optimum_loop(const Kernel& kernel, const Rational& h_min, const Rational& eta, std::size_t radius,
                                const std::optional<std::vector<std::uint32_t>>& allowed, RngStream& rng,
                                const Budget& budget) {
  const auto start = Clock::now();
  const ThresholdSampler sampler(kernel, h_min, eta);
  const std::int64_t target = kernel.scaled_floor(h_min);
  const std::uint64_t max_draws = budget.max_raw_draws.value_or(default_draw_budget(kernel.n()));
  SolveOutcome out;
  std::optional<Candidate> best;
  bool reached = false;
  while (!reached) {
    if (out.ball_points >= budget.max_ball_points || out.raw_draws >= max_draws) break;
    auto sample = sampler.draw(rng, max_draws - out.raw_draws);
    out.raw_draws += sample.raw_draws;
    if (!sample.point) break;
    ++out.iterations;
    BallSpec spec{std::move(*sample.point), radius, allowed};
    BallSearchOptions opts;
    opts.stop_at_or_below = target;
    opts.max_points = budget.max_ball_points - out.ball_points;
    const auto res = ball_search_min(kernel, spec, opts);
    out.ball_points += res.points;
    offer(best, res.scaled_value, res.best);
    reached = res.reached_target;
  }
  if (best) {
    out.best = best->point;
    out.value = kernel.to_rational(best->value);
  } else {
    out.best = Assignment(kernel.n());
    out.value = kernel.to_rational(kernel.evaluate(out.best));
  }
  if (reached) {
    out.certified_optimal = out.value == h_min;
    out.status = out.certified_optimal ? SolveStatus::kOptimal : SolveStatus::kFound;
    if (!out.certified_optimal) out.note = "found a value below the supplied optimum";
  } else {
    out.status = SolveStatus::kBudgetExhausted;
  }
  out.wall_seconds = seconds_since(start);
  return out;
}

double ln_two_over(const Rational& delta) {
  if (delta <= 0 || delta >= Rational(1, 2)) throw std::invalid_argument("delta must lie in (0, 1/2)");
  return std::log(2.0 / to_double(delta));
}

}  // namespace

SolveOutcome solve_case1(const Lin2Instance& inst, const Rational& h_min, const Rational& eta, RngStream& rng,
                         const Budget& budget, const SearchRadius& radius) {
  if (inst.trivial()) {
    SolveOutcome out;
    out.best = Assignment(inst.n());
    out.value = 0;
    out.certified_optimal = true;
    out.status = SolveStatus::kOptimal;
    out.note = "H is identically zero";
    return out;
  }
  if (h_min >= 0) throw DegenerateInstance("solve_case1 needs H_min < 0");
  const Kernel kernel(inst);
  const auto rates = flip_rates(eta, inst.k(), inst.n());
  const std::size_t r = radius.radius_override.value_or(
      static_cast<std::size_t>(std::min<std::int64_t>(rates.r_ns, static_cast<std::int64_t>(inst.n()))));
  return known_optimum_loop(kernel, h_min, eta, r, std::nullopt, rng, budget);
}

SolveOutcome solve_case2(const CspInstance& inst, const Rational& h_min, const Rational& eta, RngStream& rng,
                         const Budget& budget, const SearchRadius& radius) {
  if (h_min >= 0) throw DegenerateInstance("solve_case2 needs H_min < 0; use exhaustive search instead");
  const auto stats = compute_stats(inst);
  const auto lip = lipschitz_params(stats, h_min, eta);
  const Kernel kernel(inst);
  const std::size_t r = radius.radius_override.value_or(static_cast<std::size_t>(lip.r_lip));
  return known_optimum_loop(kernel, h_min, eta, r, light_coords(stats), rng, budget);
}

SolveOutcome ranked_solve(const Lin2Instance& inst, const Rational& eta, double gamma_hint, RngStream& rng,
                          const RankedOptions& options, RankedTrace* trace) {
  const auto start = Clock::now();
  const std::size_t n = inst.n();
  SolveOutcome out;
  if (inst.trivial()) {
    out.best = Assignment(n);
    out.value = 0;
    out.certified_optimal = true;
    out.status = SolveStatus::kOptimal;
    out.note = "H is identically zero";
    return out;
  }
  const double ln_term = ln_two_over(options.delta);
  const auto rates = flip_rates(eta, inst.k(), n);
  const double dn = static_cast<double>(n);
  RankedTrace local;
  RankedTrace& tr = trace != nullptr ? *trace : local;
  tr = RankedTrace{};
  tr.s = std::max(1.0, options.slack * std::exp2(binary_entropy(rates.q_eta) * dn));
  tr.t = std::exp2((1.0 - gamma_hint) * dn);
  const double N = std::ceil(std::exp2(dn) / tr.s * ln_term);
  const double K = std::min(N, std::ceil(2.0 / to_double(options.delta) * N * tr.t / std::exp2(dn)));
  tr.N = to_count(N);
  tr.K = to_count(K);
  tr.radius = options.radius_override.value_or(static_cast<std::size_t>(std::min<std::int64_t>(rates.r_ns, n)));
  if (tr.N > options.max_samples || tr.K > options.max_retained) {
    out.best = Assignment(n);
    out.value = evaluate_lin2(inst, out.best);
    out.status = SolveStatus::kRefused;
    out.note = "N = " + std::to_string(tr.N) + ", K = " + std::to_string(tr.K) + " exceed the configured caps";
    out.wall_seconds = seconds_since(start);
    return out;
  }

  const Kernel kernel(inst);
  // Max-heap of the K best (value, point) pairs seen so far.
  std::priority_queue<Candidate> keep;
  for (std::uint64_t i = 0; i < tr.N; ++i) {
    Assignment x = rng.uniform_assignment(n);
    ++out.raw_draws;
    const std::int64_t v = kernel.evaluate(x);
    if (options.keep_samples) tr.samples.push_back(x);
    Candidate c{v, std::move(x)};
    if (keep.size() < tr.K) {
      keep.push(std::move(c));
    } else if (c < keep.top()) {
      keep.pop();
      keep.push(std::move(c));
    }
  }
  std::vector<Candidate> retained;
  while (!keep.empty()) {
    retained.push_back(keep.top());
    keep.pop();
  }
  std::reverse(retained.begin(), retained.end());
  for (const auto& c : retained) tr.retained.push_back(c.point);

  std::optional<Candidate> best;
  bool exhausted = false;
  // Every ball of radius >= n is the whole cube; one search covers them all.
  const std::size_t searches = tr.radius >= n ? std::min<std::size_t>(1, retained.size()) : retained.size();
  for (std::size_t i = 0; i < searches; ++i) {
    ++out.iterations;
    BallSearchOptions opts;
    opts.max_points = options.max_ball_points - out.ball_points;
    const auto res = ball_search_min(kernel, BallSpec{retained[i].point, tr.radius, std::nullopt}, opts);
    out.ball_points += res.points;
    offer(best, res.scaled_value, res.best);
    if (res.truncated || out.ball_points >= options.max_ball_points) {
      exhausted = i + 1 < searches || res.truncated;
      break;
    }
  }
  out.best = best->point;
  out.value = kernel.to_rational(best->value);
  out.certified_optimal = tr.radius >= n && !exhausted;
  out.status = exhausted ? SolveStatus::kBudgetExhausted : SolveStatus::kFound;
  out.wall_seconds = seconds_since(start);
  return out;
}

namespace {

double tail_exponent(const InstanceStats& stats, const Rational& U, const Rational& eta) {
  return mcdiarmid_gamma(stats, U, eta);
}

double ball_exponent(const InstanceStats& stats, const Rational& U, const Rational& eta) {
  Rational arg = eta * abs(U) / (stats.Lambda_max * stats.Sigma);
  arg.canonicalize();
  return binary_entropy(to_double(arg)) / 2.0;
}

}  // namespace

BoundedResult search_bounded(const CspInstance& inst, const Rational& U, const Rational& eta, RngStream& rng,
                             const BoundedOptions& options) {
  const Rational W = inst.total_weight();
  if (!(U >= -W && U < 0)) throw std::invalid_argument("search_bounded needs -W <= U < 0");
  if (eta <= 0 || eta >= 1) throw std::invalid_argument("eta must lie in (0, 1)");
  const double ln_term = ln_two_over(options.delta);
  const auto stats = compute_stats(inst);
  const std::size_t n = inst.n();
  const double dn = static_cast<double>(n);

  BoundedResult res;
  const auto light = light_coords(stats);
  const std::int64_t r = floor_to_int64(eta * abs(U) / (2 * stats.Lambda_max * stats.d_avg));
  res.radius = std::min<std::size_t>(static_cast<std::size_t>(r), light.size());
  res.V = options.slack * ball_size(light.size(), res.radius).get_d();
  res.c_tail = options.c_tail_override.value_or(tail_exponent(stats, U, eta));
  const double N = std::ceil(std::exp2(dn) / res.V * ln_term);
  res.N = to_count(N);
  res.cap = ceil_count(2.0 / to_double(options.delta) * N * std::exp2((1.0 - res.c_tail) * dn) / std::exp2(dn));
  if (res.N > options.max_samples) {
    res.status = BoundedStatus::kBudgetNull;
    return res;
  }

  const Kernel kernel(inst);
  const std::int64_t limit = kernel.scaled_floor((1 - eta) * U);
  std::vector<Assignment> kept;
  for (std::uint64_t i = 0; i < res.N; ++i) {
    Assignment x = rng.uniform_assignment(n);
    if (kernel.evaluate(x) <= limit) kept.push_back(std::move(x));
  }
  res.draws = res.N;
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  res.kept = kept.size();
  if (res.kept > res.cap) {
    res.status = BoundedStatus::kAbortCap;
    return res;
  }

  std::optional<Candidate> best;
  for (const auto& x : kept) {
    BallSearchOptions opts;
    opts.max_points = options.max_ball_points - res.ball_points;
    const auto found = ball_search_min(kernel, BallSpec{x, res.radius, light}, opts);
    res.ball_points += found.points;
    offer(best, found.scaled_value, found.best);
    if (found.truncated) {
      res.status = BoundedStatus::kBudgetNull;
      return res;
    }
  }
  if (best && kernel.to_rational(best->value) <= U) {
    res.status = BoundedStatus::kFound;
    res.point = best->point;
    res.value = kernel.to_rational(best->value);
  } else {
    res.status = BoundedStatus::kNull;
  }
  return res;
}

std::vector<double> sweep_budget_schedule(const CspInstance& inst, const Rational& eta) {
  const auto stats = compute_stats(inst);
  Rational B = eta / (2 * stats.Lambda_max * stats.d_avg);
  B.canonicalize();
  const std::int64_t R = floor_to_int64(B * stats.W);
  std::vector<double> out;
  for (std::int64_t r = 1; r <= R; ++r) {
    const Rational U = -Rational(r) / B;
    const double c = std::min(ball_exponent(stats, U, eta), tail_exponent(stats, U, eta));
    out.push_back((1.0 - c) * static_cast<double>(stats.n));
  }
  return out;
}

SolveOutcome bounded_sweep_solve(const CspInstance& inst, const Rational& eta, RngStream& rng,
                                 const SweepOptions& options, SweepTrace* trace) {
  const auto start = Clock::now();
  if (inst.m() == 0) throw DegenerateInstance("bounded_sweep_solve needs at least one constraint");
  const auto stats = compute_stats(inst);
  SweepTrace local;
  SweepTrace& tr = trace != nullptr ? *trace : local;
  tr = SweepTrace{};
  tr.B = eta / (2 * stats.Lambda_max * stats.d_avg);
  tr.B.canonicalize();
  tr.R = floor_to_int64(tr.B * stats.W);
  const auto schedule = sweep_budget_schedule(inst, eta);

  SolveOutcome out;
  for (std::int64_t r = tr.R; r >= 1; --r) {
    SweepStage stage;
    stage.r = r;
    stage.U = -Rational(r) / tr.B;
    stage.U.canonicalize();
    stage.budget_log2 = schedule[static_cast<std::size_t>(r - 1)];
    RngStream stage_rng = rng.child(static_cast<std::uint64_t>(r));
    stage.result = search_bounded(inst, stage.U, eta, stage_rng, options.stage);
    out.raw_draws += stage.result.draws;
    out.ball_points += stage.result.ball_points;
    ++out.iterations;
    const bool found = stage.result.status == BoundedStatus::kFound;
    tr.stages.push_back(stage);
    if (found) {
      tr.halt_stage = r;
      out.best = *stage.result.point;
      out.value = stage.result.value;
      out.status = SolveStatus::kFound;
      out.wall_seconds = seconds_since(start);
      return out;
    }
  }
  if (options.exhaustive_fallback && inst.n() <= kOracleLimits.max_count_n) {
    tr.exhaustive_fallback = true;
    OracleOptions o;
    o.cap_minimizers = 1;
    const auto oracle = brute_force_minimum(inst, o);
    out.best = oracle.minimizers.front();
    out.value = oracle.h_min;
    out.ball_points += std::uint64_t{1} << inst.n();
    out.certified_optimal = true;
    out.status = SolveStatus::kFound;
    out.note = "all stages returned NULL; exhaustive search";
  } else {
    out.best = Assignment(inst.n());
    out.value = evaluate_csp(inst, out.best);
    out.status = SolveStatus::kFailed;
    out.note = "all stages returned NULL";
  }
  out.wall_seconds = seconds_since(start);
  return out;
}

}  // namespace spx
