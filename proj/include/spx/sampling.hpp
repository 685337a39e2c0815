#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spx/assignment.hpp"
#include "spx/instance.hpp"
#include "spx/kernel.hpp"
#include "spx/rational.hpp"
#include "spx/rng.hpp"

namespace spx {

// 64 * 2^n / max(1, estimate), saturating at 2^64 - 1.
std::uint64_t default_draw_budget(std::size_t n, std::uint64_t threshold_set_estimate = 1);

struct ThresholdSample {
  std::optional<Assignment> point;  // empty when the draw budget ran out
  std::int64_t scaled_value = 0;
  std::uint64_t raw_draws = 0;
};

// Uniform sampler on T = {x : H(x) <= (1 - eta) h_min} by rejection from
// uniform points of the cube. The membership test is exact.
class ThresholdSampler {
 public:
  ThresholdSampler(const Kernel& kernel, const Rational& h_min, const Rational& eta);

  std::int64_t scaled_limit() const { return limit_; }
  ThresholdSample draw(RngStream& rng, std::uint64_t max_draws) const;

 private:
  const Kernel* kernel_;
  std::int64_t limit_;
};

ThresholdSample rejection_sample_threshold(const Instance& inst, const Rational& h_min, const Rational& eta,
                                           RngStream& rng, std::optional<std::uint64_t> max_draws = std::nullopt);

// Flips each coordinate of x_star independently with probability q.
Assignment correlated_sample(const Assignment& x_star, const Rational& q, RngStream& rng);
Assignment correlated_sample(const Assignment& x_star, double q, RngStream& rng);

// |d_H(x, x_star) - q_{eta,n} n| <= n^{2/3}
bool in_typical_shell(const Assignment& x, const Assignment& x_star, const Rational& eta, std::size_t k);

struct BallSpec {
  Assignment center;
  std::size_t radius = 0;
  // 0-based coordinates that may be flipped; empty optional means all.
  std::optional<std::vector<std::uint32_t>> allowed;
};

// sum_{j <= r} C(|allowed|, j)
BigInt ball_size(const BallSpec& spec);
BigInt ball_size(std::size_t coords, std::size_t radius);

// Called once per ball point with the coordinates flipped since the
// previous call (all of them relative to the center on the first call).
// Returning false stops the enumeration.
using BallVisitor = std::function<bool(const Assignment& point, std::span<const std::uint32_t> flipped)>;

// Layers by increasing distance; inside a layer, revolving-door order over
// the allowed coordinates, so consecutive points differ in two coordinates.
// Returns the number of points visited.
std::uint64_t enumerate_ball(const BallSpec& spec, const BallVisitor& visit);
// A single distance layer, starting from the center.
std::uint64_t enumerate_layer(const BallSpec& spec, std::size_t distance, const BallVisitor& visit);

struct BallSearchResult {
  Assignment best;
  std::int64_t scaled_value = 0;
  std::uint64_t points = 0;
  bool reached_target = false;  // stopped early on a point with value <= target
  bool truncated = false;       // stopped by max_points
};

struct BallSearchOptions {
  std::optional<std::int64_t> stop_at_or_below;  // scaled target
  std::uint64_t max_points = UINT64_MAX;
  unsigned workers = 1;  // layers in parallel; ignored when a target is set
};

// Exact minimum of H over the ball with incremental evaluation; ties go to
// the lexicographically smallest point.
BallSearchResult ball_search_min(const Kernel& kernel, const BallSpec& spec, const BallSearchOptions& options = {});

struct BallMinimum {
  Assignment best;
  Rational value;
};
BallMinimum ball_search_min(const Instance& inst, const BallSpec& spec);

// {i : d_i <= 2 d_avg}
std::vector<std::uint32_t> light_coords(const InstanceStats& stats);

}  // namespace spx
