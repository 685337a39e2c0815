#include "spx/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <mutex>
#include <thread>

#include "spx/exponents.hpp"

namespace spx {

std::uint64_t default_draw_budget(std::size_t n, std::uint64_t threshold_set_estimate) {
  const std::uint64_t est = std::max<std::uint64_t>(1, threshold_set_estimate);
  if (n + 6 >= 64) {
    const unsigned __int128 v = (static_cast<unsigned __int128>(1) << std::min<std::size_t>(n + 6, 127)) / est;
    return v > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(v);
  }
  return (std::uint64_t{64} << n) / est;
}

ThresholdSampler::ThresholdSampler(const Kernel& kernel, const Rational& h_min, const Rational& eta)
    : kernel_(&kernel), limit_(kernel.scaled_floor((1 - eta) * h_min)) {
  if (h_min >= 0) throw DegenerateInstance("threshold sampling needs H_min < 0");
  if (eta <= 0 || eta >= 1) throw std::invalid_argument("eta must lie in (0, 1)");
}

ThresholdSample ThresholdSampler::draw(RngStream& rng, std::uint64_t max_draws) const {
  ThresholdSample out;
  while (out.raw_draws < max_draws) {
    Assignment x = rng.uniform_assignment(kernel_->n());
    ++out.raw_draws;
    const std::int64_t v = kernel_->evaluate(x);
    if (v <= limit_) {
      out.point = std::move(x);
      out.scaled_value = v;
      break;
    }
  }
  return out;
}

ThresholdSample rejection_sample_threshold(const Instance& inst, const Rational& h_min, const Rational& eta,
                                           RngStream& rng, std::optional<std::uint64_t> max_draws) {
  const Kernel kernel(inst);
  const ThresholdSampler sampler(kernel, h_min, eta);
  return sampler.draw(rng, max_draws.value_or(default_draw_budget(kernel.n())));
}

Assignment correlated_sample(const Assignment& x_star, const Rational& q, RngStream& rng) {
  if (q < 0 || q > Rational(1, 2)) throw std::invalid_argument("flip probability must lie in [0, 1/2]");
  Assignment x = x_star;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (rng.bernoulli(q)) x.flip(i);
  }
  return x;
}

Assignment correlated_sample(const Assignment& x_star, double q, RngStream& rng) {
  if (!(q >= 0.0 && q <= 0.5)) throw std::invalid_argument("flip probability must lie in [0, 1/2]");
  Assignment x = x_star;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (rng.bernoulli(q)) x.flip(i);
  }
  return x;
}

bool in_typical_shell(const Assignment& x, const Assignment& x_star, const Rational& eta, std::size_t k) {
  const std::size_t n = x.size();
  const auto rates = flip_rates(eta, k, n);
  const double d = static_cast<double>(hamming_distance(x, x_star));
  const double cube = std::cbrt(static_cast<double>(n));
  return std::abs(d - rates.q_eta_n * static_cast<double>(n)) <= cube * cube;
}

BigInt ball_size(std::size_t coords, std::size_t radius) {
  BigInt total = 0;
  for (std::size_t j = 0; j <= std::min(radius, coords); ++j) {
    BigInt c;
    mpz_bin_uiui(c.get_mpz_t(), coords, j);
    total += c;
  }
  return total;
}

namespace {

std::vector<std::uint32_t> resolve_coords(const BallSpec& spec) {
  const std::size_t n = spec.center.size();
  if (!spec.allowed) {
    std::vector<std::uint32_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<std::uint32_t>(i);
    return all;
  }
  std::vector<std::uint32_t> coords = *spec.allowed;
  std::sort(coords.begin(), coords.end());
  if (std::adjacent_find(coords.begin(), coords.end()) != coords.end()) {
    throw std::invalid_argument("ball coordinates must be distinct");
  }
  if (!coords.empty() && coords.back() >= n) throw std::invalid_argument("ball coordinate out of range");
  return coords;
}

// Revolving-door walk over subsets of `coords`. Toggles are buffered and
// reduced to the net change at each emitted point.
template <typename Visit>
class BallWalker {
 public:
  BallWalker(Assignment center, std::vector<std::uint32_t> coords, Visit& visit)
      : point_(std::move(center)), coords_(std::move(coords)), mark_(coords_.size(), 0), visit_(visit) {}

  void layer(std::size_t t) {
    if (t <= coords_.size() && !stopped_) walk(coords_.size(), t, false);
  }
  std::uint64_t count() const { return count_; }

 private:
  void toggle(std::size_t pos) {
    point_.flip(coords_[pos]);
    if (!mark_[pos]) pending_.push_back(static_cast<std::uint32_t>(pos));
    mark_[pos] ^= 1;
  }

  void emit() {
    flips_.clear();
    for (auto pos : pending_) {
      if (mark_[pos]) {
        flips_.push_back(coords_[pos]);
        mark_[pos] = 0;
      }
    }
    pending_.clear();
    ++count_;
    if (!visit_(point_, std::span<const std::uint32_t>(flips_))) stopped_ = true;
  }

  // R(n,t) = R(n-1,t), then R(n-1,t-1) reversed with element n-1 added.
  void walk(std::size_t n, std::size_t t, bool reversed) {
    if (stopped_) return;
    if (t == 0) {
      emit();
      return;
    }
    if (t == n) {
      for (std::size_t i = 0; i < n; ++i) toggle(i);
      emit();
      for (std::size_t i = 0; i < n; ++i) toggle(i);
      return;
    }
    if (!reversed) {
      walk(n - 1, t, false);
      toggle(n - 1);
      walk(n - 1, t - 1, true);
      toggle(n - 1);
    } else {
      toggle(n - 1);
      walk(n - 1, t - 1, false);
      toggle(n - 1);
      walk(n - 1, t, true);
    }
  }

  Assignment point_;
  std::vector<std::uint32_t> coords_;
  std::vector<std::uint8_t> mark_;
  std::vector<std::uint32_t> pending_;
  std::vector<std::uint32_t> flips_;
  Visit& visit_;
  std::uint64_t count_ = 0;
  bool stopped_ = false;

 public:
  bool stopped() const { return stopped_; }
};

template <typename Visit>
std::uint64_t walk_layers(const BallSpec& spec, std::size_t first, std::size_t last, Visit& visit) {
  BallWalker<Visit> walker(spec.center, resolve_coords(spec), visit);
  for (std::size_t t = first; t <= last && !walker.stopped(); ++t) walker.layer(t);
  return walker.count();
}

}  // namespace

BigInt ball_size(const BallSpec& spec) {
  return ball_size(spec.allowed ? spec.allowed->size() : spec.center.size(), spec.radius);
}

std::uint64_t enumerate_ball(const BallSpec& spec, const BallVisitor& visit) {
  auto v = [&](const Assignment& x, std::span<const std::uint32_t> f) { return visit(x, f); };
  return walk_layers(spec, 0, spec.radius, v);
}

std::uint64_t enumerate_layer(const BallSpec& spec, std::size_t distance, const BallVisitor& visit) {
  auto v = [&](const Assignment& x, std::span<const std::uint32_t> f) { return visit(x, f); };
  return walk_layers(spec, distance, distance, v);
}

namespace {

BallSearchResult search_layers(const Kernel& kernel, const BallSpec& spec, std::size_t first, std::size_t last,
                               const BallSearchOptions& options) {
  BallSearchResult res;
  KernelState st(kernel, spec.center);
  res.scaled_value = INT64_MAX;
  auto visit = [&](const Assignment& x, std::span<const std::uint32_t> flipped) {
    for (auto i : flipped) st.flip(i);
    ++res.points;
    const std::int64_t v = st.value();
    if (v < res.scaled_value || (v == res.scaled_value && x < res.best)) {
      res.scaled_value = v;
      res.best = x;
    }
    if (options.stop_at_or_below && v <= *options.stop_at_or_below) {
      res.reached_target = true;
      return false;
    }
    if (res.points >= options.max_points) {
      res.truncated = true;
      return false;
    }
    return true;
  };
  walk_layers(spec, first, last, visit);
  return res;
}

}  // namespace

BallSearchResult ball_search_min(const Kernel& kernel, const BallSpec& spec, const BallSearchOptions& options) {
  if (spec.center.size() != kernel.n()) throw std::invalid_argument("ball center has wrong dimension");
  const std::size_t coords = spec.allowed ? spec.allowed->size() : spec.center.size();
  const std::size_t radius = std::min(spec.radius, coords);
  const bool parallel = options.workers > 1 && !options.stop_at_or_below && options.max_points == UINT64_MAX && radius > 0;
  if (!parallel) return search_layers(kernel, spec, 0, radius, options);

  std::vector<BallSearchResult> parts(radius + 1);
  std::vector<std::thread> pool;
  std::size_t next = 0;
  std::mutex lock;
  const unsigned threads = std::min<unsigned>(options.workers, static_cast<unsigned>(radius + 1));
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t layer;
        {
          std::lock_guard<std::mutex> g(lock);
          if (next > radius) return;
          layer = next++;
        }
        parts[layer] = search_layers(kernel, spec, layer, layer, options);
      }
    });
  }
  for (auto& t : pool) t.join();
  BallSearchResult res = parts[0];
  for (std::size_t j = 1; j <= radius; ++j) {
    res.points += parts[j].points;
    if (parts[j].scaled_value < res.scaled_value ||
        (parts[j].scaled_value == res.scaled_value && parts[j].best < res.best)) {
      res.scaled_value = parts[j].scaled_value;
      res.best = parts[j].best;
    }
  }
  return res;
}

BallMinimum ball_search_min(const Instance& inst, const BallSpec& spec) {
  const Kernel kernel(inst);
  const auto res = ball_search_min(kernel, spec);
  return BallMinimum{res.best, kernel.to_rational(res.scaled_value)};
}

std::vector<std::uint32_t> light_coords(const InstanceStats& stats) { return stats.light_set; }

}  // namespace spx
