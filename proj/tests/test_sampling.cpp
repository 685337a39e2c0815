#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "spx/exponents.hpp"
#include "spx/oracle.hpp"
#include "spx/sampling.hpp"
#include "support.hpp"

using namespace spx;
using spx::test::frac;
using spx::test::point;

namespace {

// Upper 0.001 quantile of chi-square (Wilson-Hilferty).
double chi2_crit(double df) {
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1 - a + 3.090232 * std::sqrt(a), 3);
}

std::uint64_t ball_mask_ok(std::uint64_t center, std::uint64_t m, std::size_t r, std::uint64_t allowed) {
  const std::uint64_t d = center ^ m;
  return (d & ~allowed) == 0 && static_cast<std::size_t>(std::popcount(d)) <= r;
}

}  // namespace

TEST_CASE("default_draw_budget") {
  CHECK(default_draw_budget(10) == 64 * 1024);
  CHECK(default_draw_budget(10, 0) == 64 * 1024);
  CHECK(default_draw_budget(10, 16) == 4 * 1024);
  CHECK(default_draw_budget(70) == UINT64_MAX);
}

TEST_CASE("rejection sampling: two minimizers") {
  const Instance inst = Lin2Instance::create(2, 2, {Monomial{{0, 1}, -1}});
  RngStream rng(1);
  std::map<std::uint64_t, int> counts;
  for (int i = 0; i < 10000; ++i) {
    auto s = rejection_sample_threshold(inst, -1, frac(1, 2), rng);
    REQUIRE(s.point);
    counts[s.point->mask()]++;
  }
  CHECK(counts.size() == 2);
  CHECK(counts.count(0b00) == 1);
  CHECK(counts.count(0b11) == 1);
  const double d = counts[0] - 5000.0;
  CHECK(2 * d * d / 5000.0 < chi2_crit(1));
}

TEST_CASE("rejection sampling: half cube and empty budget") {
  // H = x1: T is the half-cube x1 = -1.
  const Instance inst = Lin2Instance::create(3, 1, {Monomial{{0}, 1}});
  RngStream rng(2);
  int first = 0;
  for (int i = 0; i < 200; ++i) {
    auto s = rejection_sample_threshold(inst, -1, frac(1, 2), rng);
    REQUIRE(s.point);
    CHECK(s.point->negative(0));
    first += s.raw_draws == 1;
  }
  CHECK(first > 50);
  CHECK(first < 150);

  const Instance dense = Lin2Instance::create(3, 3, {Monomial{{0, 1, 2}, frac(1, 2)}});
  auto none = rejection_sample_threshold(dense, frac(-1, 2), frac(1, 2), rng, 0);
  CHECK_FALSE(none.point);
  CHECK(none.raw_draws == 0);
}

TEST_CASE("rejection sampling: uniform on the threshold set") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Instance inst = spx::test::random_lin2(8, 2, 10, seed);
    const auto nm = spx::test::naive_min(inst);
    const Rational eta = frac(1, 2);
    const Rational limit = (1 - eta) * nm.h_min;
    const auto vals = spx::test::naive_values(inst);
    std::set<std::uint64_t> T;
    for (std::uint64_t m = 0; m < vals.size(); ++m) {
      if (vals[m] <= limit) T.insert(m);
    }
    REQUIRE(T.size() >= 2);
    RngStream rng(seed, 7);
    std::map<std::uint64_t, int> counts;
    const int draws = 400 * static_cast<int>(T.size());
    for (int i = 0; i < draws; ++i) {
      auto s = rejection_sample_threshold(inst, nm.h_min, eta, rng);
      REQUIRE(s.point);
      REQUIRE(T.count(s.point->mask()) == 1);
      counts[s.point->mask()]++;
    }
    const double expect = static_cast<double>(draws) / static_cast<double>(T.size());
    double chi = 0;
    for (auto m : T) {
      const double d = counts[m] - expect;
      chi += d * d / expect;
    }
    CHECK(chi < chi2_crit(static_cast<double>(T.size() - 1)));
  }
}

TEST_CASE("rejection sampling: mean raw draws") {
  const Instance inst = spx::test::random_lin2(16, 3, 40, 11);
  const auto orc = brute_force_minimum(inst);
  const Rational eta = frac(1, 2);
  const std::uint64_t t = threshold_set_count(inst, orc.h_min, eta);
  const Kernel kernel(inst);
  const ThresholdSampler sampler(kernel, orc.h_min, eta);
  RngStream rng(3);
  double sum = 0;
  for (int i = 0; i < 1000; ++i) {
    auto s = sampler.draw(rng, UINT64_MAX);
    REQUIRE(s.point);
    REQUIRE(kernel.evaluate(*s.point) == s.scaled_value);
    sum += static_cast<double>(s.raw_draws);
  }
  const double p = static_cast<double>(t) / 65536.0;
  const double sigma = std::sqrt((1 - p) / (p * p) / 1000.0);
  CHECK(std::abs(sum / 1000.0 - 1 / p) <= 3 * sigma);
}

TEST_CASE("correlated_sample") {
  RngStream rng(4);
  const Assignment x = point(16, 0xBEEF);
  CHECK(correlated_sample(x, Rational(0), rng) == x);
  CHECK(correlated_sample(x, 0.0, rng) == x);

  std::vector<int> flips(16, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto y = correlated_sample(x, frac(1, 2), rng);
    for (std::size_t c = 0; c < 16; ++c) flips[c] += y.negative(c) != x.negative(c);
  }
  for (int f : flips) CHECK(std::abs(f - 10000) < 4 * 71);
  CHECK_THROWS(correlated_sample(x, frac(3, 4), rng));

  const auto lin2 = spx::test::random_lin2(16, 2, 30, 5);
  const auto orc = brute_force_minimum(Instance(lin2));
  const Assignment& xs = orc.minimizers.front();
  const Rational q = frac(1, 10);
  const auto ex = exact_correlated_expectation(lin2, xs, q);
  REQUIRE(ex.enumerated);
  CHECK(*ex.enumerated == ex.closed_form);
  const Kernel kernel(lin2);
  double s = 0, s2 = 0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    const double v = to_double(kernel.to_rational(kernel.evaluate(correlated_sample(xs, q, rng))));
    s += v;
    s2 += v * v;
  }
  const double mean = s / N;
  const double sd = std::sqrt((s2 / N - mean * mean) / N);
  CHECK(std::abs(mean - to_double(ex.closed_form)) <= 4 * sd);
}

TEST_CASE("in_typical_shell") {
  const Rational eta = frac(1, 2);
  const std::size_t n = 1000;
  const auto fr = flip_rates(eta, 3, n);
  const Assignment x(n);
  CHECK_FALSE(in_typical_shell(x, x, eta, 3));
  Assignment y(n);
  const auto centre = static_cast<std::size_t>(std::floor(fr.q_eta_n * n));
  for (std::size_t i = 0; i < centre; ++i) y.flip(i);
  CHECK(in_typical_shell(y, x, eta, 3));

  RngStream rng(6);
  int inside = 0;
  for (int i = 0; i < 10000; ++i) inside += in_typical_shell(correlated_sample(x, fr.q_eta_n, rng), x, eta, 3);
  const double bound = 1 - 2 * std::exp(-2 * std::cbrt(static_cast<double>(n)));
  CHECK(inside / 10000.0 >= bound);
}

TEST_CASE("ball_size and enumerate_ball") {
  CHECK(ball_size(4, 4) == 16);
  CHECK(ball_size(3, 2) == 7);
  CHECK(ball_size(10, 20) == 1024);

  BallSpec zero{point(6, 0b101), 0, std::nullopt};
  std::vector<Assignment> seen;
  CHECK(enumerate_ball(zero, [&](const Assignment& a, auto) { seen.push_back(a); return true; }) == 1);
  CHECK(seen == std::vector<Assignment>{zero.center});

  BallSpec spec{point(5, 0), 2, std::vector<std::uint32_t>{0, 2, 4}};
  CHECK(ball_size(spec) == 7);
  CHECK(enumerate_ball(spec, [](const Assignment&, auto) { return true; }) == 7);

  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t a = 0; a <= n; ++a) {
      std::vector<std::uint32_t> allowed;
      std::uint64_t amask = 0;
      for (std::size_t i = 0; i < a; ++i) {
        allowed.push_back(static_cast<std::uint32_t>((i * 5 + 1) % n));
      }
      std::sort(allowed.begin(), allowed.end());
      allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
      for (auto c : allowed) amask |= std::uint64_t{1} << c;
      for (std::size_t r = 0; r <= allowed.size(); ++r) {
        const std::uint64_t cmask = (0x5A5A5A5Aull * n) & ((std::uint64_t{1} << n) - 1);
        BallSpec s{point(n, cmask), r, allowed};
        std::set<std::uint64_t> pts;
        Assignment run = s.center;
        bool first = true;
        bool consistent = true;
        std::size_t max_step = 0;
        enumerate_ball(s, [&](const Assignment& p, std::span<const std::uint32_t> flipped) {
          for (auto c : flipped) run.flip(c);
          consistent = consistent && run == p;
          if (!first) max_step = std::max(max_step, flipped.size());
          first = false;
          pts.insert(p.mask());
          return true;
        });
        CHECK(consistent);
        CHECK(BigInt(static_cast<unsigned long>(pts.size())) == ball_size(s));
        for (auto m : pts) CHECK(ball_mask_ok(cmask, m, r, amask));
        // Within a layer two flips; crossing into the next layer from the
        // previous layer's last point can take more.
        CHECK(max_step <= 2 * r + 1);
      }
    }
  }

  std::uint64_t total = 0;
  BallSpec full20{Assignment(20), 20, std::nullopt};
  CHECK(enumerate_ball(full20, [&](const Assignment&, auto) { ++total; return true; }) == (1u << 20));
  CHECK(total == (1u << 20));

  std::uint64_t stopped = 0;
  enumerate_ball(full20, [&](const Assignment&, auto) { return ++stopped < 10; });
  CHECK(stopped == 10);

  BallSpec layer{Assignment(8), 8, std::nullopt};
  for (std::size_t d = 0; d <= 8; ++d) {
    std::uint64_t cnt = 0;
    bool right = true;
    enumerate_layer(layer, d, [&](const Assignment& p, auto) { right = right && p.weight() == d; ++cnt; return true; });
    CHECK(right);
    CHECK(BigInt(static_cast<unsigned long>(cnt)) == ball_size(8, d) - (d == 0 ? BigInt(0) : ball_size(8, d - 1)));
  }
}

TEST_CASE("ball_search_min matches naive re-evaluation") {
  RngStream rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng.below(7);
    const Instance inst = trial % 2 == 0
                              ? Instance(spx::test::random_lin2(n, 1 + rng.below(3), 3 + rng.below(12), 100 + trial))
                              : Instance(spx::test::random_csp(n, 3, 3 + rng.below(10), 100 + trial, true));
    const std::uint64_t cmask = rng.below(std::uint64_t{1} << n);
    std::optional<std::vector<std::uint32_t>> allowed;
    std::uint64_t amask = (std::uint64_t{1} << n) - 1;
    if (rng.below(2) == 0) {
      allowed.emplace();
      amask = 0;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (rng.below(3) != 0) {
          allowed->push_back(i);
          amask |= std::uint64_t{1} << i;
        }
      }
    }
    const std::size_t r = rng.below(n + 1);
    const BallSpec spec{point(n, cmask), r, allowed};

    const auto vals = spx::test::naive_values(inst);
    std::optional<std::uint64_t> best;
    for (std::uint64_t m = 0; m < vals.size(); ++m) {
      if (!ball_mask_ok(cmask, m, r, amask)) continue;
      if (!best || vals[m] < vals[*best] || (vals[m] == vals[*best] && point(n, m) < point(n, *best))) best = m;
    }
    const auto got = ball_search_min(inst, spec);
    CHECK(got.best == point(n, *best));
    CHECK(got.value == vals[*best]);

    const Kernel kernel(inst);
    BallSearchOptions par;
    par.workers = 4;
    const auto p = ball_search_min(kernel, spec, par);
    CHECK(p.best == got.best);
    CHECK(p.points == ball_size(spec).get_ui());
  }

  const Instance inst = spx::test::random_lin2(8, 2, 12, 9);
  const BallSpec c0{point(8, 0x33), 0, std::nullopt};
  const auto r0 = ball_search_min(inst, c0);
  CHECK(r0.best == c0.center);
  CHECK(r0.value == evaluate(inst, c0.center));
}

TEST_CASE("ball_search_min early stop") {
  Assignment planted;
  const Instance inst = spx::test::planted_csp(12, 3, 30, 4, PredicateFamily::kSat, false, &planted);
  const Kernel kernel(inst);
  Assignment c = planted;
  c.flip(1);
  c.flip(7);
  BallSearchOptions o;
  o.stop_at_or_below = kernel.evaluate(planted);
  const auto r = ball_search_min(kernel, BallSpec{c, 3, std::nullopt}, o);
  CHECK(r.reached_target);
  CHECK(r.scaled_value == kernel.evaluate(planted));

  BallSearchOptions lim;
  lim.max_points = 5;
  const auto t = ball_search_min(kernel, BallSpec{c, 3, std::nullopt}, lim);
  CHECK(t.truncated);
  CHECK(t.points == 5);
}

TEST_CASE("light_coords") {
  const auto regular = CspInstance::create(3, 3, {Constraint{{0, 1, 2}, 1, TruthTable::all_but(3, 0)}});
  CHECK(light_coords(compute_stats(regular)) == std::vector<std::uint32_t>{0, 1, 2});

  std::vector<Constraint> star;
  for (std::uint32_t j = 1; j < 20; ++j) star.push_back(Constraint{{0, j}, 1, TruthTable::all_but(2, 1)});
  const auto st = compute_stats(CspInstance::create(20, 2, star));
  const auto light = light_coords(st);
  CHECK(std::find(light.begin(), light.end(), 0u) == light.end());
  CHECK(light.size() == 19);
  CHECK(light == st.light_set);

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const std::size_t n = 3 + seed % 20;
    const auto s = compute_stats(spx::test::random_csp(n, 3, 1 + seed % 17, seed, seed % 2 == 1));
    REQUIRE(light_coords(s).size() >= (n + 1) / 2);
  }
}

TEST_CASE("local step bound on light balls") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::size_t n = 8 + seed % 7;
    const auto csp = seed % 2 ? spx::test::planted_csp(n, 3, 2 * n, seed, PredicateFamily::kSat, true)
                              : spx::test::random_csp(n, 3, 2 * n, seed, true);
    const auto st = compute_stats(csp);
    const auto orc = brute_force_minimum(Instance(csp));
    const Kernel kernel(csp);
    for (std::size_t r = 0; r <= 3; ++r) {
      const std::int64_t limit = kernel.scaled_floor(orc.h_min + 2 * st.Lambda_max * st.d_avg * r);
      bool ok = true;
      enumerate_ball(BallSpec{orc.minimizers.front(), r, st.light_set}, [&](const Assignment& p, auto) {
        ok = ok && kernel.evaluate(p) <= limit;
        return true;
      });
      CHECK(ok);
    }
  }
}

TEST_CASE("successful-set containment") {
  const Rational eta = frac(1, 2);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t n = 12 + 2 * (seed % 3);
    const std::size_t k = 1 + seed % 3;
    const auto lin2 = spx::test::random_lin2(n, k, 2 * n, seed);
    const auto orc = brute_force_minimum(Instance(lin2), OracleOptions{1 << 20, false, 1});
    const auto rates = flip_rates(eta, k, n);
    const Kernel kernel(lin2);
    const ThresholdSampler sampler(kernel, orc.h_min, eta);
    RngStream rng(seed, 13);
    for (int i = 0; i < 200; ++i) {
      auto s = sampler.draw(rng, UINT64_MAX);
      REQUIRE(s.point);
      bool near = false;
      bool typical = false;
      for (const auto& xs : orc.minimizers) {
        typical = typical || in_typical_shell(*s.point, xs, eta, k);
        near = near || hamming_distance(*s.point, xs) <= rates.r_ns;
      }
      if (typical) CHECK(near);
    }
  }
}
