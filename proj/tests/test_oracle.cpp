#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spx/kernel.hpp"
#include "spx/oracle.hpp"
#include "support.hpp"

using namespace spx;
using spx::test::point;

namespace {

Lin2Instance pair_instance() { return Lin2Instance::create(2, 2, {{{0, 1}, Rational(-1)}}); }

}  // namespace

TEST_CASE("kernel agrees with exact evaluation") {
  RngStream rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng.below(9);
    Instance inst;
    if (trial % 2 == 0) {
      inst = spx::test::random_csp(n, 3, 1 + rng.below(15), rng.next(), true);
    } else {
      inst = spx::test::random_lin2(n, 1 + rng.below(3), 1 + rng.below(n), rng.next());
    }
    const Kernel kernel(inst);
    const auto naive = spx::test::naive_values(inst);
    KernelState st(kernel, Assignment(n));
    for (std::uint64_t m = 0; m < naive.size(); ++m) {
      REQUIRE(kernel.to_rational(kernel.evaluate(point(n, m))) == naive[m]);
    }
    // Random flip walk keeps the incremental value exact.
    for (int step = 0; step < 200; ++step) {
      st.flip(rng.below(n));
      REQUIRE(kernel.to_rational(st.value()) == naive[st.point().mask()]);
    }
  }
}

TEST_CASE("kernel range guard and scaled threshold") {
  const Rational huge(BigInt(1) << 62);
  CHECK_THROWS_AS(Kernel(Lin2Instance::create(2, 1, {{{0}, huge}})), std::overflow_error);
  const Kernel k(Lin2Instance::create(2, 1, {{{0}, Rational(1, 3)}, {{1}, Rational(1, 2)}}));
  CHECK(k.scale() == 6);
  CHECK(k.scaled_floor(Rational(-1, 4)) == -2);  // -1/4 * 6 = -1.5
  CHECK(k.to_rational(-3) == Rational(-1, 2));
}

TEST_CASE("brute_force_minimum examples") {
  const auto r = brute_force_minimum(pair_instance());
  CHECK(r.h_min == -1);
  CHECK(r.minimizer_count == 2);
  REQUIRE(r.minimizers.size() == 2);
  CHECK(r.minimizers[0] == point(2, 0b00));
  CHECK(r.minimizers[1] == point(2, 0b11));

  const auto empty = brute_force_minimum(CspInstance::create(5, 3, {}));
  CHECK(empty.h_min == 0);
  CHECK(empty.minimizer_count == 32);

  Assignment planted;
  const auto inst = spx::test::planted_csp(12, 3, 50, 17, PredicateFamily::kSat, false, &planted);
  const auto pr = brute_force_minimum(inst);
  CHECK(pr.h_min == -inst.total_weight());
  CHECK(std::find(pr.minimizers.begin(), pr.minimizers.end(), planted) != pr.minimizers.end());

  CHECK_THROWS_AS(brute_force_minimum(Lin2Instance::create(31, 1, {{{0}, Rational(1)}})), OracleTooLarge);
}

TEST_CASE("brute_force_minimum matches naive enumeration for any worker count") {
  RngStream rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + rng.below(9);
    Instance inst;
    if (trial % 2 == 0) {
      inst = spx::test::random_csp(n, 3, 2 + rng.below(20), rng.next(), trial % 4 == 0);
    } else {
      inst = spx::test::random_lin2(n, 2, 1 + rng.below(n), rng.next());
    }
    const auto naive = spx::test::naive_min(inst);
    OracleOptions opt;
    opt.cap_minimizers = 3;
    opt.histogram = true;
    const auto one = brute_force_minimum(inst, opt);
    opt.workers = 5;
    const auto many = brute_force_minimum(inst, opt);
    CHECK(one.h_min == naive.h_min);
    CHECK(one.minimizer_count == naive.minimizers.size());
    std::vector<Assignment> expect;
    for (auto m : naive.minimizers) expect.push_back(point(n, m));
    std::sort(expect.begin(), expect.end());
    expect.resize(std::min<std::size_t>(3, expect.size()));
    CHECK(one.minimizers == expect);
    CHECK(many.minimizers == one.minimizers);
    CHECK(many.minimizer_count == one.minimizer_count);
    CHECK(*many.histogram == *one.histogram);
    std::uint64_t total = 0;
    for (const auto& [v, c] : *one.histogram) total += c;
    CHECK(total == (std::uint64_t{1} << n));
  }
}

TEST_CASE("parallel blocks on a larger cube") {
  const auto inst = spx::test::random_csp(18, 3, 60, 4);
  OracleOptions opt;
  const auto a = brute_force_minimum(inst, opt);
  opt.workers = 7;
  const auto b = brute_force_minimum(inst, opt);
  CHECK(a.h_min == b.h_min);
  CHECK(a.minimizers == b.minimizers);
  CHECK(threshold_set_count(inst, a.h_min, Rational(1, 2), 1) == threshold_set_count(inst, a.h_min, Rational(1, 2), 6));
  const Kernel kernel(inst);
  CHECK(value_table(kernel, 1) == value_table(kernel, 4));
}

TEST_CASE("threshold_set_count") {
  CHECK(threshold_set_count(pair_instance(), -1, Rational(1, 2)) == 2);
  CHECK_THROWS_AS(threshold_set_count(Lin2Instance::create(3, 2, {}), 0, Rational(1, 2)), DegenerateInstance);
  CHECK_THROWS_AS(threshold_set_count(pair_instance(), -1, Rational(1)), std::invalid_argument);

  RngStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng.below(7);
    const auto inst = spx::test::random_csp(n, 3, 3 + rng.below(20), rng.next(), true);
    const auto naive = spx::test::naive_min(inst);
    if (naive.h_min == 0) continue;
    const auto vals = spx::test::naive_values(inst);
    for (const Rational eta : {Rational(1, 1000), Rational(1, 3), Rational(1, 2), Rational(999, 1000)}) {
      std::uint64_t expect = 0;
      for (const auto& v : vals) expect += v <= (1 - eta) * naive.h_min;
      CHECK(threshold_set_count(inst, naive.h_min, eta) == expect);
    }
    CHECK(threshold_set_count(inst, naive.h_min, Rational(999, 1000)) >=
          threshold_set_count(inst, naive.h_min, Rational(1, 1000)));
  }
}

TEST_CASE("exact_correlated_expectation") {
  const auto pair = pair_instance();
  const auto star = point(2, 0);
  CHECK(exact_correlated_expectation(pair, star, 0).closed_form == -1);
  CHECK(*exact_correlated_expectation(pair, star, 0).enumerated == -1);
  CHECK(exact_correlated_expectation(pair, star, Rational(1, 2)).closed_form == 0);
  CHECK(*exact_correlated_expectation(pair, star, Rational(1, 2)).enumerated == 0);
  const auto quarter = exact_correlated_expectation(pair, star, Rational(1, 4));
  CHECK(quarter.closed_form == Rational(-1, 4));
  CHECK(*quarter.enumerated == Rational(-1, 4));
  CHECK_THROWS(exact_correlated_expectation(pair, star, Rational(3, 4)));

  RngStream rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 4 + rng.below(13);
    const auto inst = spx::test::random_lin2(n, 1 + rng.below(3), 1 + rng.below(2 * n), rng.next());
    const auto x = rng.uniform_assignment(n);
    const Rational q = spx::test::frac(static_cast<long>(rng.below(9)), 16);
    const auto e = exact_correlated_expectation(inst, x, q);
    REQUIRE(e.enumerated);
    CHECK(e.closed_form == *e.enumerated);
  }
  const auto wide = spx::test::random_lin2(24, 2, 30, 5);
  CHECK(!exact_correlated_expectation(wide, Assignment(24), Rational(1, 8)).enumerated);
}

TEST_CASE("exact_landing_probability") {
  const auto pair = pair_instance();
  CHECK(exact_landing_probability(pair, point(2, 0), 0, Rational(1, 2)) == 1);
  CHECK(exact_landing_probability(pair, point(2, 0), Rational(1, 4), Rational(1, 2)) == Rational(5, 8));
  CHECK_THROWS_AS(exact_landing_probability(spx::test::random_lin2(21, 2, 5, 1), Assignment(21), 0, Rational(1, 2)),
                  OracleTooLarge);

  RngStream rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.below(9);
    const auto inst = spx::test::random_lin2(n, 1 + rng.below(3), 1 + rng.below(2 * n), rng.next());
    const auto naive = spx::test::naive_min(inst);
    const auto star = point(n, naive.minimizers.front());
    const Rational q = spx::test::frac(static_cast<long>(rng.below(9)), 16);
    const Rational eta = spx::test::frac(static_cast<long>(1 + rng.below(7)), 8);
    // Reference: sum over every flip pattern t of its probability.
    Rational expect = 0;
    for (std::uint64_t t = 0; t < (std::uint64_t{1} << n); ++t) {
      if (evaluate_lin2(inst, hadamard(star, point(n, t))) > (1 - eta) * naive.h_min) continue;
      Rational p = 1;
      for (std::size_t i = 0; i < n; ++i) p *= ((t >> i) & 1U) ? q : Rational(1 - q);
      expect += p;
    }
    CHECK(exact_landing_probability(inst, star, q, eta) == expect);
  }
}
