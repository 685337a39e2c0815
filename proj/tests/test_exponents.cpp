#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spx/exponents.hpp"
#include "spx/oracle.hpp"
#include "support.hpp"

using namespace spx;
using spx::test::frac;

namespace {

// Three variables, m clauses all on (x1,x2,x3), none violated by (+,+,+):
// every degree is m, so D = 1, and H_min = -m.
CspInstance regular_sat(std::size_t m) {
  std::vector<Constraint> cs;
  for (std::size_t j = 0; j < m; ++j) {
    cs.push_back(Constraint{{0, 1, 2}, 1, TruthTable::all_but(3, static_cast<std::uint32_t>(1 + j % 7))});
  }
  return CspInstance::create(3, 3, std::move(cs));
}

}  // namespace

TEST_CASE("binary_entropy") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(std::abs(binary_entropy(0.25) - 0.8112781244591328) < 1e-12);
  CHECK_THROWS_AS(binary_entropy(-0.1), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.5), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(std::nan("")), std::domain_error);
  // Tiny arguments keep full relative precision.
  const double t = 1e-12;
  const double ref = (-t * std::log(t) + t - t * t / 2) / std::numbers::ln2;
  CHECK(std::abs(binary_entropy(t) - ref) / ref < 1e-12);

  double prev = -1;
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 20000.0;
    const double h = binary_entropy(x);
    CHECK(std::abs(h - binary_entropy(1 - x)) < 1e-12);
    CHECK(h >= 2 * x - 1e-12);
    CHECK(h >= prev - 1e-12);
    prev = h;
  }
}

TEST_CASE("flip_rates") {
  CHECK(flip_rates(frac(1, 2), 1, 10).q_eta == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(flip_rates(frac(1, 2), 3, 10).q_eta - (1 - std::cbrt(0.5)) / 2) < 1e-15);
  CHECK(std::abs(flip_rates(frac(1, 2), 3, 10).q_eta - 0.10315) < 1e-6);
  CHECK(flip_rates(frac(1, 2), 3, 1000).r_ns == 304);
  CHECK_THROWS_AS(flip_rates(Rational(0), 3, 10), std::domain_error);
  CHECK_THROWS_AS(flip_rates(Rational(1), 3, 10), std::domain_error);
  CHECK_THROWS_AS(flip_rates(frac(1, 2), 0, 10), std::domain_error);
  for (int e = 1; e < 64; ++e) {
    for (std::size_t k = 1; k <= 12; ++k) {
      const Rational eta = frac(e, 64);
      const auto r = flip_rates(eta, k, 50);
      CHECK(r.q_eta >= to_double(eta) / (2.0 * static_cast<double>(k)) - 1e-15);
      CHECK(r.q_eta_n < r.q_eta);
    }
  }
}

TEST_CASE("lipschitz_params") {
  const auto inst = regular_sat(12);
  const auto st = compute_stats(inst);
  CHECK(st.D == 1);
  CHECK(st.Lambda_max == 8);
  const auto lp = lipschitz_params(st, -12, frac(1, 2));
  CHECK(lp.theta == frac(1, 48));
  CHECK(lp.theta >= frac(1, 2) / (st.Lambda_max * 3) * (Rational(12) / st.W));

  InstanceStats wide = st;
  wide.n = 96;
  CHECK(lipschitz_params(wide, -12, frac(1, 2)).r_lip == 1);
  CHECK(lipschitz_params(st, -12, frac(1, 1000000)).r_lip == 0);
  CHECK_THROWS_AS(lipschitz_params(st, 0, frac(1, 2)), DegenerateInstance);
}

TEST_CASE("mcdiarmid_gamma") {
  const auto st = compute_stats(regular_sat(9));
  const double g = mcdiarmid_gamma(st, -9, frac(1, 2));
  CHECK(std::abs(g - 0.5 / std::numbers::ln2 / 576.0) < 1e-15);
  CHECK(std::abs(g - 0.0012524) < 1e-7);
  CHECK(mcdiarmid_gamma(st, -9, frac(999999, 1000000)) < 1e-12);
  CHECK_THROWS_AS(mcdiarmid_gamma(st, 0, frac(1, 2)), DegenerateInstance);

  // Doubling every weight leaves gamma unchanged.
  std::vector<Constraint> doubled = regular_sat(9).constraints();
  for (auto& c : doubled) c.weight *= 2;
  const auto st2 = compute_stats(CspInstance::create(3, 3, doubled));
  CHECK(mcdiarmid_gamma(st2, -18, frac(1, 2)) == g);
}

TEST_CASE("classical_exponent_case1") {
  const auto rep = classical_exponent_case1(1.0, frac(1, 2), 1);
  CHECK(std::abs(rep.c_cl - 0.8112781244591328) < 1e-12);
  CHECK(rep.regime == "correlated-pair");
  CHECK(classical_exponent_case1(0.01, frac(1, 2), 3).c_cl == 0.01);
  CHECK_THROWS(classical_exponent_case1(0.0, frac(1, 2), 3));
  for (int gi = 1; gi <= 5; ++gi) {
    for (int ei = 1; ei <= 5; ++ei) {
      for (std::size_t k = 1; k <= 4; ++k) {
        const double gamma = gi / 5.0;
        const Rational eta = frac(ei, 6);
        const auto r = classical_exponent_case1(gamma, eta, k, 100);
        CHECK(r.c_cl >= gamma * to_double(eta) / static_cast<double>(k) - 1e-12);
        CHECK(r.c_cl >= r.lower_bound - 1e-12);
        CHECK(r.r_ns);
      }
    }
  }
}

TEST_CASE("classical_exponent_case2") {
  const auto inst = regular_sat(12);
  const auto st = compute_stats(inst);
  const auto rep = classical_exponent_case2(st, -12);
  CHECK(std::abs(rep.gamma - 0.0012524) < 1e-7);
  CHECK(std::abs(rep.kappa - binary_entropy(1.0 / 48) / 2) < 1e-15);
  CHECK(std::abs(rep.kappa - 0.0730471) < 1e-6);
  CHECK(rep.c_cl == rep.gamma);
  CHECK(rep.c_cl >= rep.lower_bound * (1 - 1e-12));
  CHECK(*rep.theta_eta == frac(1, 48));
  CHECK(std::abs(rep.lower_bound * 64 * 9 - 1 / (2 * std::numbers::ln2)) < 1e-12);

  // One constraint of weight W with h_min = -W: scale invariant.
  auto single = [](Rational w) {
    return CspInstance::create(3, 3, {Constraint{{0, 1, 2}, w, TruthTable::all_but(3, 5)}});
  };
  const auto a = classical_exponent_case2(compute_stats(single(1)), -1);
  const auto b = classical_exponent_case2(compute_stats(single(frac(7, 3))), -frac(7, 3));
  CHECK(a.c_cl == b.c_cl);
  CHECK(a.kappa == b.kappa);
  CHECK(a.c_q == b.c_q);
  CHECK(*a.theta_eta == *b.theta_eta);

  const auto j = report_to_json(rep);
  for (const char* key : {"eta", "regime", "gamma", "kappa", "c_cl", "c_q", "ratio", "q_eta", "r_ns", "theta_eta", "r_lip"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["theta_eta"] == "1/48");
}

TEST_CASE("quantum_comparison") {
  const auto a = quantum_comparison_lin2(1.0, Rational(1), 1, 1.0);
  CHECK(std::abs(a.c_q - 0.1856) < 1e-4);
  CHECK(std::abs(a.c_q - 1 / (2 * (2 + std::numbers::ln2))) < 1e-15);
  const auto b = quantum_comparison_csp(1.0, 3, 1.0, 1.0);
  CHECK(std::abs(b.c_q - 0.0578 / (512.0 * 27.0)) < 1e-18);
  CHECK(std::abs(b.c_q - 4.181e-6) < 1e-9);

  RngStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double gamma = (1 + rng.below(1000)) / 1000.0;
    const Rational eta = frac(static_cast<long>(1 + rng.below(99)), 100);
    const std::size_t k = 1 + rng.below(10);
    CHECK(classical_exponent_case1(gamma, eta, k).ratio > 1.0);
    const double delta = (1 + rng.below(1000)) / 1000.0;
    const double D = 1.0 + rng.unit() * 10.0;
    const double kk = static_cast<double>(k);
    const double floor_c = delta * delta / (2 * std::numbers::ln2 * std::ldexp(1.0, 2 * static_cast<int>(k)) * kk * kk * D);
    CHECK(quantum_comparison_csp(delta, k, D, floor_c).ratio > 1.0);
  }
}

TEST_CASE("verify_binomial_bounds") {
  const auto ten = verify_binomial_bounds(10, frac(1, 2));
  CHECK(ten.r == 5);
  CHECK(ten.pass());
  CHECK(std::abs(ten.rounded_margin - (std::log2(252.0) - std::log2(1024.0 / (std::numbers::e * 110.0)))) < 1e-6);
  const auto zero = verify_binomial_bounds(37, Rational(0));
  CHECK(zero.r == 0);
  CHECK(zero.pass());
  const auto hundred = verify_binomial_bounds(100, frac(1, 4));
  CHECK(hundred.pass());
  CHECK(hundred.rounded_margin > 0);
  CHECK(hundred.layer_margin > 0);
  CHECK_THROWS(verify_binomial_bounds(10, frac(3, 4)));
  CHECK_THROWS(verify_binomial_bounds(0, frac(1, 4)));
  for (std::uint64_t N = 1; N <= 200; ++N) {
    for (long i = 0; i <= 32; ++i) REQUIRE(verify_binomial_bounds(N, frac(i, 64)).pass());
  }
}
