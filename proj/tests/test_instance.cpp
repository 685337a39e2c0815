#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spx/assignment.hpp"
#include "spx/instance.hpp"
#include "support.hpp"

using namespace spx;
using spx::test::point;

namespace {

Constraint clause3(std::vector<std::uint32_t> vars, std::uint32_t violating, Rational w = 1) {
  return Constraint{std::move(vars), w, TruthTable::all_but(3, violating)};
}

}  // namespace

TEST_CASE("assignment basics") {
  Assignment a(5);
  CHECK(a.weight() == 0);
  a.flip(1);
  a.flip(4);
  CHECK(a.sign(1) == -1);
  CHECK(a.sign(0) == 1);
  CHECK(a.to_string() == "+-++-");
  CHECK(a.mask() == 0b10010);
  CHECK(hamming_distance(a, a) == 0);
  const Assignment b = Assignment::from_mask(5, 0b00111);
  CHECK(hamming_distance(a, b) == hamming_distance(b, a));
  CHECK(hamming_distance(a, b) == 3);
  CHECK(hadamard(a, b) == Assignment::from_mask(5, 0b10101));
  CHECK_THROWS_AS(Assignment::from_mask(3, 0b1000), std::invalid_argument);
  CHECK_THROWS(a.set_sign(0, 0));

  const std::vector<int> signs{1, -1, -1};
  CHECK(Assignment::from_signs(signs).mask() == 0b110);

  // Lexicographic order: coordinate 0 first, +1 before -1.
  CHECK(Assignment::from_mask(3, 0b010) < Assignment::from_mask(3, 0b001));
  CHECK(Assignment::from_mask(3, 0b000) < Assignment::from_mask(3, 0b100));
  CHECK(Assignment::from_mask(3, 0b011) > Assignment::from_mask(3, 0b101));

  Assignment big(130);
  big.flip(129);
  CHECK(big.weight() == 1);
  CHECK(big.negative(129));
  CHECK_THROWS(big.mask());
}

TEST_CASE("evaluate_lin2 examples") {
  const auto two = Lin2Instance::create(2, 2, {{{0, 1}, Rational(-1)}});
  CHECK(evaluate_lin2(two, point(2, 0b00)) == -1);
  CHECK(evaluate_lin2(two, point(2, 0b10)) == 1);

  const auto four = Lin2Instance::create(4, 3, {{{0, 1, 2}, Rational(2)}, {{1, 2, 3}, Rational(-1)}});
  // x = (+1,+1,-1,+1): hand expansion 2*(-1) + (-1)*(-1) = -1
  const std::vector<int> signs{1, 1, -1, 1};
  CHECK(evaluate_lin2(four, Assignment::from_signs(signs)) == -1);
  CHECK_THROWS_AS(evaluate_lin2(four, Assignment(3)), std::invalid_argument);
}

TEST_CASE("lin2 create validates and aggregates") {
  CHECK_THROWS_AS(Lin2Instance::create(3, 2, {{{0, 0}, Rational(1)}}), InvariantError);
  CHECK_THROWS_AS(Lin2Instance::create(3, 2, {{{0, 3}, Rational(1)}}), InvariantError);
  CHECK_THROWS_AS(Lin2Instance::create(3, 2, {{{0}, Rational(1)}}), InvariantError);
  const auto agg = Lin2Instance::create(3, 2, {{{1, 0}, Rational(1)}, {{0, 1}, Rational(1, 2)}, {{1, 2}, Rational(1)}});
  REQUIRE(agg.terms().size() == 2);
  CHECK(agg.terms()[0].vars == std::vector<std::uint32_t>{0, 1});
  CHECK(agg.terms()[0].coeff == Rational(3, 2));
  const auto gone = Lin2Instance::create(3, 2, {{{0, 1}, Rational(1)}, {{1, 0}, Rational(-1)}});
  CHECK(gone.trivial());
  try {
    Lin2Instance::create(4, 2, {{{0, 1}, Rational(1)}, {{2, 2}, Rational(1)}});
    FAIL("expected InvariantError");
  } catch (const InvariantError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("evaluate_csp examples") {
  const auto one = CspInstance::create(3, 3, {clause3({0, 1, 2}, 0b000)});
  CHECK(evaluate_csp(one, point(3, 0b001)) == -1);
  CHECK(evaluate_csp(one, point(3, 0b000)) == 7);

  // Two 2-clauses (s = 3): x satisfies the first and violates the second.
  const auto two = CspInstance::create(2, 2, {Constraint{{0, 1}, 1, TruthTable::all_but(2, 0b11)},
                                             Constraint{{0, 1}, 1, TruthTable::all_but(2, 0b00)}});
  CHECK(evaluate_csp(two, point(2, 0b00)) == 2);
  CHECK_THROWS_AS(evaluate_csp(two, Assignment(3)), std::invalid_argument);
}

TEST_CASE("csp create rejects invalid constraints") {
  CHECK_THROWS_AS(CspInstance::create(3, 3, {Constraint{{0, 1, 2}, 1, TruthTable(3)}}), InvariantError);
  TruthTable full(1);
  full.set(0, true);
  full.set(1, true);
  CHECK_THROWS_AS(CspInstance::create(3, 3, {Constraint{{0}, 1, full}}), InvariantError);
  CHECK_THROWS_AS(CspInstance::create(3, 3, {clause3({0, 1, 2}, 0, Rational(0))}), InvariantError);
  CHECK_THROWS_AS(CspInstance::create(3, 3, {clause3({0, 1, 1}, 0)}), InvariantError);
  CHECK_THROWS_AS(CspInstance::create(3, 2, {clause3({0, 1, 2}, 0)}), InvariantError);
  CHECK_THROWS_AS(CspInstance::create(3, 3, {Constraint{{0, 1}, 1, TruthTable::all_but(3, 0)}}), InvariantError);
}

TEST_CASE("centered_mean_check is zero") {
  CHECK(centered_mean_check(clause3({0, 1, 2}, 5)) == 0);
  TruthTable unit(1);
  unit.set(1, true);
  CHECK(centered_mean_check(Constraint{{0}, Rational(7, 3), unit}) == 0);
  CHECK(centered_mean_check(Constraint{{0, 1, 2}, Rational(5), TruthTable::parity(3, true)}) == 0);
  spx::RngStream rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = spx::test::random_csp(6, 4, 3, rng.next(), true);
    for (const auto& c : inst.constraints()) CHECK(centered_mean_check(c) == 0);
  }
}

TEST_CASE("compute_stats examples") {
  const auto single = CspInstance::create(2, 2, {Constraint{{0, 1}, 1, TruthTable::all_but(2, 0)}});
  const auto s1 = compute_stats(single);
  CHECK(s1.degrees == std::vector<Rational>{1, 1});
  CHECK(s1.Sigma == 2);
  CHECK(s1.d_avg == 1);
  CHECK(s1.D == 1);
  CHECK(s1.light_set == std::vector<std::uint32_t>{0, 1});
  CHECK(s1.Lambda_max == 4);

  const auto star = CspInstance::create(3, 2, {Constraint{{0, 1}, 1, TruthTable::all_but(2, 0)},
                                              Constraint{{0, 2}, 1, TruthTable::all_but(2, 0)}});
  const auto s2 = compute_stats(star);
  CHECK(s2.degrees == std::vector<Rational>{2, 1, 1});
  CHECK(s2.Sigma == 4);
  CHECK(s2.D == Rational(9, 8));

  // Regular: every variable in exactly two unit clauses.
  const auto ring = CspInstance::create(4, 2, {Constraint{{0, 1}, 1, TruthTable::parity(2, false)},
                                              Constraint{{1, 2}, 1, TruthTable::parity(2, false)},
                                              Constraint{{2, 3}, 1, TruthTable::parity(2, false)},
                                              Constraint{{3, 0}, 1, TruthTable::parity(2, false)}});
  CHECK(compute_stats(ring).D == 1);
  CHECK(compute_stats(ring).light_set.size() == 4);

  CHECK_THROWS_AS(compute_stats(CspInstance::create(3, 3, {})), DegenerateInstance);
}

TEST_CASE("stats invariants on random instances") {
  spx::RngStream rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(20);
    const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 5));
    const std::size_t m = 1 + rng.below(30);
    const auto inst = spx::test::random_csp(n, k, m, rng.next(), trial % 2 == 0);
    const auto st = compute_stats(inst);
    CHECK(st.D >= 1);
    CHECK(st.Sigma <= Rational(static_cast<long>(k)) * st.W);
    CHECK(2 * st.light_set.size() >= n);
  }
}

TEST_CASE("objective averages to zero over the cube") {
  spx::RngStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.below(7);
    const auto csp = spx::test::random_csp(n, 3, 1 + rng.below(12), rng.next(), true);
    const auto lin = spx::test::random_lin2(n, 1 + rng.below(3), 1 + rng.below(n), rng.next());
    Rational sum_csp = 0, sum_lin = 0;
    const Rational W = csp.total_weight();
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const Rational v = evaluate_csp(csp, point(n, m));
      CHECK(v >= -W);
      sum_csp += v;
      sum_lin += evaluate_lin2(lin, point(n, m));
    }
    CHECK(sum_csp == 0);
    CHECK(sum_lin == 0);
  }
}

TEST_CASE("lin2_of_csp_parity") {
  const auto one = CspInstance::create(2, 2, {Constraint{{0, 1}, 1, TruthTable::parity(2, false)}});
  const auto lin = lin2_of_csp_parity(one);
  REQUIRE(lin.terms().size() == 1);
  CHECK(lin.terms()[0].coeff == -1);
  for (std::uint64_t m = 0; m < 4; ++m) CHECK(evaluate_lin2(lin, point(2, m)) == evaluate_csp(one, point(2, m)));

  CHECK(lin2_of_csp_parity(CspInstance::create(3, 2, {})).trivial());

  const auto cancel = CspInstance::create(2, 2, {Constraint{{0, 1}, 2, TruthTable::parity(2, false)},
                                                Constraint{{1, 0}, 2, TruthTable::parity(2, true)}});
  CHECK(lin2_of_csp_parity(cancel).trivial());

  CHECK_THROWS_AS(lin2_of_csp_parity(CspInstance::create(3, 3, {clause3({0, 1, 2}, 0)})), InvariantError);

  spx::RngStream rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 6 + rng.below(11);
    const auto csp = spx::test::random_csp(n, 3, 10, rng.next(), true, PredicateFamily::kParity, false);
    const auto conv = lin2_of_csp_parity(csp);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); m += 1 + rng.below(3)) {
      REQUIRE(evaluate_lin2(conv, point(n, m)) == evaluate_csp(csp, point(n, m)));
    }
  }
}

TEST_CASE("truth table hex") {
  const auto t = TruthTable::from_hex(3, "fe");
  CHECK(t.popcount() == 7);
  CHECK(!t.test(0));
  CHECK(t.to_hex() == "fe");
  CHECK(TruthTable::from_hex(1, "2").to_hex() == "2");
  CHECK(TruthTable::from_hex(4, "00ff").to_hex() == "00ff");
  CHECK_THROWS(TruthTable::from_hex(2, "1f"));
  CHECK_THROWS(TruthTable::from_hex(2, "g"));
  CHECK(TruthTable::parity(3, true).to_hex() == "96");
}

TEST_CASE("csp_of_lin2 preserves H") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto lin2 = spx::test::random_lin2(8, 1 + seed % 3, 10, seed);
    const auto csp = csp_of_lin2(lin2);
    CHECK(lin2_of_csp_parity(csp) == lin2);
    for (std::uint64_t m = 0; m < 256; ++m) {
      CHECK(evaluate_csp(csp, spx::test::point(8, m)) == evaluate_lin2(lin2, spx::test::point(8, m)));
    }
  }
}
