#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "spx/instance.hpp"
#include "spx/rational.hpp"

namespace spx {

// h(t) = -t log2 t - (1-t) log2(1-t), h(0) = h(1) = 0.
double binary_entropy(double t);

struct FlipRates {
  double q_eta = 0;    // (1 - (1-eta)^{1/k}) / 2
  double q_eta_n = 0;  // (1 - (1-eta+eta/n)^{1/k}) / 2
  std::int64_t r_ns = 0;  // ceil(q_eta n + 2 n^{2/3})
};

FlipRates flip_rates(const Rational& eta, std::size_t k, std::size_t n);

struct LipschitzParams {
  Rational theta;  // eta |H_min| / (Lambda_max Sigma)
  std::int64_t r_lip = 0;  // floor(theta n / 2)
};

LipschitzParams lipschitz_params(const InstanceStats& stats, const Rational& h_min, const Rational& eta);

// (2 (1-eta)^2 / ln 2) (1 / (Lambda_max^2 D)) (|H_min| / Sigma)^2
double mcdiarmid_gamma(const InstanceStats& stats, const Rational& h_min, const Rational& eta);

struct QuantumComparison {
  double c_q = 0;
  double ratio = 0;  // c_cl / c_q
};

// c_q = gamma eta / (2 (2 + ln 2) k)
QuantumComparison quantum_comparison_lin2(double gamma, const Rational& eta, std::size_t k, double c_cl);
// c_q = 0.0578 Delta^3 / (2^{3k} k^3 D)
QuantumComparison quantum_comparison_csp(double delta, std::size_t k, double D, double c_cl);

struct ExponentReport {
  Rational eta;
  std::string regime;  // "correlated-pair" | "local-lipschitz"
  double gamma = 0;
  double kappa = 0;
  double c_cl = 0;
  double c_q = 0;
  double ratio = 0;
  // Closed-form lower bound on c_cl: gamma eta / k (correlated-pair) or
  // (1/(2 ln 2)) (1/(2^{2k} k^2 D)) (|H_min|/W)^2 at eta = 1/2 (local-Lipschitz).
  double lower_bound = 0;
  std::optional<double> q_eta;
  std::optional<double> q_eta_n;
  std::optional<std::int64_t> r_ns;
  std::optional<Rational> theta_eta;
  std::optional<std::int64_t> r_lip;
};

ExponentReport classical_exponent_case1(double gamma, const Rational& eta, std::size_t k,
                                        std::optional<std::size_t> n = std::nullopt);
ExponentReport classical_exponent_case2(const InstanceStats& stats, const Rational& h_min,
                                        const Rational& eta = Rational(1, 2));

nlohmann::json report_to_json(const ExponentReport& report);

struct BinomialCheck {
  std::uint64_t N = 0;
  std::uint64_t r = 0;  // floor(N t)
  bool layer_ok = false;    // C(N,r) >= 2^{N h(r/N)} / (N+1)
  bool rounded_ok = false;  // C(N,r) >= 2^{N h(t)} / (e N (N+1))
  double layer_margin = 0;    // log2(lhs) - log2(rhs)
  double rounded_margin = 0;
  bool pass() const { return layer_ok && rounded_ok; }
};

// The layer verdict is exact. The rounded verdict is read off the float
// margin when it exceeds 1e-6 bits and otherwise recomputed with exact
// integer powers.
BinomialCheck verify_binomial_bounds(std::uint64_t N, const Rational& t);

}  // namespace spx
