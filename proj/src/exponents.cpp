#include "spx/exponents.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spx {

namespace {

void check_eta(const Rational& eta) {
  if (eta <= 0 || eta >= 1) throw std::domain_error("eta must lie in (0, 1)");
}

void check_h_min(const Rational& h_min) {
  if (h_min == 0) throw DegenerateInstance("H_min = 0: threshold set and radii are degenerate");
  if (h_min > 0) throw std::domain_error("H_min must be negative");
}

// log2 of a positive big integer, accurate to double precision.
double log2_big(const BigInt& v) {
  long exp = 0;
  const double d = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log2(d) + static_cast<double>(exp);
}

BigInt pow_big(std::uint64_t base, std::uint64_t e) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, e);
  return out;
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

}  // namespace

double binary_entropy(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
  if (t == 0.0 || t == 1.0) return 0.0;
  // log1p keeps full precision for the (1-t) term when t is tiny.
  return (-t * std::log(t) - (1.0 - t) * std::log1p(-t)) / std::numbers::ln2;
}

FlipRates flip_rates(const Rational& eta, std::size_t k, std::size_t n) {
  check_eta(eta);
  if (k == 0 || n == 0) throw std::domain_error("flip_rates needs k >= 1 and n >= 1");
  const double e = to_double(eta);
  const double e_n = to_double(eta - eta / static_cast<long>(n));
  FlipRates out;
  out.q_eta = -std::expm1(std::log1p(-e) / static_cast<double>(k)) / 2.0;
  out.q_eta_n = -std::expm1(std::log1p(-e_n) / static_cast<double>(k)) / 2.0;
  const double cube = std::cbrt(static_cast<double>(n));
  out.r_ns = static_cast<std::int64_t>(std::ceil(out.q_eta * static_cast<double>(n) + 2.0 * cube * cube));
  return out;
}

LipschitzParams lipschitz_params(const InstanceStats& stats, const Rational& h_min, const Rational& eta) {
  check_eta(eta);
  check_h_min(h_min);
  LipschitzParams out;
  out.theta = eta * abs(h_min) / (stats.Lambda_max * stats.Sigma);
  out.theta.canonicalize();
  out.r_lip = floor_to_int64(out.theta * static_cast<long>(stats.n) / 2);
  return out;
}

double mcdiarmid_gamma(const InstanceStats& stats, const Rational& h_min, const Rational& eta) {
  check_eta(eta);
  check_h_min(h_min);
  const Rational ratio = abs(h_min) / stats.Sigma;
  Rational core = (1 - eta) * (1 - eta) * ratio * ratio / (stats.Lambda_max * stats.Lambda_max * stats.D);
  core.canonicalize();
  return 2.0 * to_double(core) / std::numbers::ln2;
}

QuantumComparison quantum_comparison_lin2(double gamma, const Rational& eta, std::size_t k, double c_cl) {
  QuantumComparison out;
  out.c_q = gamma * to_double(eta) / (2.0 * (2.0 + std::numbers::ln2) * static_cast<double>(k));
  out.ratio = c_cl / out.c_q;
  return out;
}

QuantumComparison quantum_comparison_csp(double delta, std::size_t k, double D, double c_cl) {
  const double kk = static_cast<double>(k);
  QuantumComparison out;
  out.c_q = 0.0578 * delta * delta * delta / (std::ldexp(1.0, static_cast<int>(3 * k)) * kk * kk * kk * D);
  out.ratio = c_cl / out.c_q;
  return out;
}

ExponentReport classical_exponent_case1(double gamma, const Rational& eta, std::size_t k, std::optional<std::size_t> n) {
  if (!(gamma > 0)) throw std::domain_error("gamma must be positive");
  const auto rates = flip_rates(eta, k, n.value_or(1));
  ExponentReport rep;
  rep.eta = eta;
  rep.regime = "correlated-pair";
  rep.gamma = gamma;
  rep.kappa = binary_entropy(rates.q_eta);
  rep.c_cl = std::min(gamma, rep.kappa);
  rep.lower_bound = gamma * to_double(eta) / static_cast<double>(k);
  rep.q_eta = rates.q_eta;
  if (n) {
    rep.q_eta_n = rates.q_eta_n;
    rep.r_ns = rates.r_ns;
  }
  const auto q = quantum_comparison_lin2(gamma, eta, k, rep.c_cl);
  rep.c_q = q.c_q;
  rep.ratio = q.ratio;
  return rep;
}

ExponentReport classical_exponent_case2(const InstanceStats& stats, const Rational& h_min, const Rational& eta) {
  const auto lip = lipschitz_params(stats, h_min, eta);
  ExponentReport rep;
  rep.eta = eta;
  rep.regime = "local-lipschitz";
  rep.gamma = mcdiarmid_gamma(stats, h_min, eta);
  rep.kappa = binary_entropy(to_double(lip.theta)) / 2.0;
  rep.c_cl = std::min(rep.gamma, rep.kappa);
  rep.theta_eta = lip.theta;
  rep.r_lip = lip.r_lip;
  const double delta = to_double(abs(h_min) / stats.W);
  const double kk = static_cast<double>(stats.k);
  const double D = to_double(stats.D);
  rep.lower_bound = delta * delta / (2.0 * std::numbers::ln2 * std::ldexp(1.0, static_cast<int>(2 * stats.k)) * kk * kk * D);
  const auto q = quantum_comparison_csp(delta, stats.k, D, rep.c_cl);
  rep.c_q = q.c_q;
  rep.ratio = q.ratio;
  return rep;
}

nlohmann::json report_to_json(const ExponentReport& rep) {
  nlohmann::json j;
  j["eta"] = to_string(rep.eta);
  j["regime"] = rep.regime;
  j["gamma"] = rep.gamma;
  j["kappa"] = rep.kappa;
  j["c_cl"] = rep.c_cl;
  j["c_q"] = rep.c_q;
  j["ratio"] = rep.ratio;
  j["lower_bound"] = rep.lower_bound;
  j["q_eta"] = rep.q_eta ? nlohmann::json(*rep.q_eta) : nlohmann::json();
  j["q_eta_n"] = rep.q_eta_n ? nlohmann::json(*rep.q_eta_n) : nlohmann::json();
  j["r_ns"] = rep.r_ns ? nlohmann::json(*rep.r_ns) : nlohmann::json();
  j["theta_eta"] = rep.theta_eta ? nlohmann::json(to_string(*rep.theta_eta)) : nlohmann::json();
  j["r_lip"] = rep.r_lip ? nlohmann::json(*rep.r_lip) : nlohmann::json();
  return j;
}

BinomialCheck verify_binomial_bounds(std::uint64_t N, const Rational& t_in) {
  Rational t = t_in;
  t.canonicalize();
  if (N == 0) throw std::domain_error("verify_binomial_bounds needs N >= 1");
  if (t < 0 || t > Rational(1, 2)) throw std::domain_error("verify_binomial_bounds needs 0 <= t <= 1/2");
  BinomialCheck out;
  out.N = N;
  const BigInt rN = (t.get_num() * static_cast<unsigned long>(N)) / t.get_den();
  out.r = rN.get_ui();
  const std::uint64_t r = out.r;
  const BigInt c = binomial(N, r);

  // Layer: 2^{N h(r/N)} = N^N / (r^r (N-r)^{N-r}), so compare
  // C(N,r) (N+1) r^r (N-r)^{N-r} >= N^N.
  const BigInt layer_lhs = c * static_cast<unsigned long>(N + 1) * pow_big(r, r) * pow_big(N - r, N - r);
  const BigInt layer_rhs = pow_big(N, N);
  out.layer_ok = layer_lhs >= layer_rhs;
  out.layer_margin = log2_big(layer_lhs) - log2_big(layer_rhs);

  // Rounded: C(N,r) e N (N+1) >= 2^{N h(t)}. e is replaced by a rational
  // lower bound, which can only make the check stricter.
  const BigInt e_num(2718281828UL), e_den(1000000000UL);
  const BigInt base = c * e_num * static_cast<unsigned long>(N) * static_cast<unsigned long>(N + 1);
  const double exponent = static_cast<double>(N) * binary_entropy(to_double(t));
  out.rounded_margin = log2_big(base) - log2_big(e_den) - exponent;
  if (std::abs(out.rounded_margin) > 1e-6) {
    // Float error here is below 1e-9 bits, so the sign is already exact.
    out.rounded_ok = out.rounded_margin > 0;
  } else {
    const std::uint64_t p = t.get_num().get_ui();
    const std::uint64_t q = t.get_den().get_ui();
    BigInt lhs, rhs;
    // Raise both sides to the power q: (base / e_den)^q >= q^{Nq} / (p^{Np} (q-p)^{N(q-p)}).
    mpz_pow_ui(lhs.get_mpz_t(), base.get_mpz_t(), q);
    lhs *= pow_big(p, N * p) * pow_big(q - p, N * (q - p));
    mpz_pow_ui(rhs.get_mpz_t(), e_den.get_mpz_t(), q);
    rhs *= pow_big(q, N * q);
    out.rounded_ok = lhs >= rhs;
  }
  return out;
}

}  // namespace spx
