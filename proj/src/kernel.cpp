#include "spx/kernel.hpp"

#include <bit>
#include <cstdlib>
#include <stdexcept>

namespace spx {

namespace {

constexpr std::int64_t kMagnitudeLimit = std::int64_t{1} << 62;

BigInt lcm(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

}  // namespace

Kernel::Kernel(const Lin2Instance& inst) : n_(inst.n()) {
  for (const auto& t : inst.terms()) scale_ = lcm(scale_, t.coeff.get_den());
  for (const auto& t : inst.terms()) {
    Factor f{};
    f.var_offset = static_cast<std::uint32_t>(vars_.size());
    f.arity = static_cast<std::uint32_t>(t.vars.size());
    f.parity = true;
    f.coeff = to_scaled(t.coeff);
    vars_.insert(vars_.end(), t.vars.begin(), t.vars.end());
    factors_.push_back(f);
  }
  build_occurrences();
  check_range();
}

Kernel::Kernel(const CspInstance& inst) : n_(inst.n()) {
  for (const auto& c : inst.constraints()) {
    scale_ = lcm(scale_, c.weight.get_den());
    scale_ = lcm(scale_, c.violated_value().get_den());
  }
  for (const auto& c : inst.constraints()) {
    Factor f{};
    f.var_offset = static_cast<std::uint32_t>(vars_.size());
    f.arity = static_cast<std::uint32_t>(c.vars.size());
    f.parity = false;
    f.table_offset = static_cast<std::uint32_t>(tables_.size());
    const std::int64_t sat = to_scaled(Rational(-c.weight));
    const std::int64_t unsat = to_scaled(c.violated_value());
    for (std::uint32_t b = 0; b < c.predicate.table_size(); ++b) tables_.push_back(c.predicate.test(b) ? sat : unsat);
    vars_.insert(vars_.end(), c.vars.begin(), c.vars.end());
    factors_.push_back(f);
  }
  build_occurrences();
  check_range();
}

Kernel::Kernel(const Instance& inst)
    : Kernel(std::holds_alternative<Lin2Instance>(inst) ? Kernel(std::get<Lin2Instance>(inst))
                                                        : Kernel(std::get<CspInstance>(inst))) {}

void Kernel::build_occurrences() {
  std::vector<std::uint32_t> count(n_ + 1, 0);
  for (const auto& f : factors_) {
    for (std::uint32_t t = 0; t < f.arity; ++t) ++count[vars_[f.var_offset + t] + 1];
  }
  occ_begin_.assign(n_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) occ_begin_[i + 1] = occ_begin_[i] + count[i + 1];
  occ_.resize(occ_begin_[n_]);
  std::vector<std::uint32_t> fill(occ_begin_.begin(), occ_begin_.end() - 1);
  for (std::uint32_t j = 0; j < factors_.size(); ++j) {
    const auto& f = factors_[j];
    for (std::uint32_t t = 0; t < f.arity; ++t) occ_[fill[vars_[f.var_offset + t]]++] = Occurrence{j, t};
  }
}

void Kernel::check_range() const {
  // Sum of per-factor maxima bounds every |H(x) * scale| and every partial sum.
  __int128 total = 0;
  for (const auto& f : factors_) {
    std::int64_t worst = 0;
    if (f.parity) {
      worst = std::llabs(f.coeff);
    } else {
      for (std::uint32_t b = 0; b < (1U << f.arity); ++b) worst = std::max<std::int64_t>(worst, std::llabs(tables_[f.table_offset + b]));
    }
    total += worst;
    if (total >= kMagnitudeLimit) throw std::overflow_error("instance magnitudes exceed the 62-bit search kernel range");
  }
}

std::int64_t Kernel::to_scaled(const Rational& value) const {
  Rational scaled = value * scale_;
  scaled.canonicalize();
  if (scaled.get_den() != 1) throw std::logic_error("value is not a multiple of 1/scale");
  const BigInt& num = scaled.get_num();
  if (abs(num) >= BigInt(kMagnitudeLimit)) throw std::overflow_error("coefficient exceeds the 62-bit search kernel range");
  return to_int64(num);
}

Rational Kernel::to_rational(std::int64_t scaled) const {
  Rational r(BigInt(static_cast<long>(scaled)), scale_);
  r.canonicalize();
  return r;
}

std::int64_t Kernel::scaled_floor(const Rational& bound) const {
  Rational scaled = bound * scale_;
  if (scaled >= kMagnitudeLimit) return kMagnitudeLimit;
  if (scaled <= -kMagnitudeLimit) return -kMagnitudeLimit;
  return floor_to_int64(scaled);
}

std::uint32_t Kernel::local_index(const Factor& f, const Assignment& x) const {
  std::uint32_t b = 0;
  for (std::uint32_t t = 0; t < f.arity; ++t) {
    if (x.negative(vars_[f.var_offset + t])) b |= 1U << t;
  }
  return b;
}

std::int64_t Kernel::evaluate(const Assignment& x) const {
  if (x.size() != n_) throw std::invalid_argument("Kernel::evaluate: dimension mismatch");
  std::int64_t h = 0;
  for (const auto& f : factors_) h += factor_value(f, local_index(f, x));
  return h;
}

KernelState::KernelState(const Kernel& kernel, Assignment x) : kernel_(&kernel) { reset(std::move(x)); }

void KernelState::reset(Assignment x) {
  if (x.size() != kernel_->n()) throw std::invalid_argument("KernelState: dimension mismatch");
  x_ = std::move(x);
  idx_.resize(kernel_->factors_.size());
  value_ = 0;
  for (std::size_t j = 0; j < kernel_->factors_.size(); ++j) {
    const auto& f = kernel_->factors_[j];
    idx_[j] = kernel_->local_index(f, x_);
    value_ += kernel_->factor_value(f, idx_[j]);
  }
}

void KernelState::flip(std::size_t i) {
  x_.flip(i);
  const auto& k = *kernel_;
  for (std::uint32_t o = k.occ_begin_[i]; o < k.occ_begin_[i + 1]; ++o) {
    const auto occ = k.occ_[o];
    const auto& f = k.factors_[occ.factor];
    std::uint32_t& idx = idx_[occ.factor];
    const std::int64_t before = k.factor_value(f, idx);
    idx ^= 1U << occ.bit;
    value_ += k.factor_value(f, idx) - before;
  }
}

}  // namespace spx
