#include "spx/instance.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace spx {

namespace {

void check_vars(const std::vector<std::uint32_t>& vars, std::size_t n, std::size_t index, const char* what) {
  for (auto v : vars) {
    if (v >= n) throw InvariantError(std::string(what) + " references variable outside [1..n]", index);
  }
  auto sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvariantError(std::string(what) + " repeats a variable", index);
  }
}

}  // namespace

Lin2Instance Lin2Instance::create(std::size_t n, std::size_t k, std::vector<Monomial> terms) {
  if (n == 0) throw InvariantError("instance needs at least one variable");
  if (k == 0) throw InvariantError("monomial degree must be at least 1");
  if (k > kMaxArity) throw InvariantError("monomial degree exceeds supported maximum");

  Lin2Instance inst;
  inst.n_ = n;
  inst.k_ = k;
  std::map<std::vector<std::uint32_t>, std::size_t> slot;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    auto& term = terms[t];
    if (term.vars.size() != k) throw InvariantError("monomial does not have exactly k variables", t);
    check_vars(term.vars, n, t, "monomial");
    std::sort(term.vars.begin(), term.vars.end());
    auto [it, fresh] = slot.try_emplace(term.vars, inst.terms_.size());
    if (fresh) {
      inst.terms_.push_back(std::move(term));
    } else {
      inst.terms_[it->second].coeff += term.coeff;
    }
  }
  std::erase_if(inst.terms_, [](const Monomial& m) { return m.coeff == 0; });
  return inst;
}

TruthTable::TruthTable(std::size_t arity) : arity_(arity), bits_(((std::size_t{1} << arity) + 63) / 64, 0) {
  if (arity == 0 || arity > kMaxArity) throw InvariantError("predicate arity out of range");
}

TruthTable TruthTable::from_hex(std::size_t arity, const std::string& hex) {
  TruthTable t(arity);
  const std::size_t nbits = t.table_size();
  std::size_t bit = 0;
  for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
    const char c = *it;
    unsigned v;
    if (c >= '0' && c <= '9') {
      v = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      v = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw std::invalid_argument("bad hex digit in truth table '" + hex + "'");
    }
    for (unsigned b = 0; b < 4; ++b, ++bit) {
      if (((v >> b) & 1U) == 0) continue;
      if (bit >= nbits) throw std::invalid_argument("truth table '" + hex + "' wider than 2^arity bits");
      t.set(static_cast<std::uint32_t>(bit), true);
    }
  }
  if (hex.empty()) throw std::invalid_argument("empty truth table");
  return t;
}

TruthTable TruthTable::all_but(std::size_t arity, std::uint32_t excluded) {
  TruthTable t(arity);
  for (std::uint32_t b = 0; b < t.table_size(); ++b) t.set(b, b != excluded);
  return t;
}

TruthTable TruthTable::parity(std::size_t arity, bool odd) {
  TruthTable t(arity);
  for (std::uint32_t b = 0; b < t.table_size(); ++b) t.set(b, (std::popcount(b) & 1) == (odd ? 1 : 0));
  return t;
}

void TruthTable::set(std::uint32_t b, bool value) {
  const std::uint64_t bit = std::uint64_t{1} << (b & 63);
  if (value) {
    bits_[b >> 6] |= bit;
  } else {
    bits_[b >> 6] &= ~bit;
  }
}

std::size_t TruthTable::popcount() const {
  std::size_t c = 0;
  for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::string TruthTable::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t ndigits = (table_size() + 3) / 4;
  std::string out(ndigits, '0');
  for (std::size_t d = 0; d < ndigits; ++d) {
    unsigned v = 0;
    for (unsigned b = 0; b < 4; ++b) {
      const std::size_t bit = d * 4 + b;
      if (bit < table_size() && test(static_cast<std::uint32_t>(bit))) v |= 1U << b;
    }
    out[ndigits - 1 - d] = kDigits[v];
  }
  return out;
}

Rational Constraint::lambda() const {
  const std::size_t total = predicate.table_size();
  Rational lam(static_cast<unsigned long>(total), static_cast<unsigned long>(total - satisfying_count()));
  lam.canonicalize();
  return lam;
}

Rational Constraint::violated_value() const {
  const std::size_t total = predicate.table_size();
  const std::size_t s = satisfying_count();
  Rational ratio(static_cast<unsigned long>(s), static_cast<unsigned long>(total - s));
  ratio.canonicalize();
  return Rational(ratio * weight);
}

std::uint32_t Constraint::local_index(const Assignment& x) const {
  std::uint32_t b = 0;
  for (std::size_t t = 0; t < vars.size(); ++t) {
    if (x.negative(vars[t])) b |= 1U << t;
  }
  return b;
}

Rational Constraint::contribution(const Assignment& x) const {
  if (predicate.test(local_index(x))) return Rational(-weight);
  return violated_value();
}

CspInstance CspInstance::create(std::size_t n, std::size_t k, std::vector<Constraint> constraints) {
  if (n == 0) throw InvariantError("instance needs at least one variable");
  if (k == 0 || k > kMaxArity) throw InvariantError("arity bound k out of range");
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    auto& c = constraints[j];
    if (c.vars.empty() || c.vars.size() > k) throw InvariantError("constraint arity outside [1..k]", j);
    check_vars(c.vars, n, j, "constraint");
    if (c.predicate.arity() != c.vars.size()) throw InvariantError("truth table arity does not match variable count", j);
    c.weight.canonicalize();
    if (c.weight <= 0) throw InvariantError("constraint weight must be positive", j);
    const std::size_t s = c.satisfying_count();
    if (s == 0 || s == c.predicate.table_size()) throw InvariantError("trivial predicate (s_j must be in [1, 2^k_j - 1])", j);
  }
  CspInstance inst;
  inst.n_ = n;
  inst.k_ = k;
  inst.constraints_ = std::move(constraints);
  return inst;
}

Rational CspInstance::total_weight() const {
  Rational w = 0;
  for (const auto& c : constraints_) w += c.weight;
  return w;
}

std::size_t instance_n(const Instance& inst) {
  return std::visit([](const auto& i) { return i.n(); }, inst);
}

std::size_t instance_k(const Instance& inst) {
  return std::visit([](const auto& i) { return i.k(); }, inst);
}

bool instance_trivial(const Instance& inst) {
  if (const auto* lin = std::get_if<Lin2Instance>(&inst)) return lin->trivial();
  return std::get<CspInstance>(inst).constraints().empty();
}

Rational evaluate_lin2(const Lin2Instance& inst, const Assignment& x) {
  if (x.size() != inst.n()) throw std::invalid_argument("evaluate_lin2: dimension mismatch");
  Rational h = 0;
  for (const auto& term : inst.terms()) {
    int sign = 1;
    for (auto v : term.vars) sign *= x.sign(v);
    if (sign > 0) {
      h += term.coeff;
    } else {
      h -= term.coeff;
    }
  }
  return h;
}

Rational evaluate_csp(const CspInstance& inst, const Assignment& x) {
  if (x.size() != inst.n()) throw std::invalid_argument("evaluate_csp: dimension mismatch");
  Rational h = 0;
  for (const auto& c : inst.constraints()) h += c.contribution(x);
  return h;
}

Rational evaluate(const Instance& inst, const Assignment& x) {
  if (const auto* lin = std::get_if<Lin2Instance>(&inst)) return evaluate_lin2(*lin, x);
  return evaluate_csp(std::get<CspInstance>(inst), x);
}

Rational centered_mean_check(const Constraint& c) {
  Rational sum = 0;
  const Rational violated = c.violated_value();
  for (std::uint32_t b = 0; b < c.predicate.table_size(); ++b) {
    if (c.predicate.test(b)) {
      sum -= c.weight;
    } else {
      sum += violated;
    }
  }
  return Rational(sum / static_cast<unsigned long>(c.predicate.table_size()));
}

InstanceStats compute_stats(const CspInstance& inst) {
  if (inst.constraints().empty()) throw DegenerateInstance("compute_stats: instance has no constraints");
  InstanceStats st;
  st.n = inst.n();
  st.k = inst.k();
  st.degrees.assign(inst.n(), Rational(0));
  st.W = 0;
  st.Lambda_max = 0;
  for (const auto& c : inst.constraints()) {
    st.W += c.weight;
    for (auto v : c.vars) st.degrees[v] += c.weight;
    const Rational lam = c.lambda();
    if (lam > st.Lambda_max) st.Lambda_max = lam;
  }
  st.Sigma = 0;
  Rational sum_sq = 0;
  for (const auto& d : st.degrees) {
    st.Sigma += d;
    sum_sq += d * d;
  }
  const auto n = static_cast<unsigned long>(inst.n());
  st.d_avg = st.Sigma / n;
  st.D = Rational(sum_sq * n / (st.Sigma * st.Sigma));
  const Rational light_cut = 2 * st.d_avg;
  for (std::uint32_t i = 0; i < inst.n(); ++i) {
    if (st.degrees[i] <= light_cut) st.light_set.push_back(i);
  }
  return st;
}

Lin2Instance lin2_of_csp_parity(const CspInstance& inst) {
  std::vector<Monomial> terms;
  terms.reserve(inst.m());
  for (std::size_t j = 0; j < inst.m(); ++j) {
    const auto& c = inst.constraints()[j];
    if (c.arity() != inst.k()) throw InvariantError("parity conversion needs arity exactly k", j);
    int sigma = 0;
    if (c.predicate == TruthTable::parity(c.arity(), false)) {
      sigma = 1;  // satisfied iff prod x_i = +1
    } else if (c.predicate == TruthTable::parity(c.arity(), true)) {
      sigma = -1;
    } else {
      throw InvariantError("constraint is not a parity predicate", j);
    }
    // C_j = -w when satisfied and +w otherwise, i.e. -w * sigma * prod x_i.
    terms.push_back(Monomial{c.vars, Rational(-c.weight * sigma)});
  }
  return Lin2Instance::create(inst.n(), inst.k(), std::move(terms));
}

CspInstance csp_of_lin2(const Lin2Instance& inst) {
  std::vector<Constraint> cs;
  cs.reserve(inst.terms().size());
  for (const auto& t : inst.terms()) {
    Rational w = abs(t.coeff);
    w.canonicalize();
    // c x_S = -|c| exactly when x_S = -sign(c).
    cs.push_back(Constraint{t.vars, w, TruthTable::parity(t.vars.size(), t.coeff > 0)});
  }
  return CspInstance::create(inst.n(), inst.k(), std::move(cs));
}

}  // namespace spx
