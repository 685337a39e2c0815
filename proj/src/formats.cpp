#include "spx/formats.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "spx/rng.hpp"

namespace spx {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t parse_count(std::string_view tok, std::size_t line, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected non-negative integer for ") + what + ", got '" + std::string(tok) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view tok, std::size_t line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected integer, got '" + std::string(tok) + "'");
  }
  return v;
}

Rational parse_rational_at(std::string_view tok, std::size_t line) {
  try {
    return parse_rational(tok);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

std::uint32_t parse_var(std::string_view tok, std::size_t line, std::size_t n) {
  const auto v = parse_count(tok, line, "variable index");
  if (v < 1 || v > n) throw ParseError(line, "variable index " + std::string(tok) + " outside [1.." + std::to_string(n) + "]");
  return static_cast<std::uint32_t>(v - 1);
}

// Floyd's algorithm for `count` distinct values in [0, n), then shuffled.
std::vector<std::uint32_t> distinct_sample(RngStream& rng, std::size_t n, std::size_t count) {
  std::vector<std::uint32_t> out;
  std::set<std::uint32_t> chosen;
  for (std::size_t j = n - count; j < n; ++j) {
    auto t = static_cast<std::uint32_t>(rng.below(j + 1));
    if (!chosen.insert(t).second) {
      t = static_cast<std::uint32_t>(j);
      chosen.insert(t);
    }
    out.push_back(t);
  }
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
  return out;
}

BigInt binomial(std::size_t n, std::size_t k) {
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

// Enumerates all k-subsets of [0, n) in lexicographic order.
void all_subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::uint32_t>>& out) {
  std::vector<std::uint32_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = static_cast<std::uint32_t>(i);
  for (;;) {
    out.push_back(c);
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

TruthTable random_nontrivial_table(RngStream& rng, std::size_t arity, std::optional<std::uint32_t> must_hold) {
  for (;;) {
    TruthTable t(arity);
    for (std::uint32_t b = 0; b < t.table_size(); ++b) t.set(b, rng.below(2) == 1);
    if (must_hold) t.set(*must_hold, true);
    const auto s = t.popcount();
    if (s >= 1 && s < t.table_size()) return t;
  }
}

CspInstance gen_csp(const CspGenSpec& spec, const Assignment* planted, std::uint64_t seed) {
  if (spec.k == 0 || spec.k > spec.n) throw std::invalid_argument("generator needs 1 <= k <= n");
  if (spec.weights.empty()) throw std::invalid_argument("generator needs a nonempty weight set");
  if (planted != nullptr && planted->size() != spec.n) throw std::invalid_argument("planted assignment has wrong dimension");
  RngStream rng(seed);
  std::vector<Constraint> cs;
  cs.reserve(spec.m);
  for (std::size_t j = 0; j < spec.m; ++j) {
    const std::size_t arity = spec.mixed_arity ? 1 + rng.below(spec.k) : spec.k;
    Constraint c;
    c.vars = distinct_sample(rng, spec.n, arity);
    c.weight = spec.weights[rng.below(spec.weights.size())];
    const std::uint32_t tsize = 1U << arity;
    std::optional<std::uint32_t> local;
    if (planted != nullptr) local = c.local_index(*planted);
    switch (spec.family) {
      case PredicateFamily::kSat: {
        std::uint32_t violating;
        if (local) {
          violating = static_cast<std::uint32_t>(rng.below(tsize - 1));
          if (violating >= *local) ++violating;
        } else {
          violating = static_cast<std::uint32_t>(rng.below(tsize));
        }
        c.predicate = TruthTable::all_but(arity, violating);
        break;
      }
      case PredicateFamily::kParity: {
        const bool odd = local ? (std::popcount(*local) & 1) != 0 : rng.below(2) == 1;
        c.predicate = TruthTable::parity(arity, odd);
        break;
      }
      case PredicateFamily::kRandom:
        c.predicate = random_nontrivial_table(rng, arity, local);
        break;
    }
    cs.push_back(std::move(c));
  }
  return CspInstance::create(spec.n, spec.k, std::move(cs));
}

}  // namespace

Instance parse_instance(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::optional<std::string> kind;
  std::size_t n = 0, k = 0, m = 0;
  std::vector<Monomial> terms;
  std::vector<Constraint> constraints;
  std::size_t body = 0;
  std::size_t header_line = 0;

  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].starts_with('#')) continue;

    if (!kind) {
      if (tok[0] != "p" || tok.size() != 5) throw ParseError(line_no, "expected header 'p <lin2|csp> <n> <k> <m>'");
      if (tok[1] != "lin2" && tok[1] != "csp") throw ParseError(line_no, "unknown problem kind '" + std::string(tok[1]) + "'");
      kind = std::string(tok[1]);
      n = parse_count(tok[2], line_no, "n");
      k = parse_count(tok[3], line_no, "k");
      m = parse_count(tok[4], line_no, "m");
      if (n == 0) throw ParseError(line_no, "n must be positive");
      if (k == 0 || k > kMaxArity) throw ParseError(line_no, "k outside [1.." + std::to_string(kMaxArity) + "]");
      header_line = line_no;
      continue;
    }
    if (body == m) throw ParseError(line_no, "more body lines than the header's m = " + std::to_string(m));

    if (*kind == "lin2") {
      if (tok[0] != "t") throw ParseError(line_no, "expected term line 't <coeff> <vars...>'");
      if (tok.size() != 2 + k) {
        throw ParseError(line_no, "term has " + std::to_string(tok.size() > 2 ? tok.size() - 2 : 0) + " variables, header says k = " + std::to_string(k));
      }
      Monomial t;
      t.coeff = parse_rational_at(tok[1], line_no);
      for (std::size_t i = 2; i < tok.size(); ++i) t.vars.push_back(parse_var(tok[i], line_no, n));
      terms.push_back(std::move(t));
    } else {
      if (tok[0] != "c") throw ParseError(line_no, "expected constraint line 'c <weight> <hex> <vars...>'");
      if (tok.size() < 4) throw ParseError(line_no, "constraint needs a weight, a truth table and at least one variable");
      const std::size_t arity = tok.size() - 3;
      if (arity > k) throw ParseError(line_no, "constraint arity " + std::to_string(arity) + " exceeds k = " + std::to_string(k));
      Constraint c;
      c.weight = parse_rational_at(tok[1], line_no);
      try {
        c.predicate = TruthTable::from_hex(arity, std::string(tok[2]));
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
      }
      for (std::size_t i = 3; i < tok.size(); ++i) c.vars.push_back(parse_var(tok[i], line_no, n));
      constraints.push_back(std::move(c));
    }
    ++body;
  }
  if (!kind) throw ParseError(line_no, "missing 'p' header");
  if (body != m) throw ParseError(line_no, "header (line " + std::to_string(header_line) + ") declares m = " + std::to_string(m) + " but found " + std::to_string(body));
  if (*kind == "lin2") return Lin2Instance::create(n, k, std::move(terms));
  return CspInstance::create(n, k, std::move(constraints));
}

std::string write_instance(const Instance& inst) {
  std::ostringstream out;
  if (const auto* lin = std::get_if<Lin2Instance>(&inst)) {
    out << "p lin2 " << lin->n() << ' ' << lin->k() << ' ' << lin->terms().size() << '\n';
    for (const auto& t : lin->terms()) {
      out << "t " << to_string(t.coeff);
      for (auto v : t.vars) out << ' ' << v + 1;
      out << '\n';
    }
  } else {
    const auto& csp = std::get<CspInstance>(inst);
    out << "p csp " << csp.n() << ' ' << csp.k() << ' ' << csp.m() << '\n';
    for (const auto& c : csp.constraints()) {
      out << "c " << to_string(c.weight) << ' ' << c.predicate.to_hex();
      for (auto v : c.vars) out << ' ' << v + 1;
      out << '\n';
    }
  }
  return out.str();
}

Instance read_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.ends_with(".cnf")) return import_dimacs_cnf(text);
  return parse_instance(text);
}

void write_instance_file(const std::string& path, const Instance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << write_instance(inst);
}

CspInstance import_dimacs_cnf(std::string_view text, std::optional<std::size_t> max_arity) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::optional<std::size_t> n;
  std::vector<std::vector<std::int64_t>> clauses;
  std::vector<std::size_t> clause_line;
  std::vector<std::int64_t> current;
  std::size_t widest = 0;

  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "c" || tok[0].starts_with('%')) continue;
    if (tok[0] == "p") {
      if (tok.size() != 4 || tok[1] != "cnf") throw ParseError(line_no, "expected 'p cnf <vars> <clauses>'");
      n = parse_count(tok[2], line_no, "variable count");
      continue;
    }
    for (auto t : tok) {
      const auto lit = parse_int(t, line_no);
      if (lit == 0) {
        if (current.empty()) throw ParseError(line_no, "empty clause");
        clauses.push_back(current);
        clause_line.push_back(line_no);
        current.clear();
      } else {
        current.push_back(lit);
      }
    }
  }
  if (!current.empty()) throw ParseError(line_no, "last clause is not terminated by 0");

  std::size_t nvars = n.value_or(0);
  if (!n) {
    for (const auto& c : clauses) {
      for (auto l : c) nvars = std::max<std::size_t>(nvars, static_cast<std::size_t>(std::llabs(l)));
    }
  }
  std::vector<Constraint> cs;
  for (std::size_t j = 0; j < clauses.size(); ++j) {
    auto lits = clauses[j];
    std::sort(lits.begin(), lits.end(), [](auto a, auto b) { return std::llabs(a) < std::llabs(b) || (std::llabs(a) == std::llabs(b) && a < b); });
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i) {
      if (lits[i] == -lits[i - 1]) throw ParseError(clause_line[j], "tautological clause (contains x and -x)");
    }
    Constraint c;
    std::uint32_t violating = 0;
    for (std::size_t t = 0; t < lits.size(); ++t) {
      const auto v = static_cast<std::size_t>(std::llabs(lits[t]));
      if (v > nvars) throw ParseError(clause_line[j], "literal " + std::to_string(lits[t]) + " exceeds declared variable count");
      c.vars.push_back(static_cast<std::uint32_t>(v - 1));
      // A negative literal is false exactly when x_v = -1.
      if (lits[t] < 0) violating |= 1U << t;
    }
    if (max_arity && lits.size() > *max_arity) {
      throw ParseError(clause_line[j], "clause arity " + std::to_string(lits.size()) + " exceeds k = " + std::to_string(*max_arity));
    }
    if (lits.size() > kMaxArity) throw ParseError(clause_line[j], "clause too wide");
    widest = std::max(widest, lits.size());
    c.weight = 1;
    c.predicate = TruthTable::all_but(lits.size(), violating);
    cs.push_back(std::move(c));
  }
  if (nvars == 0) throw ParseError(line_no, "formula has no variables");
  return CspInstance::create(nvars, max_arity.value_or(std::max<std::size_t>(widest, 1)), std::move(cs));
}

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  if (const auto* lin = std::get_if<Lin2Instance>(&inst)) {
    j["kind"] = "lin2";
    j["n"] = lin->n();
    j["k"] = lin->k();
    j["m"] = lin->terms().size();
    auto& terms = j["terms"] = nlohmann::json::array();
    for (const auto& t : lin->terms()) {
      std::vector<std::uint32_t> vars;
      for (auto v : t.vars) vars.push_back(v + 1);
      terms.push_back({{"vars", vars}, {"coeff", to_string(t.coeff)}});
    }
  } else {
    const auto& csp = std::get<CspInstance>(inst);
    j["kind"] = "csp";
    j["n"] = csp.n();
    j["k"] = csp.k();
    j["m"] = csp.m();
    auto& cons = j["constraints"] = nlohmann::json::array();
    for (const auto& c : csp.constraints()) {
      std::vector<std::uint32_t> vars;
      for (auto v : c.vars) vars.push_back(v + 1);
      cons.push_back({{"vars", vars}, {"weight", to_string(c.weight)}, {"table", c.predicate.to_hex()}});
    }
  }
  return j;
}

nlohmann::json stats_to_json(const InstanceStats& st) {
  std::vector<std::string> degrees;
  for (const auto& d : st.degrees) degrees.push_back(to_string(d));
  std::vector<std::uint32_t> light;
  for (auto v : st.light_set) light.push_back(v + 1);
  return {{"n", st.n},
          {"k", st.k},
          {"W", to_string(st.W)},
          {"Sigma", to_string(st.Sigma)},
          {"d_avg", to_string(st.d_avg)},
          {"D", to_string(st.D)},
          {"Lambda_max", to_string(st.Lambda_max)},
          {"degrees", degrees},
          {"light_set", light}};
}

Lin2Instance gen_random_lin2(std::size_t n, std::size_t k, std::size_t m, const std::vector<Rational>& coeff_set,
                             std::uint64_t seed) {
  if (k == 0 || k > n) throw std::invalid_argument("gen_random_lin2 needs 1 <= k <= n");
  if (coeff_set.empty()) throw std::invalid_argument("gen_random_lin2 needs a nonempty coefficient set");
  for (const auto& c : coeff_set) {
    if (c == 0) throw std::invalid_argument("coefficient set must exclude 0");
  }
  const BigInt total = binomial(n, k);
  if (BigInt(static_cast<unsigned long>(m)) > total) {
    throw std::invalid_argument("m = " + std::to_string(m) + " exceeds C(n,k) = " + total.get_str());
  }
  RngStream rng(seed);
  std::vector<std::vector<std::uint32_t>> subsets;
  if (total <= 4 * static_cast<unsigned long>(m) + 64 && total <= 1'000'000) {
    all_subsets(n, k, subsets);
    for (std::size_t i = 0; i < m; ++i) std::swap(subsets[i], subsets[i + rng.below(subsets.size() - i)]);
    subsets.resize(m);
  } else {
    std::set<std::vector<std::uint32_t>> seen;
    while (subsets.size() < m) {
      auto s = distinct_sample(rng, n, k);
      std::sort(s.begin(), s.end());
      if (seen.insert(s).second) subsets.push_back(std::move(s));
    }
  }
  std::vector<Monomial> terms;
  terms.reserve(m);
  for (auto& s : subsets) terms.push_back(Monomial{std::move(s), coeff_set[rng.below(coeff_set.size())]});
  return Lin2Instance::create(n, k, std::move(terms));
}

Lin2Instance gen_planted_lin2(std::size_t n, std::size_t k, std::size_t m, const std::vector<Rational>& coeff_set,
                              const Assignment& planted, std::uint64_t seed) {
  if (planted.size() != n) throw std::invalid_argument("planted point has the wrong dimension");
  const auto base = gen_random_lin2(n, k, m, coeff_set, seed);
  std::vector<Monomial> terms = base.terms();
  for (auto& t : terms) {
    bool odd = false;
    for (auto v : t.vars) odd ^= planted.negative(v);
    t.coeff = abs(t.coeff);
    if (!odd) t.coeff = -t.coeff;
    t.coeff.canonicalize();
  }
  return Lin2Instance::create(n, k, std::move(terms));
}

PredicateFamily parse_predicate_family(std::string_view name) {
  if (name == "sat") return PredicateFamily::kSat;
  if (name == "parity") return PredicateFamily::kParity;
  if (name == "random") return PredicateFamily::kRandom;
  throw std::invalid_argument("unknown predicate family '" + std::string(name) + "' (sat|parity|random)");
}

std::string to_string(PredicateFamily family) {
  switch (family) {
    case PredicateFamily::kSat:
      return "sat";
    case PredicateFamily::kParity:
      return "parity";
    case PredicateFamily::kRandom:
      return "random";
  }
  return "?";
}

CspInstance gen_planted_csp(const CspGenSpec& spec, const Assignment& planted, std::uint64_t seed) {
  return gen_csp(spec, &planted, seed);
}

CspInstance gen_random_csp(const CspGenSpec& spec, std::uint64_t seed) { return gen_csp(spec, nullptr, seed); }

}  // namespace spx
