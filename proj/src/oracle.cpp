#include "spx/oracle.hpp"

#include <algorithm>
#include <bit>
#include <thread>

namespace spx {

namespace {

void check_n(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) {
    throw OracleTooLarge(std::string(what) + ": n = " + std::to_string(n) + " exceeds the enumeration cap " +
                         std::to_string(cap));
  }
}

// Splits Gray-code positions [0, 2^n) into `parts` contiguous blocks and runs
// `body(part, lo, hi)` on each, one thread per block.
template <typename Body>
void run_blocks(std::size_t n, unsigned parts, Body body) {
  const std::uint64_t total = std::uint64_t{1} << n;
  parts = std::max(1U, std::min<unsigned>(parts, total >= 4096 ? 64 : 1));
  std::vector<std::uint64_t> cut(parts + 1);
  for (unsigned p = 0; p <= parts; ++p) cut[p] = total / parts * p + std::min<std::uint64_t>(p, total % parts);
  if (parts == 1) {
    body(0U, cut[0], cut[1]);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned p = 0; p < parts; ++p) pool.emplace_back([&, p] { body(p, cut[p], cut[p + 1]); });
  for (auto& t : pool) t.join();
}

// Visits Gray-code positions [lo, hi): visit(mask, value).
template <typename Visit>
void gray_walk(const Kernel& kernel, std::uint64_t lo, std::uint64_t hi, Visit visit) {
  if (lo >= hi) return;
  const std::size_t n = kernel.n();
  const std::uint64_t g0 = lo ^ (lo >> 1);
  KernelState st(kernel, Assignment::from_words(n, {g0}));
  std::uint64_t g = g0;
  visit(g, st.value());
  for (std::uint64_t i = lo + 1; i < hi; ++i) {
    const int bit = std::countr_zero(i);
    st.flip(static_cast<std::size_t>(bit));
    g ^= std::uint64_t{1} << bit;
    visit(g, st.value());
  }
}

// Numeric order of the bit-reversed mask equals lexicographic order.
std::uint64_t lex_key(std::uint64_t mask, std::size_t n) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < n; ++i) r |= ((mask >> i) & 1U) << (n - 1 - i);
  return r;
}

unsigned effective_workers(unsigned workers) { return std::max(1U, workers); }

Rational power(const Rational& base, std::size_t e) {
  Rational out(1);
  for (std::size_t i = 0; i < e; ++i) out *= base;
  return out;
}

void check_flip_probability(const Rational& q) {
  if (q < 0 || q > Rational(1, 2)) throw std::invalid_argument("flip probability must lie in [0, 1/2]");
}

}  // namespace

OracleResult brute_force_minimum(const Instance& inst, const OracleOptions& options) {
  const std::size_t n = instance_n(inst);
  check_n(n, kOracleLimits.max_count_n, "brute_force_minimum");
  const Kernel kernel(inst);
  const unsigned parts = effective_workers(options.workers);

  struct Partial {
    std::int64_t best = INT64_MAX;
    std::uint64_t count = 0;
    std::vector<std::uint64_t> keys;  // lex keys of minimizers, capped after sort
    std::map<std::int64_t, std::uint64_t> hist;
  };
  std::vector<Partial> partial(64);
  const std::size_t cap = options.cap_minimizers;

  run_blocks(n, parts, [&](unsigned p, std::uint64_t lo, std::uint64_t hi) {
    Partial& out = partial[p];
    gray_walk(kernel, lo, hi, [&](std::uint64_t mask, std::int64_t v) {
      if (options.histogram) ++out.hist[v];
      if (v < out.best) {
        out.best = v;
        out.count = 0;
        out.keys.clear();
      }
      if (v == out.best) {
        ++out.count;
        if (cap > 0) {
          out.keys.push_back(lex_key(mask, n));
          if (out.keys.size() >= 2 * cap + 64) {
            std::sort(out.keys.begin(), out.keys.end());
            out.keys.resize(cap);
          }
        }
      }
    });
  });

  std::int64_t best = INT64_MAX;
  for (const auto& p : partial) best = std::min(best, p.best);
  OracleResult res;
  res.h_min = kernel.to_rational(best);
  std::vector<std::uint64_t> keys;
  std::map<std::int64_t, std::uint64_t> hist;
  for (const auto& p : partial) {
    if (p.best == best) {
      res.minimizer_count += p.count;
      keys.insert(keys.end(), p.keys.begin(), p.keys.end());
    }
    for (const auto& [v, c] : p.hist) hist[v] += c;
  }
  std::sort(keys.begin(), keys.end());
  if (keys.size() > cap) keys.resize(cap);
  for (auto key : keys) res.minimizers.push_back(Assignment::from_words(n, {lex_key(key, n)}));
  if (options.histogram) {
    res.histogram.emplace();
    for (const auto& [v, c] : hist) (*res.histogram)[kernel.to_rational(v)] = c;
  }
  return res;
}

std::uint64_t threshold_set_count(const Instance& inst, const Rational& h_min, const Rational& eta, unsigned workers) {
  const std::size_t n = instance_n(inst);
  check_n(n, kOracleLimits.max_count_n, "threshold_set_count");
  if (instance_trivial(inst) || h_min == 0) throw DegenerateInstance("threshold set is degenerate when H_min = 0");
  if (eta <= 0 || eta >= 1) throw std::invalid_argument("eta must lie in (0, 1)");
  const Kernel kernel(inst);
  const std::int64_t limit = kernel.scaled_floor((1 - eta) * h_min);
  std::vector<std::uint64_t> counts(64, 0);
  run_blocks(n, effective_workers(workers), [&](unsigned p, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t c = 0;
    gray_walk(kernel, lo, hi, [&](std::uint64_t, std::int64_t v) { c += v <= limit; });
    counts[p] = c;
  });
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

std::vector<std::int64_t> value_table(const Kernel& kernel, unsigned workers) {
  const std::size_t n = kernel.n();
  check_n(n, kOracleLimits.max_table_n, "value_table");
  std::vector<std::int64_t> table(std::size_t{1} << n);
  run_blocks(n, effective_workers(workers), [&](unsigned, std::uint64_t lo, std::uint64_t hi) {
    gray_walk(kernel, lo, hi, [&](std::uint64_t mask, std::int64_t v) { table[mask] = v; });
  });
  return table;
}

namespace {

// Per flip-pattern weight w: sum of H(x* . t) and count of t with H <= limit.
struct WeightProfile {
  std::vector<__int128> sum;
  std::vector<std::uint64_t> hits;
};

WeightProfile weight_profile(const Kernel& kernel, const Assignment& x_star, std::int64_t limit) {
  const std::size_t n = kernel.n();
  WeightProfile prof{std::vector<__int128>(n + 1, 0), std::vector<std::uint64_t>(n + 1, 0)};
  KernelState st(kernel, x_star);
  std::uint64_t g = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 0;; ) {
    const auto w = static_cast<std::size_t>(std::popcount(g));
    prof.sum[w] += st.value();
    prof.hits[w] += st.value() <= limit;
    if (++i == total) break;
    const int bit = std::countr_zero(i);
    st.flip(static_cast<std::size_t>(bit));
    g ^= std::uint64_t{1} << bit;
  }
  return prof;
}

BigInt to_bigint(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  BigInt hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
  BigInt lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
  BigInt out = (hi << 64) + lo;
  return neg ? BigInt(-out) : out;
}

}  // namespace

CorrelatedExpectation exact_correlated_expectation(const Lin2Instance& inst, const Assignment& x_star, const Rational& q) {
  if (x_star.size() != inst.n()) throw std::invalid_argument("exact_correlated_expectation: dimension mismatch");
  check_flip_probability(q);
  const Rational rho = 1 - 2 * q;
  CorrelatedExpectation out;
  for (const auto& t : inst.terms()) {
    Rational b = t.coeff;
    for (auto v : t.vars) {
      if (x_star.negative(v)) b = -b;
    }
    out.closed_form += b * power(rho, t.vars.size());
  }
  out.closed_form.canonicalize();
  if (inst.n() <= kOracleLimits.max_distribution_n) {
    const Kernel kernel(inst);
    const auto prof = weight_profile(kernel, x_star, INT64_MIN);
    Rational e;
    for (std::size_t w = 0; w <= inst.n(); ++w) {
      e += Rational(to_bigint(prof.sum[w])) * power(q, w) * power(1 - q, inst.n() - w);
    }
    e /= kernel.scale();
    e.canonicalize();
    out.enumerated = e;
  }
  return out;
}

Rational exact_landing_probability(const Lin2Instance& inst, const Assignment& x_star, const Rational& q,
                                   const Rational& eta) {
  if (x_star.size() != inst.n()) throw std::invalid_argument("exact_landing_probability: dimension mismatch");
  check_n(inst.n(), kOracleLimits.max_distribution_n, "exact_landing_probability");
  check_flip_probability(q);
  if (eta <= 0 || eta >= 1) throw std::invalid_argument("eta must lie in (0, 1)");
  const Kernel kernel(inst);
  const Rational h_star = kernel.to_rational(kernel.evaluate(x_star));
  const auto prof = weight_profile(kernel, x_star, kernel.scaled_floor((1 - eta) * h_star));
  Rational p;
  for (std::size_t w = 0; w <= inst.n(); ++w) {
    if (prof.hits[w] != 0) p += Rational(BigInt(static_cast<unsigned long>(prof.hits[w]))) * power(q, w) * power(1 - q, inst.n() - w);
  }
  p.canonicalize();
  return p;
}

}  // namespace spx
