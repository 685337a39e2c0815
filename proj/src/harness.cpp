#include "spx/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <variant>

#include "spx/exponents.hpp"
#include "spx/formats.hpp"
#include "spx/kernel.hpp"
#include "spx/oracle.hpp"
#include "spx/rng.hpp"
#include "spx/sampling.hpp"
#include "spx/solvers.hpp"

namespace spx {

unsigned resolve_workers(std::optional<unsigned> requested) {
  if (const char* env = std::getenv("SPX_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  if (requested && *requested > 0) return *requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["instance"] = c.instance;
  j["eta"] = to_string(c.eta);
  j["delta"] = to_string(c.delta);
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["max_ball_points"] = c.max_ball_points;
  j["max_raw_draws"] = c.max_raw_draws ? nlohmann::json(*c.max_raw_draws) : nlohmann::json();
  j["slack"] = c.slack;
  j["output"] = c.output;
  j["format"] = c.format;
  j["extra"] = c.extra;
  return j;
}

nlohmann::json make_report(const RunConfig& config, nlohmann::json result, std::optional<std::string> timestamp) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["timestamp"] = timestamp ? nlohmann::json(*timestamp) : nlohmann::json();
  j["config"] = config_to_json(config);
  j["result"] = std::move(result);
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const std::vector<std::string>& bench_columns() {
  static const std::vector<std::string> cols = {
      "n",          "seed",           "m",         "h_min",           "threshold_count",
      "successful_count", "predicted_iterations", "mean_iterations", "mean_raw_draws", "mean_ball_points",
      "successes",  "measured_exponent", "predicted_exponent"};
  return cols;
}

namespace {

bool is_lin2_family(const std::string& f) { return f == "lin2" || f == "planted-lin2"; }

Instance bench_instance(const BenchConfig& cfg, std::size_t n, std::uint64_t inst_seed) {
  const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.m_per_n * n)));
  if (is_lin2_family(cfg.family)) {
    BigInt total;
    mpz_bin_uiui(total.get_mpz_t(), n, cfg.k);
    const std::size_t mm = total < static_cast<unsigned long>(m) ? total.get_ui() : m;
    if (cfg.family == "lin2") return gen_random_lin2(n, cfg.k, mm, {Rational(-1), Rational(1)}, inst_seed);
    RngStream prng(inst_seed, 99);
    return gen_planted_lin2(n, cfg.k, mm, {Rational(1)}, prng.uniform_assignment(n), inst_seed);
  }
  CspGenSpec spec;
  spec.n = n;
  spec.k = cfg.k;
  spec.m = m;
  spec.family = parse_predicate_family(cfg.family);
  RngStream prng(inst_seed, 99);
  return gen_planted_csp(spec, prng.uniform_assignment(n), inst_seed);
}

// Lower 64 bits of x and y differ only inside `allowed` and in at most r places.
bool within_restricted(std::uint64_t x, std::uint64_t y, std::uint64_t allowed, std::size_t r) {
  const std::uint64_t d = x ^ y;
  return (d & ~allowed) == 0 && static_cast<std::size_t>(std::popcount(d)) <= r;
}

BenchRow bench_one(const BenchConfig& cfg, std::size_t n, std::uint64_t s) {
  const std::uint64_t inst_seed = splitmix64(cfg.seed ^ splitmix64((static_cast<std::uint64_t>(n) << 32) | s));
  const Instance inst = bench_instance(cfg, n, inst_seed);
  BenchRow row;
  row.n = n;
  row.seed = s;
  row.m = std::visit([](const auto& i) -> std::size_t {
    if constexpr (std::is_same_v<std::decay_t<decltype(i)>, Lin2Instance>) {
      return i.terms().size();
    } else {
      return i.m();
    }
  }, inst);

  OracleOptions oo;
  oo.cap_minimizers = 4096;
  const auto orc = brute_force_minimum(inst, oo);
  row.h_min = orc.h_min;
  const Kernel kernel(inst);
  const auto table = value_table(kernel);
  const std::int64_t limit = kernel.scaled_floor((1 - cfg.eta) * orc.h_min);
  std::vector<std::uint64_t> mins;
  for (const auto& x : orc.minimizers) mins.push_back(x.mask());

  const bool lin2 = std::holds_alternative<Lin2Instance>(inst);
  std::uint64_t light_mask = 0;
  std::size_t r_lip = 0;
  if (lin2) {
    row.predicted_exponent = 1.0 - binary_entropy(flip_rates(cfg.eta, cfg.k, n).q_eta);
  } else {
    const auto stats = compute_stats(std::get<CspInstance>(inst));
    for (auto i : stats.light_set) light_mask |= std::uint64_t{1} << i;
    const auto lip = lipschitz_params(stats, orc.h_min, cfg.eta);
    r_lip = static_cast<std::size_t>(lip.r_lip);
    row.predicted_exponent = 1.0 - binary_entropy(to_double(lip.theta)) / 2.0;
  }
  for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
    if (table[mask] > limit) continue;
    ++row.threshold_count;
    const Assignment x = Assignment::from_mask(n, mask);
    bool hit = false;
    for (std::size_t j = 0; j < mins.size() && !hit; ++j) {
      hit = lin2 ? in_typical_shell(x, orc.minimizers[j], cfg.eta, cfg.k)
                 : within_restricted(mask, mins[j], light_mask, r_lip);
    }
    row.successful_count += hit;
  }
  row.predicted_iterations = row.successful_count == 0
                                 ? std::numeric_limits<double>::infinity()
                                 : static_cast<double>(row.threshold_count) / static_cast<double>(row.successful_count);

  Budget budget;
  budget.max_ball_points = cfg.max_ball_points;
  double it = 0, draws = 0, pts = 0;
  for (std::size_t run = 0; run < cfg.runs; ++run) {
    RngStream rng(inst_seed, 1 + run);
    const SolveOutcome out = lin2 ? solve_case1(std::get<Lin2Instance>(inst), orc.h_min, cfg.eta, rng, budget)
                                  : solve_case2(std::get<CspInstance>(inst), orc.h_min, cfg.eta, rng, budget);
    it += static_cast<double>(out.iterations);
    draws += static_cast<double>(out.raw_draws);
    pts += static_cast<double>(out.ball_points);
    row.successes += out.certified_optimal;
  }
  const double runs = static_cast<double>(std::max<std::size_t>(1, cfg.runs));
  row.mean_iterations = it / runs;
  row.mean_raw_draws = draws / runs;
  row.mean_ball_points = pts / runs;
  row.measured_exponent = std::log2(std::max(1.0, row.mean_raw_draws + row.mean_ball_points)) / static_cast<double>(n);
  return row;
}

std::string fmt(double v) {
  if (std::isinf(v)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

BenchReport bench_sweep(const BenchConfig& cfg) {
  BenchReport rep;
  if (cfg.n_step == 0) throw std::invalid_argument("bench n_step must be positive");
  if (!is_lin2_family(cfg.family)) parse_predicate_family(cfg.family);
  std::vector<std::pair<std::size_t, std::uint64_t>> jobs;
  for (std::size_t n = cfg.n_from; n <= cfg.n_to; n += cfg.n_step) {
    if (n > kOracleLimits.max_table_n) throw OracleTooLarge("bench needs n <= 24 for exact set sizes");
    for (std::uint64_t s = 0; s < cfg.seeds; ++s) jobs.emplace_back(n, s);
  }
  rep.rows.resize(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) { rep.rows[i] = bench_one(cfg, jobs[i].first, jobs[i].second); });

  std::vector<double> xs, ys;
  for (const auto& r : rep.rows) {
    xs.push_back(static_cast<double>(r.n));
    ys.push_back(r.measured_exponent * static_cast<double>(r.n));
  }
  if (!xs.empty()) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx > 0) rep.slope = sxy / sxx;
  }
  return rep;
}

std::string bench_to_csv(const BenchReport& rep) {
  std::ostringstream os;
  const auto& cols = bench_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rep.rows) {
    os << r.n << ',' << r.seed << ',' << r.m << ',' << to_string(r.h_min) << ',' << r.threshold_count << ','
       << r.successful_count << ',' << fmt(r.predicted_iterations) << ',' << fmt(r.mean_iterations) << ','
       << fmt(r.mean_raw_draws) << ',' << fmt(r.mean_ball_points) << ',' << r.successes << ','
       << fmt(r.measured_exponent) << ',' << fmt(r.predicted_exponent) << '\n';
  }
  return os.str();
}

nlohmann::json bench_to_json(const BenchReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"n", r.n},
                    {"seed", r.seed},
                    {"m", r.m},
                    {"h_min", to_string(r.h_min)},
                    {"threshold_count", r.threshold_count},
                    {"successful_count", r.successful_count},
                    {"predicted_iterations", num(r.predicted_iterations)},
                    {"mean_iterations", r.mean_iterations},
                    {"mean_raw_draws", r.mean_raw_draws},
                    {"mean_ball_points", r.mean_ball_points},
                    {"successes", r.successes},
                    {"measured_exponent", r.measured_exponent},
                    {"predicted_exponent", r.predicted_exponent}});
  }
  return {{"columns", bench_columns()}, {"rows", rows}, {"slope", rep.slope ? nlohmann::json(*rep.slope) : nlohmann::json()}};
}

nlohmann::json bench_config_to_json(const BenchConfig& c) {
  return {{"family", c.family}, {"k", c.k},         {"n_from", c.n_from},   {"n_to", c.n_to},
          {"n_step", c.n_step}, {"m_per_n", c.m_per_n}, {"seeds", c.seeds}, {"runs", c.runs},
          {"eta", to_string(c.eta)}, {"seed", c.seed}, {"max_ball_points", c.max_ball_points}};
}

}  // namespace spx
