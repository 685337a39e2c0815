#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spx/rational.hpp"

namespace spx {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "spx-report/1";

// SPX_THREADS, when set to a positive integer, wins over `requested`;
// otherwise `requested`, otherwise the hardware concurrency.
unsigned resolve_workers(std::optional<unsigned> requested = std::nullopt);

// Runs body(i) for i in [0, count) on up to `workers` threads. The first
// exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

struct RunConfig {
  std::string command;
  std::string instance;  // path or generator description
  Rational eta{1, 2};
  Rational delta{1, 10};
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::uint64_t max_ball_points = 1'000'000;
  std::optional<std::uint64_t> max_raw_draws;
  double slack = 1.0;
  std::string output;  // empty: stdout
  std::string format = "text";
  std::map<std::string, std::string> extra;  // command-specific settings
};

nlohmann::json config_to_json(const RunConfig& config);

// {"schema", "version", "timestamp", "config", "result"}. Keys are sorted,
// so equal inputs dump to equal bytes apart from the timestamp.
nlohmann::json make_report(const RunConfig& config, nlohmann::json result,
                           std::optional<std::string> timestamp = std::nullopt);
std::string utc_timestamp();

struct BenchConfig {
  // lin2 | planted-lin2 (solve_case1), sat | parity | random (planted CSP, solve_case2)
  std::string family = "planted-lin2";
  std::size_t k = 3;
  std::size_t n_from = 10;
  std::size_t n_to = 16;
  std::size_t n_step = 2;
  double m_per_n = 2.0;
  std::size_t seeds = 3;
  std::size_t runs = 20;  // solver runs per instance
  Rational eta{1, 2};
  std::uint64_t seed = 1;
  std::uint64_t max_ball_points = 1'000'000;
  unsigned workers = 1;
};

// Column order of the CSV output; JSON rows use the same keys.
//   n, seed, m, h_min, threshold_count, successful_count, predicted_iterations,
//   mean_iterations, mean_raw_draws, mean_ball_points, successes,
//   measured_exponent, predicted_exponent
const std::vector<std::string>& bench_columns();

struct BenchRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t m = 0;
  Rational h_min;
  std::uint64_t threshold_count = 0;   // |T_eta|
  std::uint64_t successful_count = 0;  // |S|, oracle exact
  double predicted_iterations = 0;     // |T| / |S|, infinite when S is empty
  double mean_iterations = 0;
  double mean_raw_draws = 0;
  double mean_ball_points = 0;
  std::size_t successes = 0;
  double measured_exponent = 0;   // log2(mean draws + ball points) / n
  double predicted_exponent = 0;  // 1 - kappa
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::optional<double> slope;  // least-squares slope of log2(work) against n
};

BenchReport bench_sweep(const BenchConfig& config);
std::string bench_to_csv(const BenchReport& report);
nlohmann::json bench_to_json(const BenchReport& report);
nlohmann::json bench_config_to_json(const BenchConfig& config);

}  // namespace spx
