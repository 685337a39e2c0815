#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace spx {

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

nlohmann::json checks_to_json(const std::vector<CheckResult>& results);

// Instance counts and sizes for the ten acceptance criteria.
struct AcceptanceScale {
  std::size_t equivalence_per_family = 200;
  std::vector<std::size_t> equivalence_ns = {12, 14, 16};
  std::uint64_t equivalence_ball_points = 1'000'000;
  std::size_t lin2_corpus = 100;  // correlated identity and lower tail
  std::size_t lin2_max_n = 14;
  std::size_t tail_instances = 200;
  std::size_t tail_max_n = 18;
  std::size_t lipschitz_instances = 200;
  std::size_t lipschitz_max_n = 14;
  std::size_t exponent_instances = 500;
  std::uint64_t binomial_max_N = 2000;
  std::size_t onesided_instances = 50;
  std::size_t onesided_calls = 10000;
  std::size_t unknown_runs = 200;
  std::size_t unknown_n = 14;
  std::vector<std::size_t> iteration_ns = {12, 14, 16};
  std::size_t iteration_seeds = 3;
  std::size_t iteration_runs = 200;
  unsigned workers = 1;

  static AcceptanceScale full(unsigned workers);
  static AcceptanceScale small(unsigned workers);
};

CheckResult check_oracle_equivalence(const AcceptanceScale& s);     // 1
CheckResult check_correlated_identity(const AcceptanceScale& s);    // 2
CheckResult check_lower_tail(const AcceptanceScale& s);             // 3
CheckResult check_threshold_bound(const AcceptanceScale& s);        // 4
CheckResult check_lipschitz_containment(const AcceptanceScale& s);  // 5
CheckResult check_exponent_formulas(const AcceptanceScale& s);      // 6
CheckResult check_binomial_bounds(const AcceptanceScale& s);        // 7
CheckResult check_one_sidedness(const AcceptanceScale& s);          // 8
CheckResult check_unknown_optimum(const AcceptanceScale& s);        // 9
CheckResult check_iteration_scaling(const AcceptanceScale& s);      // 10

std::vector<CheckResult> run_acceptance(const AcceptanceScale& s);

enum class SuiteScale { kSmall, kFull };

// Every module invariant, plus the acceptance criteria at the matching scale.
std::vector<CheckResult> run_invariant_suite(SuiteScale scale, unsigned workers);

}  // namespace spx
