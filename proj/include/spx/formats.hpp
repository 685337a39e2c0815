#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spx/assignment.hpp"
#include "spx/instance.hpp"

namespace spx {

// .spx text format
//
//   # comment
//   p lin2 <n> <k> <m>
//   t <coeff> <v1> ... <vk>                 (m lines)
//
//   p csp <n> <k> <m>
//   c <weight> <hex-table> <v1> ... <vkj>   (m lines)
//
// Variables are 1-based. Coefficients and weights are integers or "p/q".
// The truth table is lowercase hex of the 2^{kj}-bit table, bit b being the
// local assignment whose bit t is 1 iff v_{t+1} = -1.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

Instance parse_instance(std::string_view text);
std::string write_instance(const Instance& inst);

Instance read_instance_file(const std::string& path);
void write_instance_file(const std::string& path, const Instance& inst);

// Each clause becomes a unit-weight constraint violated only when every
// literal is false. A positive literal v is true iff x_v = -1. The arity
// bound is the widest clause unless `max_arity` is given, in which case
// wider clauses are rejected.
CspInstance import_dimacs_cnf(std::string_view text, std::optional<std::size_t> max_arity = std::nullopt);

nlohmann::json instance_to_json(const Instance& inst);
nlohmann::json stats_to_json(const InstanceStats& stats);

Lin2Instance gen_random_lin2(std::size_t n, std::size_t k, std::size_t m, const std::vector<Rational>& coeff_set,
                             std::uint64_t seed);

// Signs chosen so every term equals -|c| at `planted`, which is then optimal.
Lin2Instance gen_planted_lin2(std::size_t n, std::size_t k, std::size_t m, const std::vector<Rational>& coeff_set,
                              const Assignment& planted, std::uint64_t seed);

enum class PredicateFamily {
  kSat,     // OR-clause: exactly one violating local assignment
  kParity,  // XOR of the variables equals a fixed bit
  kRandom,  // uniformly random nontrivial truth table
};

PredicateFamily parse_predicate_family(std::string_view name);
std::string to_string(PredicateFamily family);

struct CspGenSpec {
  std::size_t n = 0;
  std::size_t k = 3;
  std::size_t m = 0;
  PredicateFamily family = PredicateFamily::kSat;
  // Arity drawn uniformly from [1..k] per constraint instead of exactly k.
  bool mixed_arity = false;
  // Weights drawn uniformly from this set.
  std::vector<Rational> weights = {Rational(1)};
};

// Every constraint is satisfied by `planted`, so H(planted) = -W = H_min.
CspInstance gen_planted_csp(const CspGenSpec& spec, const Assignment& planted, std::uint64_t seed);
CspInstance gen_random_csp(const CspGenSpec& spec, std::uint64_t seed);

}  // namespace spx
