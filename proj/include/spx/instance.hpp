#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spx/assignment.hpp"
#include "spx/rational.hpp"

namespace spx {

inline constexpr std::size_t kMaxArity = 16;

// Thrown when a structural invariant of an instance is violated. `index`
// names the offending term or constraint (0-based) when there is one.
class InvariantError : public std::invalid_argument {
 public:
  explicit InvariantError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::invalid_argument(what), index_(index) {}
  std::optional<std::size_t> index() const { return index_; }

 private:
  std::optional<std::size_t> index_;
};

// Operation undefined on an instance with H_min = 0 (T_eta degenerates).
class DegenerateInstance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Monomial {
  std::vector<std::uint32_t> vars;  // 0-based, strictly increasing after create()
  Rational coeff;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

// H(x) = sum_S c_S prod_{i in S} x_i with every |S| = k.
class Lin2Instance {
 public:
  Lin2Instance() = default;

  // Validates indices, sorts each subset, aggregates duplicate subsets and
  // drops zero aggregates. Term order follows first occurrence.
  static Lin2Instance create(std::size_t n, std::size_t k, std::vector<Monomial> terms);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  // H == 0: every assignment is optimal.
  bool trivial() const { return terms_.empty(); }

  friend bool operator==(const Lin2Instance&, const Lin2Instance&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<Monomial> terms_;
};

// Truth table of a k-ary predicate. Bit b is set iff the local assignment
// b satisfies the predicate, where bit t of b is 1 iff vars[t] = -1.
class TruthTable {
 public:
  TruthTable() = default;
  explicit TruthTable(std::size_t arity);

  static TruthTable from_hex(std::size_t arity, const std::string& hex);
  // Predicate satisfied on every local assignment except `excluded`.
  static TruthTable all_but(std::size_t arity, std::uint32_t excluded);
  // Satisfied iff popcount(b) has parity `odd`.
  static TruthTable parity(std::size_t arity, bool odd);

  std::size_t arity() const { return arity_; }
  std::size_t table_size() const { return std::size_t{1} << arity_; }
  bool test(std::uint32_t b) const { return (bits_[b >> 6] >> (b & 63)) & 1U; }
  void set(std::uint32_t b, bool value);
  std::size_t popcount() const;
  std::string to_hex() const;

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  std::size_t arity_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct Constraint {
  std::vector<std::uint32_t> vars;  // 0-based, order matters for the table
  Rational weight;
  TruthTable predicate;

  std::size_t arity() const { return vars.size(); }
  // s_j
  std::size_t satisfying_count() const { return predicate.popcount(); }
  // Lambda_j = 2^{k_j} / (2^{k_j} - s_j)
  Rational lambda() const;
  // C_j on a violating local assignment: s_j / (2^{k_j} - s_j) * w_j
  Rational violated_value() const;
  std::uint32_t local_index(const Assignment& x) const;
  Rational contribution(const Assignment& x) const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

class CspInstance {
 public:
  CspInstance() = default;

  static CspInstance create(std::size_t n, std::size_t k, std::vector<Constraint> constraints);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::size_t m() const { return constraints_.size(); }
  Rational total_weight() const;

  friend bool operator==(const CspInstance&, const CspInstance&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<Constraint> constraints_;
};

using Instance = std::variant<Lin2Instance, CspInstance>;

std::size_t instance_n(const Instance& inst);
std::size_t instance_k(const Instance& inst);
// True for an empty Lin2 instance or an empty CSP instance.
bool instance_trivial(const Instance& inst);

struct InstanceStats {
  std::size_t n = 0;
  std::size_t k = 0;
  Rational W;
  Rational Sigma;
  Rational d_avg;
  std::vector<Rational> degrees;
  Rational D;
  Rational Lambda_max;
  std::vector<std::uint32_t> light_set;  // 0-based, increasing
};

Rational evaluate_lin2(const Lin2Instance& inst, const Assignment& x);
Rational evaluate_csp(const CspInstance& inst, const Assignment& x);
Rational evaluate(const Instance& inst, const Assignment& x);

// Average of C_j over all 2^{k_j} local assignments. Always 0.
Rational centered_mean_check(const Constraint& c);

// Requires at least one constraint.
InstanceStats compute_stats(const CspInstance& inst);

// Every constraint must be an arity-k parity predicate.
Lin2Instance lin2_of_csp_parity(const CspInstance& inst);
// Each term c x_S becomes a parity constraint of weight |c|; H is unchanged.
CspInstance csp_of_lin2(const Lin2Instance& inst);

}  // namespace spx
