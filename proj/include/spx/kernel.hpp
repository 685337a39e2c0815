#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "spx/assignment.hpp"
#include "spx/instance.hpp"
#include "spx/rational.hpp"

namespace spx {

// Integer-scaled view of an objective: every term/constraint value is
// multiplied by a common positive integer `scale` so that H(x) * scale is an
// int64. All search kernels run on this view; results convert back to exact
// rationals. Construction fails with std::overflow_error when the scaled
// magnitudes do not fit in 62 bits.
class Kernel {
 public:
  explicit Kernel(const Lin2Instance& inst);
  explicit Kernel(const CspInstance& inst);
  explicit Kernel(const Instance& inst);

  std::size_t n() const { return n_; }
  const BigInt& scale() const { return scale_; }
  std::size_t factor_count() const { return factors_.size(); }

  std::int64_t evaluate(const Assignment& x) const;
  Rational to_rational(std::int64_t scaled) const;
  std::int64_t to_scaled(const Rational& value) const;  // value * scale must be integral
  // Largest scaled value v with v / scale <= bound.
  std::int64_t scaled_floor(const Rational& bound) const;

  // Weighted degree in factors; the variable's occurrence list length.
  std::size_t occurrences(std::size_t var) const { return occ_begin_[var + 1] - occ_begin_[var]; }

 private:
  friend class KernelState;

  struct Factor {
    std::uint32_t var_offset;
    std::uint32_t arity;
    bool parity;          // value = coeff * (-1)^{popcount(idx)}
    std::int64_t coeff;   // parity factors only
    std::uint32_t table_offset;  // table factors only
  };
  struct Occurrence {
    std::uint32_t factor;
    std::uint32_t bit;
  };

  std::int64_t factor_value(const Factor& f, std::uint32_t idx) const {
    if (f.parity) return (std::popcount(idx) & 1) ? -f.coeff : f.coeff;
    return tables_[f.table_offset + idx];
  }
  std::uint32_t local_index(const Factor& f, const Assignment& x) const;
  void build_occurrences();
  void check_range() const;

  std::size_t n_ = 0;
  BigInt scale_{1};
  std::vector<Factor> factors_;
  std::vector<std::uint32_t> vars_;
  std::vector<std::int64_t> tables_;
  std::vector<std::uint32_t> occ_begin_;
  std::vector<Occurrence> occ_;
};

// A point together with its scaled objective value, updated in O(deg(i))
// per coordinate flip.
class KernelState {
 public:
  KernelState(const Kernel& kernel, Assignment x);

  void flip(std::size_t i);
  std::int64_t value() const { return value_; }
  const Assignment& point() const { return x_; }
  void reset(Assignment x);

 private:
  const Kernel* kernel_;
  Assignment x_;
  std::vector<std::uint32_t> idx_;
  std::int64_t value_ = 0;
};

}  // namespace spx
