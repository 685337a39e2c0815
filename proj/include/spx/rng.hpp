#pragma once

#include <cstdint>
#include <random>

#include "spx/assignment.hpp"
#include "spx/rational.hpp"

namespace spx {

std::uint64_t splitmix64(std::uint64_t x);

// Reproducible random stream. The engine is std::mt19937_64 (its output
// sequence is fixed by the C++ standard) seeded from
// splitmix64(master ^ splitmix64(stream + golden)). All derived draws use
// the helpers below rather than <random> distributions, whose algorithms
// are implementation-defined, so outputs are stable across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream = 0);

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, bound), unbiased; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  // Uniform on [0, 1) with 53 random bits.
  double unit();
  // Exact for probabilities whose reduced denominator fits in 64 bits.
  bool bernoulli(const Rational& p);
  bool bernoulli(double p);
  // Uniform point of {-1,+1}^n: full-width words masked to n bits.
  Assignment uniform_assignment(std::size_t n);

  // A fresh stream derived from this one's seed and a child index.
  RngStream child(std::uint64_t index) const;

 private:
  std::uint64_t master_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace spx
