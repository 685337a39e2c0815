#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spx {

// A point of {-1,+1}^n. Stored as a bitset where bit i set means x_i = -1.
//
// Ordering is lexicographic over coordinates 0..n-1 with +1 < -1, i.e. the
// bit strings compare from coordinate 0 upward. This is the order used for
// every deterministic tie-break in the library.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Assignment from_mask(std::size_t n, std::uint64_t mask);
  static Assignment from_signs(std::span<const int> signs);
  // Bits beyond n are cleared.
  static Assignment from_words(std::size_t n, std::vector<std::uint64_t> words);

  std::size_t size() const { return n_; }

  bool negative(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  int sign(std::size_t i) const { return negative(i) ? -1 : 1; }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
  void set_sign(std::size_t i, int s);

  // Canonical bitmask; only for n <= 63.
  std::uint64_t mask() const;

  // Number of -1 entries.
  std::size_t weight() const;

  std::span<const std::uint64_t> words() const { return words_; }

  // "+-+-..." rendering, coordinate 0 first.
  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend std::strong_ordering operator<=>(const Assignment& a, const Assignment& b);

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

std::size_t hamming_distance(const Assignment& a, const Assignment& b);

// Coordinatewise product x ⊙ t.
Assignment hadamard(const Assignment& x, const Assignment& t);

}  // namespace spx
