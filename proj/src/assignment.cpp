#include "spx/assignment.hpp"

#include <bit>
#include <stdexcept>

namespace spx {

Assignment Assignment::from_mask(std::size_t n, std::uint64_t mask) {
  if (n > 63) throw std::invalid_argument("bitmask encoding is limited to n <= 63");
  if (n < 64 && (mask >> n) != 0) throw std::invalid_argument("bitmask has bits beyond n");
  Assignment a(n);
  if (n > 0) a.words_[0] = mask;
  return a;
}

Assignment Assignment::from_signs(std::span<const int> signs) {
  Assignment a(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) a.set_sign(i, signs[i]);
  return a;
}

Assignment Assignment::from_words(std::size_t n, std::vector<std::uint64_t> words) {
  Assignment a;
  a.n_ = n;
  words.resize((n + 63) / 64, 0);
  if (n % 64 != 0) words.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  a.words_ = std::move(words);
  return a;
}

void Assignment::set_sign(std::size_t i, int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("sign must be +1 or -1");
  const std::uint64_t bit = std::uint64_t{1} << (i & 63);
  if (s < 0) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

std::uint64_t Assignment::mask() const {
  if (n_ > 63) throw std::logic_error("bitmask encoding is limited to n <= 63");
  return words_.empty() ? 0 : words_[0];
}

std::size_t Assignment::weight() const {
  std::size_t w = 0;
  for (auto word : words_) w += static_cast<std::size_t>(std::popcount(word));
  return w;
}

std::string Assignment::to_string() const {
  std::string s(n_, '+');
  for (std::size_t i = 0; i < n_; ++i) {
    if (negative(i)) s[i] = '-';
  }
  return s;
}

std::strong_ordering operator<=>(const Assignment& a, const Assignment& b) {
  if (a.n_ != b.n_) return a.n_ <=> b.n_;
  for (std::size_t w = 0; w < a.words_.size(); ++w) {
    const std::uint64_t diff = a.words_[w] ^ b.words_[w];
    if (diff == 0) continue;
    const int bit = std::countr_zero(diff);
    return ((a.words_[w] >> bit) & 1U) ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return std::strong_ordering::equal;
}

std::size_t hamming_distance(const Assignment& a, const Assignment& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: dimension mismatch");
  std::size_t d = 0;
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

Assignment hadamard(const Assignment& x, const Assignment& t) {
  if (x.size() != t.size()) throw std::invalid_argument("hadamard: dimension mismatch");
  Assignment out = x;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.negative(i)) out.flip(i);
  }
  return out;
}

}  // namespace spx
