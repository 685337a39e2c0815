#include "spx/rng.hpp"

#include <stdexcept>

namespace spx {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream)
    : master_(master_seed),
      stream_(stream),
      engine_(splitmix64(master_seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("RngStream::below: bound must be positive");
  // Reject the low residue class so every value is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

double RngStream::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

bool RngStream::bernoulli(const Rational& p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  if (!p.get_den().fits_ulong_p()) throw std::invalid_argument("bernoulli: denominator exceeds 64 bits");
  const std::uint64_t den = p.get_den().get_ui();
  const std::uint64_t num = p.get_num().get_ui();
  return below(den) < num;
}

bool RngStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return unit() < p;
}

Assignment RngStream::uniform_assignment(std::size_t n) {
  std::vector<std::uint64_t> words((n + 63) / 64);
  for (auto& w : words) w = engine_();
  return Assignment::from_words(n, std::move(words));
}

RngStream RngStream::child(std::uint64_t index) const {
  return RngStream(splitmix64(master_ ^ splitmix64(stream_)), index);
}

}  // namespace spx
