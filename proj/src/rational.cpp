#include "spx/rational.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace spx {

namespace {

bool is_integer_token(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') i = 1;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view token) {
  const auto slash = token.find('/');
  std::string_view num = token.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{} : token.substr(slash + 1);
  if (!is_integer_token(num) || (slash != std::string_view::npos && !is_integer_token(den))) {
    throw std::invalid_argument("not an exact rational: '" + std::string(token) + "'");
  }
  std::string num_s(num);
  if (num_s[0] == '+') num_s.erase(0, 1);
  BigInt p(num_s, 10);
  BigInt q(1);
  if (slash != std::string_view::npos) {
    std::string den_s(den);
    if (den_s[0] == '+') den_s.erase(0, 1);
    q = BigInt(den_s, 10);
    if (q <= 0) throw std::invalid_argument("rational denominator must be positive: '" + std::string(token) + "'");
  }
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  if (v.get_den() == 1) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

double to_double(const Rational& value) { return value.get_d(); }

std::int64_t to_int64(const BigInt& value) {
  if (!value.fits_slong_p()) throw std::overflow_error("integer exceeds 64-bit range: " + value.get_str());
  static_assert(sizeof(long) == 8, "requires LP64");
  return value.get_si();
}

std::int64_t floor_to_int64(const Rational& value) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return to_int64(q);
}

}  // namespace spx
