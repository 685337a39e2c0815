#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace spx {

using Rational = mpq_class;
using BigInt = mpz_class;

// Accepts "p", "-p", "p/q" (q > 0). Anything with a decimal point or
// exponent is rejected so that thresholds stay exact.
Rational parse_rational(std::string_view token);

// Canonical form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

// floor(value) as int64; throws std::overflow_error when out of range.
std::int64_t floor_to_int64(const Rational& value);

std::int64_t to_int64(const BigInt& value);

}  // namespace spx
