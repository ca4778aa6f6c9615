#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace rankone {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Builds num/den in lowest terms. Throws std::invalid_argument when den == 0.
Rational make_rational(const BigInt& num, const BigInt& den);

/// Parses "n/d" or "n" (optional leading sign). Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Always "num/den", including integers ("3/1").
std::string to_string(const Rational& q);

/// Scientific-notation rendering rounded half-to-even at `significant` digits.
/// For convenience columns only; never persisted as an exact quantity.
std::string approx_decimal(const Rational& q, int significant = 12);

BigInt floor_of(const Rational& q);
BigInt ceil_of(const Rational& q);

/// Rational -> int64 for values known to be small integers. Throws if not.
long long to_int64(const Rational& q);

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace rankone
