#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace ciagrid {

/// Exact rational number. All volumes, integrals and tolerances that feed
/// floor/ceil decisions go through this type.
using Rational = mpq_class;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// p / q in canonical form; q must be nonzero.
Rational ratio(std::int64_t p, std::int64_t q);

/// Parses "3/5", "0.6", "-1.25e-2", "7" exactly.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p/q" or "p" when the denominator is 1.
std::string to_string(const Rational& q);

/// Finite decimal expansion when the denominator is 2^a 5^b, otherwise
/// a 17-significant-digit approximation.
std::string to_decimal_string(const Rational& q);

double to_double(const Rational& q);

Rational pow2(int exponent);

/// floor / ceil of a rational as a 64-bit integer; throws Error on overflow.
std::int64_t floor_to_i64(const Rational& q);
std::int64_t ceil_to_i64(const Rational& q);

std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t lcm_checked(std::int64_t a, std::int64_t b);

} // namespace ciagrid
