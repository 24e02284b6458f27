#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace eqs {

/// Exact rational used for every budget, cost, utility and price.
/// GMP keeps values canonical (reduced, positive denominator).
using Num = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

inline Num make_num(std::int64_t numerator, std::int64_t denominator = 1) {
  return Num(Int(numerator), Int(denominator));
}

/// Parses "12", "-3", "0.25", "1.5e3", "7/9". Throws std::invalid_argument.
Num parse_num(std::string_view text);

/// Like parse_num but returns nullopt instead of throwing.
std::optional<Num> try_parse_num(std::string_view text);

/// "p" for integers, "p/q" otherwise. Inverse of parse_num.
std::string to_string(const Num& value);

/// Finite decimal rendering; nullopt when the denominator has prime factors
/// other than 2 and 5.
std::optional<std::string> to_decimal(const Num& value);

double to_double(const Num& value);

/// Exact rational equal to a finite double.
Num from_double(double value);

inline Int numerator(const Num& value) { return boost::multiprecision::numerator(value); }
inline Int denominator(const Num& value) { return boost::multiprecision::denominator(value); }

inline bool is_integer(const Num& value) { return denominator(value) == 1; }

/// Smallest integer not less than value.
Int ceil(const Num& value);

}  // namespace eqs
