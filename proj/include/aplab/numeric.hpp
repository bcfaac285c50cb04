#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace aplab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Rationals travel as "p/q" strings (always with an explicit denominator).
std::string to_string(const Rational& r);
std::string to_string(const BigInt& v);

// Accepts "p/q", an integer, or a plain decimal such as "0.05".
Rational parse_rational(std::string_view text);
BigInt parse_bigint(std::string_view text);

BigInt binomial(std::uint64_t n, std::uint64_t k);
Rational pow(const Rational& base, unsigned exponent);
BigInt ceil(const Rational& r);
BigInt floor(const Rational& r);
double to_double(const Rational& r);

}  // namespace aplab
