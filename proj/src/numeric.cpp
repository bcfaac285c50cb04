#include "aplab/numeric.hpp"

#include <stdexcept>

namespace aplab {

std::string to_string(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

std::string to_string(const BigInt& v) { return v.str(); }

BigInt parse_bigint(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty integer");
    std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (i == text.size()) throw std::invalid_argument("bad integer '" + std::string(text) + "'");
    for (std::size_t j = i; j < text.size(); ++j) {
        if (text[j] < '0' || text[j] > '9') {
            throw std::invalid_argument("bad integer '" + std::string(text) + "'");
        }
    }
    return BigInt(std::string(text));
}

Rational parse_rational(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt num = parse_bigint(text.substr(0, slash));
        BigInt den = parse_bigint(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string digits(text.substr(0, dot));
        std::string frac(text.substr(dot + 1));
        if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("bad decimal '" + std::string(text) + "'");
        }
        bool negative = !digits.empty() && digits[0] == '-';
        if (digits.empty() || digits == "-" || digits == "+") digits += "0";
        BigInt whole = parse_bigint(digits);
        BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
        BigInt part = parse_bigint(frac);
        Rational value = Rational(whole) + Rational(negative ? BigInt(-part) : part, scale);
        return value;
    }
    return Rational(parse_bigint(text));
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

Rational pow(const Rational& base, unsigned exponent) {
    Rational result = 1;
    for (unsigned i = 0; i < exponent; ++i) result *= base;
    return result;
}

BigInt floor(const Rational& r) {
    BigInt q = numerator(r) / denominator(r);
    if (numerator(r) < 0 && q * denominator(r) != numerator(r)) q -= 1;
    return q;
}

BigInt ceil(const Rational& r) {
    BigInt f = floor(r);
    return f * denominator(r) == numerator(r) ? f : f + 1;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace aplab
