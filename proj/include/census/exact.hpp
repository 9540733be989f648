#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace census {

using ExactInteger = boost::multiprecision::cpp_int;
using ExactRational = boost::multiprecision::cpp_rational;

// n choose r, exact.  Returns 0 when r < 0 or r > n.
inline ExactInteger binomial(long long n, long long r) {
    if (n < 0) throw std::domain_error("binomial: n must be nonnegative");
    if (r < 0 || r > n) return ExactInteger(0);
    r = std::min(r, n - r);
    ExactInteger out = 1;
    for (long long i = 1; i <= r; ++i) {
        out *= ExactInteger(n - r + i);
        out /= i;   // exact: out is binomial(n-r+i, i) after each step
    }
    return out;
}

inline ExactInteger integer_pow(const ExactInteger& base, unsigned long long e) {
    ExactInteger out = 1, b = base;
    while (e > 0) {
        if (e & 1ULL) out *= b;
        e >>= 1ULL;
        if (e > 0) b *= b;
    }
    return out;
}

inline ExactRational rational_pow(const ExactRational& x, long long e) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (e == 0) return ExactRational(1);
    bool invert = e < 0;
    unsigned long long a = invert ? static_cast<unsigned long long>(-e)
                                  : static_cast<unsigned long long>(e);
    ExactInteger num = integer_pow(numerator(x), a);
    ExactInteger den = integer_pow(denominator(x), a);
    if (invert) {
        if (num == 0) throw std::domain_error("rational_pow: zero to a negative power");
        std::swap(num, den);
    }
    return ExactRational(num, den);
}

// Natural log of a positive big integer, without overflowing double.
inline double log_exact(const ExactInteger& x) {
    if (x <= 0) throw std::domain_error("log_exact: argument must be positive");
    const unsigned bits = boost::multiprecision::msb(x);
    if (bits < 900) return std::log(x.convert_to<double>());
    const int shift = static_cast<int>(bits) - 63;
    const ExactInteger top = x >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * M_LN2;
}

inline double log_exact(const ExactRational& x) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (x <= 0) throw std::domain_error("log_exact: argument must be positive");
    return log_exact(numerator(x)) - log_exact(denominator(x));
}

namespace detail {

inline ExactInteger parse_integer(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rational: empty integer part");
    for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw std::invalid_argument("parse_rational: bad digit in '" + s + "'");
    // Leading zeros would select cpp_int's octal base.
    const auto nonzero = s.find_first_not_of('0');
    return ExactInteger(nonzero == std::string::npos ? "0" : s.substr(nonzero));
}

}

// Parse "a/b", plain integers, and decimal/scientific literals ("0.25", "1e-4")
// into an exact rational.
inline ExactRational parse_rational(std::string text) {
    text.erase(std::remove_if(text.begin(), text.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               text.end());
    if (text.empty()) throw std::invalid_argument("parse_rational: empty string");

    bool negative = false;
    if (text[0] == '+' || text[0] == '-') {
        negative = text[0] == '-';
        text.erase(text.begin());
    }

    const auto slash = text.find('/');
    ExactRational value;
    if (slash != std::string::npos) {
        const ExactInteger num = detail::parse_integer(text.substr(0, slash));
        const ExactInteger den = detail::parse_integer(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
        value = ExactRational(num, den);
    } else {
        long long exponent = 0;
        auto epos = text.find_first_of("eE");
        if (epos != std::string::npos) {
            const std::string exp_part = text.substr(epos + 1);
            if (exp_part.empty()) throw std::invalid_argument("parse_rational: empty exponent");
            size_t used = 0;
            exponent = std::stoll(exp_part, &used);
            if (used != exp_part.size())
                throw std::invalid_argument("parse_rational: bad exponent '" + exp_part + "'");
            text = text.substr(0, epos);
        }
        long long frac_digits = 0;
        const auto dot = text.find('.');
        if (dot != std::string::npos) {
            frac_digits = static_cast<long long>(text.size() - dot - 1);
            text.erase(dot, 1);
        }
        const ExactInteger digits = detail::parse_integer(text);
        const long long net = exponent - frac_digits;
        const ExactInteger scale = integer_pow(ExactInteger(10),
                                               static_cast<unsigned long long>(net < 0 ? -net : net));
        value = net >= 0 ? ExactRational(digits * scale) : ExactRational(digits, scale);
    }
    return negative ? ExactRational(-value) : value;
}

// Exact dyadic value of a finite double.
inline ExactRational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("rational_from_double: value must be finite");
    if (x == 0.0) return ExactRational(0);
    int exp = 0;
    const double mant = std::frexp(x, &exp);   // x = mant * 2^exp, |mant| in [0.5, 1)
    ExactRational out(static_cast<long long>(std::ldexp(mant, 53)));
    const long long shift = exp - 53;
    if (shift >= 0)
        out *= ExactRational(integer_pow(ExactInteger(2), static_cast<unsigned long long>(shift)));
    else
        out /= ExactRational(integer_pow(ExactInteger(2), static_cast<unsigned long long>(-shift)));
    return out;
}

inline std::string to_string(const ExactInteger& x) { return x.str(); }

inline std::string to_string(const ExactRational& x) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

}
