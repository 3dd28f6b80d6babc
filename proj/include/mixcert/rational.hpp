#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace mixcert {

using BigInt = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, unsigned long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(const BigInt& num, const BigInt& den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "7", "-3/8", "0.25", "1e-6", "2.5E+3" into an exact rational. Decimals are read
/// digit-for-digit, so "0.1" is exactly 1/10 rather than the nearest double.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { return ParseError(0, "not a number: '" + std::string(text) + "'"); };
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw fail();
        Rational r = num / den;
        r.canonicalize();
        return r;
    }

    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
    std::string digits;
    long scale = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) --scale;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw fail();
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw fail();
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_negative = text[i++] == '-';
        if (i == text.size()) throw fail();
        long exponent = 0;
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw fail();
            exponent = exponent * 10 + (text[i] - '0');
            if (exponent > 100000) throw fail();
        }
        scale += exp_negative ? -exponent : exponent;
    }
    BigInt num(digits, 10);
    BigInt ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    Rational r = scale < 0 ? make_rational(num, ten_pow) : Rational(num * ten_pow);
    if (negative) r = -r;
    return r;
}

inline std::string to_string(const BigInt& z) { return z.get_str(); }

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

inline BigInt pow(const BigInt& base, unsigned long exponent) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
    return r;
}

inline Rational pow(const Rational& base, unsigned long exponent) {
    Rational r(pow(BigInt(base.get_num()), exponent), pow(BigInt(base.get_den()), exponent));
    r.canonicalize();
    return r;
}

inline BigInt ceil(const Rational& q) {
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline BigInt floor(const Rational& q) {
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline bool fits_int64(const BigInt& z) {
    return mpz_fits_slong_p(z.get_mpz_t()) != 0 && sizeof(long) == sizeof(std::int64_t);
}

}  // namespace mixcert
