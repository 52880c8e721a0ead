#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace nctest {

/// Exact arbitrary-precision rational scalar.
using Rational = mpq_class;

/// Comparison tolerance for the approximate (double) scalar mode.
/// One instance is threaded through a whole run; exact-mode code ignores it.
struct Tol {
    double eps = 1e-9;
};

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;

    static bool is_zero(const Rational& x, const Tol&) { return sgn(x) == 0; }
    static int sign(const Rational& x, const Tol&) { return sgn(x); }
    static Rational abs(const Rational& x) { return ::abs(x); }
    static double to_double(const Rational& x) { return x.get_d(); }
    static Rational from_long(long n) { return Rational(n); }
    static std::string to_string(const Rational& x) { return x.get_str(); }
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;

    static bool is_zero(double x, const Tol& t) { return std::fabs(x) <= t.eps; }
    static int sign(double x, const Tol& t) {
        if (x > t.eps) return 1;
        if (x < -t.eps) return -1;
        return 0;
    }
    static double abs(double x) { return std::fabs(x); }
    static double to_double(double x) { return x; }
    static double from_long(long n) { return static_cast<double>(n); }
    static std::string to_string(double x) { return std::to_string(x); }
};

inline bool is_zero(const Rational& x, const Tol& t) { return scalar_traits<Rational>::is_zero(x, t); }
inline bool is_zero(double x, const Tol& t) { return scalar_traits<double>::is_zero(x, t); }
inline int sign_of(const Rational& x, const Tol& t) { return scalar_traits<Rational>::sign(x, t); }
inline int sign_of(double x, const Tol& t) { return scalar_traits<double>::sign(x, t); }
inline Rational abs_of(const Rational& x) { return ::abs(x); }
inline double abs_of(double x) { return std::fabs(x); }

/// Parses "p/q", integer, decimal, or scientific notation into an exact rational.
/// Decimals and exponents are converted exactly (0.1 -> 1/10).
inline Rational parse_rational(const std::string& text)
{
    if (text.empty()) throw std::invalid_argument("empty numeric literal");
    if (text.find('/') != std::string::npos) {
        Rational q;
        if (q.set_str(text, 10) != 0)
            throw std::invalid_argument("bad rational literal: " + text);
        if (sgn(q.get_den()) == 0)
            throw std::invalid_argument("zero denominator: " + text);
        q.canonicalize();
        return q;
    }

    std::string digits;
    long exp10 = 0;
    bool neg = false;
    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-') {
        neg = text[i] == '-';
        ++i;
    }
    bool seen_digit = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
        digits += text[i];
        seen_digit = true;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
            digits += text[i];
            --exp10;
            seen_digit = true;
        }
    }
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        std::size_t pos = 0;
        long e = 0;
        try {
            e = std::stol(text.substr(i), &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad numeric literal: " + text);
        }
        if (i + pos != text.size())
            throw std::invalid_argument("bad numeric literal: " + text);
        exp10 += e;
        i = text.size();
    }
    if (!seen_digit || i != text.size())
        throw std::invalid_argument("bad numeric literal: " + text);

    mpz_class num(digits.empty() ? "0" : digits);
    if (neg) num = -num;
    mpz_class pow(1);
    mpz_class ten(10);
    long k = exp10 < 0 ? -exp10 : exp10;
    for (long j = 0; j < k; ++j) pow *= ten;
    Rational q = exp10 < 0 ? Rational(num, pow) : Rational(num * pow);
    q.canonicalize();
    return q;
}

template <class S>
S parse_scalar(const std::string& text);

template <>
inline Rational parse_scalar<Rational>(const std::string& text)
{
    return parse_rational(text);
}

template <>
inline double parse_scalar<double>(const std::string& text)
{
    if (text.find('/') != std::string::npos)
        return parse_rational(text).get_d();
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric literal: " + text);
    }
    if (pos != text.size())
        throw std::invalid_argument("bad numeric literal: " + text);
    return v;
}

}  // namespace nctest
