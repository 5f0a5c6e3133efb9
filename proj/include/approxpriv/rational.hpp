#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace approxpriv {

// Every probability, ratio and PAR value in the library is one of these.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1)
{
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational make_rational(const Integer& num, const Integer& den)
{
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "3", "-7/4" or "0.25" (finite decimals only) into an exact rational.
inline Rational parse_rational(const std::string& text)
{
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
        Rational q;
        if (q.set_str(text, 10) != 0) throw std::invalid_argument("bad rational literal: " + text);
        if (q.get_den() == 0) throw std::invalid_argument("rational with zero denominator: " + text);
        q.canonicalize();
        return q;
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const auto frac_len = text.size() - dot - 1;
    if (digits.empty() || digits == "-" || frac_len == 0) throw std::invalid_argument("bad rational literal: " + text);
    Integer num;
    if (num.set_str(digits, 10) != 0) throw std::invalid_argument("bad rational literal: " + text);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    return make_rational(num, den);
}

inline Integer pow_int(unsigned long base, unsigned long exp)
{
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
    return r;
}

/// 2^e for any integer e, including negative exponents.
inline Rational pow2(long e)
{
    if (e >= 0) return Rational(pow_int(2, static_cast<unsigned long>(e)));
    return make_rational(Integer(1), pow_int(2, static_cast<unsigned long>(-e)));
}

inline std::string to_string(const Rational& q)
{
    return q.get_str(10);
}

inline double to_double(const Rational& q)
{
    return q.get_d();
}

}  // namespace approxpriv
