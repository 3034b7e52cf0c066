#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "errors.hpp"

namespace coarsekit {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "p/q" or a decimal literal such as "0.25" into an exact rational.
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    while (!s.empty() && s.back() == ' ') s.pop_back();
    if (s.empty()) throw MalformedInput("empty rational literal");

    Rational r;
    auto dot = s.find('.');
    if (dot != std::string::npos && s.find('/') == std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t scale = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+") throw MalformedInput("bad decimal literal '" + s + "'");
        if (digits.front() == '+') digits.erase(digits.begin());
        Integer num;
        if (num.set_str(digits, 10) != 0) throw MalformedInput("bad decimal literal '" + s + "'");
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, scale);
        r = Rational(num, den);
    } else {
        if (!s.empty() && s.front() == '+') s.erase(s.begin());
        if (r.set_str(s, 10) != 0) throw MalformedInput("bad rational literal '" + s + "'");
        if (r.get_den() == 0) throw MalformedInput("zero denominator in '" + s + "'");
    }
    r.canonicalize();
    return r;
}

/// Always "num/den", also for integers.
inline std::string format_rational(const Rational& r)
{
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// num/den in lowest terms; mpq_class(num, den) alone does not reduce.
inline Rational ratio(const Integer& num, const Integer& den)
{
    if (den == 0) throw PreconditionError("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational ratio(long num, long den) { return ratio(Integer(num), Integer(den)); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace coarsekit
