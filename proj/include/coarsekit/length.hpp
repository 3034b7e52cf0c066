#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <utility>
#include <ostream>
#include <string>

#include "errors.hpp"
#include "rational.hpp"

namespace coarsekit {

namespace detail {

// Rational enclosure of pi, 50 correct digits.
inline const Rational& pi_lower()
{
    static const Rational v = parse_rational("3.14159265358979323846264338327950288419716939937510");
    return v;
}

inline const Rational& pi_upper()
{
    static const Rational v = parse_rational("3.14159265358979323846264338327950288419716939937511");
    return v;
}

}  // namespace detail

/// A length of the form `q * (pi/2) + u` with exact rationals q and u, or +inf.
///
/// Edge lengths of spherical simplices are whole quarter turns and the vertical
/// edges of a coarsening space have unit length, so every path length the
/// library produces has this shape. Ordering is exact: values with equal
/// quarter-turn parts compare on `u`, everything else is decided with a
/// certified rational enclosure of pi.
class SphericalLength {
public:
    SphericalLength() = default;

    static SphericalLength quarter_turns(Rational q) { return SphericalLength(std::move(q), Rational(0), false); }
    static SphericalLength linear(Rational u) { return SphericalLength(Rational(0), std::move(u), false); }
    static SphericalLength mixed(Rational q, Rational u) { return SphericalLength(std::move(q), std::move(u), false); }
    static SphericalLength infinity() { return SphericalLength(Rational(0), Rational(0), true); }

    const Rational& quarter_part() const { return quarter_turns_; }
    const Rational& linear_part() const { return linear_; }
    bool is_infinite() const { return infinite_; }

    double to_double() const
    {
        if (infinite_) return std::numeric_limits<double>::infinity();
        return quarter_turns_.get_d() * (M_PI / 2.0) + linear_.get_d();
    }

    /// Rational enclosure [lo, hi] of the real value.
    std::pair<Rational, Rational> enclosure() const
    {
        if (infinite_) throw PreconditionError("no rational enclosure of an infinite length");
        Rational lo = quarter_turns_ * (quarter_turns_ >= 0 ? detail::pi_lower() : detail::pi_upper()) / 2 + linear_;
        Rational hi = quarter_turns_ * (quarter_turns_ >= 0 ? detail::pi_upper() : detail::pi_lower()) / 2 + linear_;
        return {lo, hi};
    }

    SphericalLength& operator+=(const SphericalLength& o)
    {
        if (infinite_ || o.infinite_) {
            *this = infinity();
            return *this;
        }
        quarter_turns_ += o.quarter_turns_;
        linear_ += o.linear_;
        return *this;
    }

    friend SphericalLength operator+(SphericalLength a, const SphericalLength& b) { return a += b; }

    friend SphericalLength operator-(const SphericalLength& a, const SphericalLength& b)
    {
        if (a.infinite_ || b.infinite_) throw PreconditionError("subtraction involving an infinite length");
        return mixed(a.quarter_turns_ - b.quarter_turns_, a.linear_ - b.linear_);
    }

    /// Scaling by a nonnegative rational.
    friend SphericalLength operator*(const Rational& s, const SphericalLength& a)
    {
        if (s < 0) throw PreconditionError("lengths scale by nonnegative factors only");
        if (a.infinite_) return s == 0 ? SphericalLength() : infinity();
        return mixed(s * a.quarter_turns_, s * a.linear_);
    }

    friend bool operator==(const SphericalLength& a, const SphericalLength& b)
    {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.quarter_turns_ == b.quarter_turns_ && a.linear_ == b.linear_;
    }

    friend std::strong_ordering operator<=>(const SphericalLength& a, const SphericalLength& b)
    {
        if (a.infinite_ || b.infinite_) {
            if (a.infinite_ == b.infinite_) return std::strong_ordering::equal;
            return a.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
        }
        int s = sign_of(a.quarter_turns_ - b.quarter_turns_, a.linear_ - b.linear_);
        if (s < 0) return std::strong_ordering::less;
        if (s > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string to_string() const
    {
        if (infinite_) return "inf";
        if (linear_ == 0) return format_rational(quarter_turns_) + " qt";
        if (quarter_turns_ == 0) return format_rational(linear_);
        return format_rational(quarter_turns_) + " qt + " + format_rational(linear_);
    }

    friend std::ostream& operator<<(std::ostream& os, const SphericalLength& l) { return os << l.to_string(); }

private:
    SphericalLength(Rational q, Rational u, bool inf) : quarter_turns_(std::move(q)), linear_(std::move(u)), infinite_(inf) {}

    // sign of q*pi/2 + u
    static int sign_of(const Rational& q, const Rational& u)
    {
        if (q == 0) return sgn(u);
        if (u == 0) return sgn(q);
        if (sgn(q) == sgn(u)) return sgn(q);
        Rational lo = q * (q > 0 ? detail::pi_lower() : detail::pi_upper()) / 2 + u;
        if (lo > 0) return 1;
        Rational hi = q * (q > 0 ? detail::pi_upper() : detail::pi_lower()) / 2 + u;
        if (hi < 0) return -1;
        throw PreconditionError("length comparison below the certified precision of pi");
    }

    Rational quarter_turns_{0};
    Rational linear_{0};
    bool infinite_ = false;
};

/// Uniform access to the two distance scalars used across the library.
template <class D>
struct DistanceTraits;

template <>
struct DistanceTraits<Rational> {
    static Rational zero() { return Rational(0); }
    static double to_double(const Rational& d) { return d.get_d(); }
    static std::string to_string(const Rational& d) { return format_rational(d); }
    static bool is_infinite(const Rational&) { return false; }
};

template <>
struct DistanceTraits<long> {
    static long zero() { return 0; }
    static double to_double(long d) { return static_cast<double>(d); }
    static std::string to_string(long d) { return std::to_string(d); }
    static bool is_infinite(long) { return false; }
};

template <>
struct DistanceTraits<SphericalLength> {
    static SphericalLength zero() { return SphericalLength(); }
    static double to_double(const SphericalLength& d) { return d.to_double(); }
    static std::string to_string(const SphericalLength& d) { return d.to_string(); }
    static bool is_infinite(const SphericalLength& d) { return d.is_infinite(); }
};

}  // namespace coarsekit
