#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace coarsekit {

/// Dense univariate polynomial over the rationals; coeffs()[i] multiplies x^i.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Polynomial constant(const Rational& a) { return Polynomial({a}); }
    static Polynomial linear_root(const Rational& r) { return Polynomial({-r, Rational(1)}); }

    const std::vector<Rational>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const Rational& leading() const { return c_.back(); }

    Rational operator()(const Rational& x) const
    {
        Rational v = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
        return v;
    }

    int sign_at(const Rational& x) const { return sgn((*this)(x)); }

    Polynomial derivative() const
    {
        std::vector<Rational> d;
        for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<long>(i));
        return Polynomial(std::move(d));
    }

    Polynomial monic() const
    {
        if (is_zero()) return *this;
        Polynomial m = *this;
        Rational lead = leading();
        for (auto& a : m.c_) a /= lead;
        return m;
    }

    /// Scaled by a positive factor so the leading coefficient is +-1; signs are kept.
    Polynomial sign_normalized() const
    {
        if (is_zero()) return *this;
        Polynomial m = *this;
        Rational lead = abs(leading());
        for (auto& a : m.c_) a /= lead;
        return m;
    }

    Polynomial operator-() const
    {
        Polynomial m = *this;
        for (auto& a : m.c_) a = -a;
        return m;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(out));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] -= b.c_[i];
        return Polynomial(std::move(out));
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    /// Quotient and remainder of a / b.
    friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b)
    {
        if (b.is_zero()) throw PreconditionError("polynomial division by zero");
        std::vector<Rational> r = a.c_;
        std::vector<Rational> q(a.c_.size() >= b.c_.size() ? a.c_.size() - b.c_.size() + 1 : 0);
        for (std::size_t k = q.size(); k-- > 0;) {
            Rational f = r[k + b.c_.size() - 1] / b.leading();
            q[k] = f;
            if (f == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[k + j] -= f * b.c_[j];
        }
        return {Polynomial(std::move(q)), Polynomial(std::move(r))};
    }

    /// Monic gcd.
    friend Polynomial gcd(Polynomial a, Polynomial b)
    {
        while (!b.is_zero()) {
            auto r = divmod(a, b).second;
            a = std::move(b);
            b = r.monic();
        }
        return a.monic();
    }

    std::string to_string() const
    {
        if (is_zero()) return "0";
        std::string out;
        for (std::size_t i = c_.size(); i-- > 0;) {
            if (c_[i] == 0) continue;
            if (!out.empty()) out += " + ";
            out += "(" + c_[i].get_str() + ")";
            if (i > 0) out += i == 1 ? "x" : "x^" + std::to_string(i);
        }
        return out;
    }

private:
    static int sgn(const Rational& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

    void trim()
    {
        for (auto& a : c_) a.canonicalize();
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Rational> c_;
};

inline Polynomial squarefree_part(const Polynomial& p)
{
    if (p.degree() < 1) return p.monic();
    auto g = gcd(p, p.derivative());
    return divmod(p, g).first.monic();
}

/// Sturm chain of a squarefree polynomial.
class SturmChain {
public:
    explicit SturmChain(const Polynomial& p)
    {
        chain_.push_back(p.sign_normalized());
        if (p.degree() < 1) return;
        chain_.push_back(p.derivative().sign_normalized());
        while (true) {
            auto r = divmod(chain_[chain_.size() - 2], chain_.back()).second;
            if (r.is_zero()) break;
            chain_.push_back((-r).sign_normalized());
        }
    }

    int variations(const Rational& x) const
    {
        int count = 0, last = 0;
        for (const auto& q : chain_) {
            int s = q.sign_at(x);
            if (s == 0) continue;
            if (last != 0 && s != last) ++count;
            last = s;
        }
        return count;
    }

    /// Distinct real roots in (lo, hi].
    int roots_in(const Rational& lo, const Rational& hi) const { return variations(lo) - variations(hi); }

private:
    std::vector<Polynomial> chain_;
};

/// Bound B with every complex root of p in |z| < B.
inline Rational cauchy_bound(const Polynomial& p)
{
    Rational m = 0;
    for (int i = 0; i < p.degree(); ++i) {
        Rational r = abs(Rational(p.coeffs()[static_cast<std::size_t>(i)] / p.leading()));
        if (m < r) m = r;
    }
    return m + 1;
}

/// A real root of a squarefree rational polynomial, isolated in (lo, hi],
/// or pinned exactly when lo == hi.
class AlgebraicReal {
public:
    AlgebraicReal() : p_(Polynomial::linear_root(0)), lo_(0), hi_(0) {}

    static AlgebraicReal rational(const Rational& r)
    {
        AlgebraicReal a;
        a.p_ = Polynomial::linear_root(r);
        a.lo_ = a.hi_ = r;
        return a;
    }

    /// Largest real root of p; throws when p has no real root.
    static AlgebraicReal largest_root(const Polynomial& p)
    {
        if (p.degree() < 1) throw PreconditionError("constant polynomial has no isolated root");
        Polynomial q = squarefree_part(p);
        SturmChain sc(q);
        Rational hi = cauchy_bound(q), lo = -hi;
        if (sc.roots_in(lo, hi) == 0) throw PreconditionError("polynomial has no real root");
        AlgebraicReal a;
        a.p_ = q;
        while (sc.roots_in(lo, hi) > 1) {
            Rational mid = (lo + hi) / 2;
            if (sc.roots_in(mid, hi) >= 1) lo = mid;
            else hi = mid;
        }
        a.lo_ = lo;
        a.hi_ = hi;
        a.settle();
        return a;
    }

    const Polynomial& polynomial() const { return p_; }
    const Rational& lower() const { return lo_; }
    const Rational& upper() const { return hi_; }
    bool is_pinned() const { return lo_ == hi_; }

    /// Halves the isolating interval.
    void refine()
    {
        if (is_pinned()) return;
        Rational mid = (lo_ + hi_) / 2;
        if (p_(mid) == 0) {
            lo_ = hi_ = mid;
            return;
        }
        if (p_.sign_at(mid) == p_.sign_at(hi_)) hi_ = mid;
        else lo_ = mid;
    }

    /// Refines until the interval is narrower than width.
    void refine_to(const Rational& width)
    {
        while (!is_pinned() && hi_ - lo_ >= width) refine();
    }

    double to_double() const
    {
        AlgebraicReal a = *this;
        a.refine_to(Rational(1, 1L << 52) * std::max(Rational(1), abs(hi_)));
        return Rational((a.lo_ + a.hi_) / 2).get_d();
    }

    /// -1, 0, 1; exact.
    friend int compare(AlgebraicReal a, AlgebraicReal b)
    {
        if (a.is_pinned() && b.is_pinned()) return a.lo_ < b.lo_ ? -1 : (b.lo_ < a.lo_ ? 1 : 0);
        if (a.is_pinned()) return -compare(std::move(b), std::move(a));
        // a is an open interval now
        if (b.is_pinned()) {
            const Rational& r = b.lo_;
            while (true) {
                if (a.is_pinned()) return compare(a, b);
                if (a.hi_ <= r) return -1;
                if (r <= a.lo_) return 1;
                if (a.p_(r) == 0) return 0;
                a.refine();
            }
        }
        Polynomial g = gcd(a.p_, b.p_);
        while (true) {
            if (a.is_pinned() || b.is_pinned()) return compare(a, b);
            if (a.hi_ <= b.lo_) return -1;
            if (b.hi_ <= a.lo_) return 1;
            if (g.degree() >= 1) {
                Rational lo = std::max(a.lo_, b.lo_), hi = std::min(a.hi_, b.hi_);
                if (SturmChain(g).roots_in(lo, hi) > 0) return 0;
            }
            a.refine();
            b.refine();
        }
    }

    friend bool operator==(const AlgebraicReal& a, const AlgebraicReal& b) { return compare(a, b) == 0; }
    friend bool operator<(const AlgebraicReal& a, const AlgebraicReal& b) { return compare(a, b) < 0; }
    friend bool operator<=(const AlgebraicReal& a, const AlgebraicReal& b) { return compare(a, b) <= 0; }

private:
    // keep the root strictly inside (lo, hi) unless pinned
    void settle()
    {
        if (p_(hi_) == 0) lo_ = hi_;
    }

    Polynomial p_;
    Rational lo_, hi_;
};

/// Characteristic polynomial det(xI - A) by the Faddeev-LeVerrier recurrence.
inline Polynomial characteristic_polynomial(const std::vector<std::vector<Rational>>& a)
{
    const std::size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n) throw PreconditionError("characteristic polynomial needs a square matrix");
    std::vector<Rational> c(n + 1);
    c[n] = 1;
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n)), am(n, std::vector<Rational>(n));
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A M_{k-1} + c_{n-k+1} I
        std::vector<std::vector<Rational>> next(n, std::vector<Rational>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) next[i][j] = am[i][j];
            next[i][i] += c[n - k + 1];
        }
        m = std::move(next);
        Rational trace = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Rational s = 0;
                for (std::size_t l = 0; l < n; ++l)
                    if (a[i][l] != 0 && m[l][j] != 0) s += a[i][l] * m[l][j];
                am[i][j] = s;
            }
        for (std::size_t i = 0; i < n; ++i) trace += am[i][i];
        c[n - k] = -trace / static_cast<long>(k);
    }
    return Polynomial(std::move(c));
}

}  // namespace coarsekit
