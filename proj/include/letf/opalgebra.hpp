/// @file opalgebra.hpp
/// Operator polynomials for the Taylor/Dyson price expansion.
///
/// An OperatorPoly is a sum of normal-ordered monomials
///     c(u_1, ..., u_4, tau) * X^p Y^q Dx^i Dy^j Dz^m,
/// with X = x - xbar and Y = y - ybar acting by multiplication. The multiplication
/// operators do not commute with Dx and Dy, so products are normal ordered with the
/// Leibniz rule Dx^i X^p = sum_r C(i,r) p!/(p-r)! X^(p-r) Dx^(i-r).
/// Everything is templated on the scalar so that identities can be checked in exact
/// rational arithmetic.
#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "letf/errors.hpp"
#include "letf/taylor_table.hpp"

namespace letf {

inline constexpr int kMaxExpansionOrder = 4;
inline constexpr int kTimeSlots = kMaxExpansionOrder + 1;
/// Slot index of tau; slots 0..3 hold the elapsed times u_1..u_4.
inline constexpr int kTauSlot = kMaxExpansionOrder;

using TimeExponent = std::array<std::uint8_t, kTimeSlots>;

namespace detail {

template <class S>
bool exact_zero(const S& v) {
    return v == S(0);
}

template <class S>
S abs_value(const S& v) {
    return v < S(0) ? S(-v) : v;
}

template <class S>
void write_scalar(std::ostream& os, const S& v) {
    if constexpr (std::is_floating_point_v<S>) {
        std::ostringstream tmp;
        tmp.precision(17);
        tmp << v;
        os << tmp.str();
    } else {
        os << v;
    }
}

inline std::int64_t binomial(int n, int r) {
    std::int64_t v = 1;
    for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
}

inline std::int64_t falling(int p, int r) {
    std::int64_t v = 1;
    for (int i = 0; i < r; ++i) v *= (p - i);
    return v;
}

}  // namespace detail

/// Polynomial in the elapsed-time variables u_1..u_4 and tau.
template <class S>
class TimePoly {
public:
    using Map = std::map<TimeExponent, S>;

    TimePoly() = default;

    static TimePoly constant(const S& c) {
        TimePoly p;
        p.add_term(TimeExponent{}, c);
        return p;
    }
    static TimePoly variable(int slot, int power = 1) {
        if (slot < 0 || slot >= kTimeSlots) throw DomainError("time slot out of range");
        TimeExponent e{};
        e[slot] = static_cast<std::uint8_t>(power);
        TimePoly p;
        p.add_term(e, S(1));
        return p;
    }

    const Map& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    void add_term(const TimeExponent& e, const S& c) {
        if (detail::exact_zero(c)) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (detail::exact_zero(it->second)) terms_.erase(it);
        }
    }

    TimePoly& operator+=(const TimePoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    TimePoly& operator-=(const TimePoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, S(-c));
        return *this;
    }
    TimePoly& operator*=(const S& s) {
        if (detail::exact_zero(s)) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend TimePoly operator+(TimePoly a, const TimePoly& b) { return a += b; }
    friend TimePoly operator-(TimePoly a, const TimePoly& b) { return a -= b; }
    friend TimePoly operator*(TimePoly a, const S& s) { return a *= s; }
    friend TimePoly operator*(const TimePoly& a, const TimePoly& b) {
        TimePoly r;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                TimeExponent e;
                for (int i = 0; i < kTimeSlots; ++i)
                    e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
                r.add_term(e, S(ca * cb));
            }
        return r;
    }
    friend bool operator==(const TimePoly& a, const TimePoly& b) { return a.terms_ == b.terms_; }

    S evaluate(const std::array<S, kTimeSlots>& values) const {
        S total(0);
        for (const auto& [e, c] : terms_) {
            S m = c;
            for (int i = 0; i < kTimeSlots; ++i)
                for (int p = 0; p < e[i]; ++p) m *= values[i];
            total += m;
        }
        return total;
    }

    /// Highest u-slot index in use plus one (tau is not counted).
    int slots_used() const noexcept {
        int used = 0;
        for (const auto& [e, c] : terms_)
            for (int i = 0; i < kTauSlot; ++i)
                if (e[i] > 0 && i + 1 > used) used = i + 1;
        return used;
    }

    /// Coefficients by power of tau; requires a tau-only polynomial.
    std::map<int, S> tau_coefficients() const {
        if (slots_used() != 0)
            throw StructuralError("tau_coefficients on a polynomial with free u-variables");
        std::map<int, S> out;
        for (const auto& [e, c] : terms_) out[e[kTauSlot]] += c;
        return out;
    }

private:
    Map terms_;
};

/// Exponents of X^x Y^y Dx^dx Dy^dy Dz^dz. Ordered by derivative triple first.
struct OpExponent {
    std::uint8_t dx = 0;
    std::uint8_t dy = 0;
    std::uint8_t dz = 0;
    std::uint8_t x = 0;
    std::uint8_t y = 0;
    auto operator<=>(const OpExponent&) const = default;
};

template <class S>
class OperatorPoly {
public:
    using Map = std::map<OpExponent, TimePoly<S>>;

    OperatorPoly() = default;

    static OperatorPoly monomial(const OpExponent& e, const TimePoly<S>& c) {
        OperatorPoly p;
        p.add_term(e, c);
        return p;
    }
    static OperatorPoly monomial(const OpExponent& e, const S& c) {
        return monomial(e, TimePoly<S>::constant(c));
    }
    static OperatorPoly identity() { return monomial(OpExponent{}, S(1)); }

    const Map& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    void add_term(const OpExponent& e, const TimePoly<S>& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    OperatorPoly& operator+=(const OperatorPoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    OperatorPoly& operator-=(const OperatorPoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c * S(-1));
        return *this;
    }
    OperatorPoly& operator*=(const S& s) {
        Map out;
        for (auto& [e, c] : terms_) {
            auto v = c * s;
            if (!v.is_zero()) out.emplace(e, std::move(v));
        }
        terms_ = std::move(out);
        return *this;
    }
    OperatorPoly& operator*=(const TimePoly<S>& s) {
        Map out;
        for (auto& [e, c] : terms_) {
            auto v = c * s;
            if (!v.is_zero()) out.emplace(e, std::move(v));
        }
        terms_ = std::move(out);
        return *this;
    }

    friend OperatorPoly operator+(OperatorPoly a, const OperatorPoly& b) { return a += b; }
    friend OperatorPoly operator-(OperatorPoly a, const OperatorPoly& b) { return a -= b; }
    friend OperatorPoly operator*(OperatorPoly a, const S& s) { return a *= s; }
    friend OperatorPoly operator*(OperatorPoly a, const TimePoly<S>& s) { return a *= s; }
    friend OperatorPoly operator*(const OperatorPoly& a, const OperatorPoly& b) {
        return multiply(a, b, false);
    }
    friend bool operator==(const OperatorPoly& a, const OperatorPoly& b) {
        return a.terms_ == b.terms_;
    }

    /// Normal-ordered product. With `drop_right_derivatives`, terms that end in Dx or Dy
    /// are not generated; such terms annihilate every function of z alone, and the
    /// property is preserved under further left multiplication.
    static OperatorPoly multiply(const OperatorPoly& a, const OperatorPoly& b,
                                 bool drop_right_derivatives) {
        OperatorPoly r;
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                if (drop_right_derivatives && (eb.dx > 0 || eb.dy > 0)) continue;
                const int rx_lo = drop_right_derivatives ? ea.dx : 0;
                const int ry_lo = drop_right_derivatives ? ea.dy : 0;
                const int rx_hi = std::min<int>(ea.dx, eb.x);
                const int ry_hi = std::min<int>(ea.dy, eb.y);
                if (rx_lo > rx_hi || ry_lo > ry_hi) continue;
                const TimePoly<S> cc = ca * cb;
                for (int rx = rx_lo; rx <= rx_hi; ++rx) {
                    const std::int64_t wx = detail::binomial(ea.dx, rx) * detail::falling(eb.x, rx);
                    for (int ry = ry_lo; ry <= ry_hi; ++ry) {
                        const std::int64_t wy =
                            detail::binomial(ea.dy, ry) * detail::falling(eb.y, ry);
                        OpExponent e;
                        e.x = static_cast<std::uint8_t>(ea.x + eb.x - rx);
                        e.y = static_cast<std::uint8_t>(ea.y + eb.y - ry);
                        e.dx = static_cast<std::uint8_t>(ea.dx - rx + eb.dx);
                        e.dy = static_cast<std::uint8_t>(ea.dy - ry + eb.dy);
                        e.dz = static_cast<std::uint8_t>(ea.dz + eb.dz);
                        r.add_term(e, cc * S(wx * wy));
                    }
                }
            }
        }
        return r;
    }

private:
    Map terms_;
};

template <class S>
std::string to_string(const TimePoly<S>& p) {
    if (p.is_zero()) return "0";
    static const char* names[kTimeSlots] = {"u1", "u2", "u3", "u4", "tau"};
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        if (!first) os << " + ";
        first = false;
        detail::write_scalar(os, c);
        for (int i = 0; i < kTimeSlots; ++i)
            if (e[i] > 0) os << '*' << names[i] << '^' << int(e[i]);
    }
    return os.str();
}

/// One line per monomial, "Dx^i Dy^j Dz^m X^p Y^q : coefficient", sorted by (i, j, m, p, q).
template <class S>
std::string to_string(const OperatorPoly<S>& op) {
    std::ostringstream os;
    for (const auto& [e, c] : op.terms())
        os << "Dx^" << int(e.dx) << " Dy^" << int(e.dy) << " Dz^" << int(e.dz) << " X^"
           << int(e.x) << " Y^" << int(e.y) << " : " << to_string(c) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

enum class Axis { X, Y };

/// Which version of the last-applied (rightmost) G factor is used in L_n.
/// APart keeps only a*beta^2 (Dz^2 - Dz) in its A operator; on functions of z the two
/// forms coincide.
enum class FinalFactor { Full, APart };

namespace detail {

template <class S>
OperatorPoly<S> op(int dx, int dy, int dz, const S& c, int x = 0, int y = 0) {
    OpExponent e;
    e.dx = static_cast<std::uint8_t>(dx);
    e.dy = static_cast<std::uint8_t>(dy);
    e.dz = static_cast<std::uint8_t>(dz);
    e.x = static_cast<std::uint8_t>(x);
    e.y = static_cast<std::uint8_t>(y);
    return OperatorPoly<S>::monomial(e, c);
}

template <class S>
void check_order(int n) {
    if (n < 0 || n > kMaxExpansionOrder)
        throw UnsupportedError("expansion order " + std::to_string(n) +
                               " exceeds the supported maximum " +
                               std::to_string(kMaxExpansionOrder));
}

}  // namespace detail

/// a_{n-k,k}[(Dx^2 - Dx) + beta^2 (Dz^2 - Dz) + 2 beta Dx Dz] + b Dy^2 + c Dy
///   + f (Dx Dy + beta Dy Dz)
template <class S>
OperatorPoly<S> build_Ank(const BasicTaylorTable<S>& t, int n, int k, const S& beta,
                          bool a_part_only = false) {
    using detail::op;
    const int i = n - k;
    const S a = t.a(i, k);
    OperatorPoly<S> r;
    const S b2 = beta * beta;
    r += op<S>(0, 0, 2, a * b2);
    r += op<S>(0, 0, 1, S(-(a * b2)));
    if (a_part_only) return r;
    r += op<S>(2, 0, 0, a);
    r += op<S>(1, 0, 0, S(-a));
    r += op<S>(1, 0, 1, S(S(2) * beta * a));
    const S b = t.b(i, k), c = t.c(i, k), f = t.f(i, k);
    r += op<S>(0, 2, 0, b);
    r += op<S>(0, 1, 0, c);
    r += op<S>(1, 1, 0, f);
    r += op<S>(0, 1, 1, S(beta * f));
    return r;
}

/// M_x - xbar = X + u [a00 (2Dx + 2 beta Dz - 1) + f00 Dy]
/// M_y - ybar = Y + u [f00 (Dx + beta Dz) + 2 b00 Dy + c00]
/// with u the elapsed time in `slot`.
template <class S>
OperatorPoly<S> build_M_shift(Axis which, const BasicTaylorTable<S>& t, const S& beta,
                              int slot = 0) {
    using detail::op;
    const S a = t.a(0, 0), b = t.b(0, 0), c = t.c(0, 0), f = t.f(0, 0);
    OperatorPoly<S> drift;
    if (which == Axis::X) {
        drift += op<S>(1, 0, 0, S(S(2) * a));
        drift += op<S>(0, 0, 1, S(S(2) * beta * a));
        drift += op<S>(0, 0, 0, S(-a));
        drift += op<S>(0, 1, 0, f);
    } else {
        drift += op<S>(1, 0, 0, f);
        drift += op<S>(0, 0, 1, S(beta * f));
        drift += op<S>(0, 1, 0, S(S(2) * b));
        drift += op<S>(0, 0, 0, c);
    }
    drift *= TimePoly<S>::variable(slot);
    drift += which == Axis::X ? op<S>(0, 0, 0, S(1), 1, 0) : op<S>(0, 0, 0, S(1), 0, 1);
    return drift;
}

/// G_n = sum_k (M_x - xbar)^(n-k) (M_y - ybar)^k A_{n-k,k}.
template <class S>
OperatorPoly<S> build_Gn(const BasicTaylorTable<S>& t, int n, const S& beta, int slot = 0,
                         bool a_part_only = false) {
    detail::check_order<S>(n);
    const auto mx = build_M_shift(Axis::X, t, beta, slot);
    const auto my = build_M_shift(Axis::Y, t, beta, slot);
    OperatorPoly<S> g;
    for (int k = 0; k <= n; ++k) {
        OperatorPoly<S> term = build_Ank(t, n, k, beta, a_part_only);
        for (int j = 0; j < k; ++j) term = my * term;
        for (int j = 0; j < n - k; ++j) term = mx * term;
        g += term;
    }
    return g;
}

/// Ordered compositions (i_1, ..., i_k) of n into k positive parts.
inline std::vector<std::vector<int>> compositions(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k <= 0 || n < k) return out;
    if (k == 1) {
        out.push_back({n});
        return out;
    }
    for (int first = 1; first <= n - k + 1; ++first)
        for (auto& rest : compositions(n - first, k - 1)) {
            rest.insert(rest.begin(), first);
            out.push_back(std::move(rest));
        }
    return out;
}

/// Integral of p over the simplex 0 < u_1 < ... < u_k < tau, as a polynomial in tau.
template <class S>
TimePoly<S> simplex_integrate(const TimePoly<S>& p, int k) {
    if (k < 0 || k > kMaxExpansionOrder) throw DomainError("simplex dimension out of range");
    if (p.slots_used() > k)
        throw DomainError("time polynomial uses u_" + std::to_string(p.slots_used()) +
                          " beyond simplex dimension " + std::to_string(k));
    TimePoly<S> cur = p;
    for (int j = k - 1; j >= 0; --j) {
        TimePoly<S> next;
        for (const auto& [e, c] : cur.terms()) {
            const int pw = e[j] + 1;
            const S w = c / S(pw);
            TimeExponent up = e;
            up[j] = 0;
            up[kTauSlot] = static_cast<std::uint8_t>(up[kTauSlot] + pw);
            next.add_term(up, w);
            if (j > 0) {
                TimeExponent lo = e;
                lo[j] = 0;
                lo[j - 1] = static_cast<std::uint8_t>(lo[j - 1] + pw);
                next.add_term(lo, S(-w));
            }
        }
        cur = std::move(next);
    }
    return cur;
}

template <class S>
S simplex_integrate(const TimePoly<S>& p, int k, const S& tau) {
    std::array<S, kTimeSlots> v{};
    v.fill(S(0));
    v[kTauSlot] = tau;
    return simplex_integrate(p, k).evaluate(v);
}

/// L_n = sum_k int_simplex sum_{I_{n,k}} G_{i_1}(u_1) ... G_{i_k}(u_k), coefficients in tau.
/// By default terms ending in Dx or Dy are dropped while multiplying (they annihilate the
/// zeroth-order price, a function of z alone); pass keep_annihilated to form the full
/// product.
template <class S>
OperatorPoly<S> build_Ln(const BasicTaylorTable<S>& t, int n, const S& beta,
                         FinalFactor form = FinalFactor::APart, bool keep_annihilated = false) {
    detail::check_order<S>(n);
    if (t.order() < n)
        throw DomainError("Taylor table of order " + std::to_string(t.order()) +
                          " cannot support expansion order " + std::to_string(n));
    OperatorPoly<S> total;
    if (n == 0) return total;

    // Cache G_i per (order, slot, a-part flag).
    std::map<std::array<int, 3>, OperatorPoly<S>> cache;
    auto G = [&](int order, int slot, bool apart) -> const OperatorPoly<S>& {
        const std::array<int, 3> key{order, slot, apart ? 1 : 0};
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, build_Gn(t, order, beta, slot, apart)).first;
        return it->second;
    };

    for (int k = 1; k <= n; ++k) {
        OperatorPoly<S> sum_k;
        for (const auto& comp : compositions(n, k)) {
            OperatorPoly<S> prod = G(comp[k - 1], k - 1, form == FinalFactor::APart);
            for (int j = k - 2; j >= 0; --j)
                prod = OperatorPoly<S>::multiply(G(comp[j], j, false), prod, !keep_annihilated);
            if (!keep_annihilated) {
                OperatorPoly<S> kept;
                for (const auto& [e, c] : prod.terms())
                    if (e.dx == 0 && e.dy == 0) kept.add_term(e, c);
                prod = std::move(kept);
            }
            sum_k += prod;
        }
        for (const auto& [e, c] : sum_k.terms()) total.add_term(e, simplex_integrate(c, k));
    }
    return total;
}

/// u_n = sum_m chi_{n,m}(tau) Dz^m (Dz^2 - Dz) u_0.
template <class S>
struct ZReduction {
    std::map<int, TimePoly<S>> chi;
};

/// Keep the terms that survive on functions of z evaluated at (xbar, ybar) and divide the
/// resulting Dz polynomial by Dz^2 - Dz. A nonzero remainder is a StructuralError; in
/// floating point the remainder is compared against `rel_tol` times the size of the
/// contributing coefficients.
template <class S>
ZReduction<S> reduce_to_z(const OperatorPoly<S>& op, double rel_tol = 1e-10) {
    std::map<int, TimePoly<S>> P;
    int deg = -1;
    for (const auto& [e, c] : op.terms()) {
        if (e.dx || e.dy || e.x || e.y) continue;
        if (c.slots_used() != 0)
            throw StructuralError("reduce_to_z requires time variables to be integrated out");
        P[e.dz] += c;
        deg = std::max(deg, int(e.dz));
    }
    ZReduction<S> out;
    if (deg < 0) return out;

    auto coef = [&](int j) -> TimePoly<S> {
        auto it = P.find(j);
        return it == P.end() ? TimePoly<S>{} : it->second;
    };
    // P = Q (D^2 - D) + r1 D + r0, Q_{j-2} = P_j + Q_{j-1}.
    std::map<int, TimePoly<S>> Q;
    TimePoly<S> carry;
    for (int j = deg; j >= 2; --j) {
        carry = coef(j) + carry;
        if (!carry.is_zero()) Q[j - 2] = carry;
    }
    const TimePoly<S> r1 = coef(1) + carry;
    const TimePoly<S> r0 = coef(0);

    auto check = [&](const TimePoly<S>& r, const char* which) {
        if (r.is_zero()) return;
        if constexpr (std::is_floating_point_v<S>) {
            std::map<int, S> scale;
            for (const auto& [m, c] : P)
                for (const auto& [pw, v] : c.tau_coefficients())
                    scale[pw] += detail::abs_value(v);
            for (const auto& [pw, v] : r.tau_coefficients())
                if (detail::abs_value(v) > S(rel_tol) * scale[pw])
                    throw StructuralError(std::string("operator not divisible by Dz^2 - Dz (") +
                                          which + " remainder)");
        } else {
            throw StructuralError(std::string("operator not divisible by Dz^2 - Dz (") + which +
                                  " remainder)");
        }
    };
    check(r1, "linear");
    check(r0, "constant");
    out.chi = std::move(Q);
    return out;
}

}  // namespace letf
