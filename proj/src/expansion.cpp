#include "letf/expansion.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"
#include "letf/black_scholes.hpp"
#include "letf/errors.hpp"

namespace letf {

// ---------------------------------------------------------------------------
// LamTauPoly
// ---------------------------------------------------------------------------

void LamTauPoly::add(int lam_pow, int tau_pow, double c) {
    if (c == 0.0) return;
    terms_[{lam_pow, tau_pow}] += c;
}

double LamTauPoly::coeff(int lam_pow, int tau_pow) const {
    auto it = terms_.find({lam_pow, tau_pow});
    return it == terms_.end() ? 0.0 : it->second;
}

double LamTauPoly::evaluate(double lam, double tau) const {
    double total = 0.0;
    for (const auto& [k, c] : terms_) total += c * std::pow(lam, k.first) * std::pow(tau, k.second);
    return total;
}

int LamTauPoly::lam_degree() const {
    int d = -1;
    for (const auto& [k, c] : terms_) d = std::max(d, k.first);
    return d;
}

int LamTauPoly::min_tau_power() const {
    int d = std::numeric_limits<int>::max();
    for (const auto& [k, c] : terms_) d = std::min(d, k.second);
    return d;
}

double LamTauPoly::max_abs() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

LamTauPoly& LamTauPoly::operator+=(const LamTauPoly& o) {
    for (const auto& [k, c] : o.terms_) add(k.first, k.second, c);
    return *this;
}

LamTauPoly& LamTauPoly::operator-=(const LamTauPoly& o) {
    for (const auto& [k, c] : o.terms_) add(k.first, k.second, -c);
    return *this;
}

LamTauPoly& LamTauPoly::operator*=(double s) {
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

LamTauPoly operator*(const LamTauPoly& a, const LamTauPoly& b) {
    LamTauPoly r;
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_) r.add(ka.first + kb.first, ka.second + kb.second, ca * cb);
    return r;
}

double IvSeries::evaluate(double lam, double tau, int upto) const {
    const int n = (upto < 0) ? order() : std::min(upto, order());
    double v = sigma0;
    for (int i = 0; i < n; ++i) v += terms[static_cast<std::size_t>(i)].evaluate(lam, tau);
    return v;
}

std::string to_json(const IvSeries& s) {
    nlohmann::json j;
    j["sigma0"] = s.sigma0;
    j["terms"] = nlohmann::json::array();
    for (int n = 1; n <= s.order(); ++n) {
        nlohmann::json t;
        t["n"] = n;
        t["coeffs"] = nlohmann::json::array();
        for (const auto& [k, c] : s.terms[static_cast<std::size_t>(n - 1)].terms())
            t["coeffs"].push_back({{"lam_pow", k.first}, {"tau_pow", k.second}, {"value", c}});
        j["terms"].push_back(t);
    }
    return j.dump(2);
}

IvSeries iv_series_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        IvSeries s;
        s.sigma0 = j.at("sigma0").get<double>();
        for (const auto& t : j.at("terms")) {
            const int n = t.at("n").get<int>();
            if (n < 1) throw ConfigError("IvSeries term index must be >= 1");
            if (static_cast<int>(s.terms.size()) < n) s.terms.resize(static_cast<std::size_t>(n));
            for (const auto& c : t.at("coeffs"))
                s.terms[static_cast<std::size_t>(n - 1)].add(c.at("lam_pow").get<int>(),
                                                             c.at("tau_pow").get<int>(),
                                                             c.at("value").get<double>());
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("IvSeries JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

double sigma0(const TaylorTable& table, double beta) {
    const double a00 = table.a(0, 0);
    if (!(a00 > 0.0)) throw DomainError("a00 must be positive");
    if (beta == 0.0) throw DomainError("leverage ratio must be nonzero");
    return std::abs(beta) * std::sqrt(2.0 * a00);
}

LamTauPoly hermite_ratio_poly(int m, double sigma) {
    if (m < 0 || m > kMaxHermiteOrder) throw DomainError("Hermite ratio order out of range");
    // (1/s)^m H_m(v/s) / (tau sigma), s^2 = 2 sigma^2 tau, v = lam + sigma^2 tau / 2.
    const auto h = hermite_coefficients(m);
    const double s2 = sigma * sigma;
    LamTauPoly r;
    for (int j = 0; j <= m; ++j) {
        const double hj = h[static_cast<std::size_t>(j)];
        if (hj == 0.0) continue;
        const int half = (m + j) / 2;  // m + j is even whenever hj != 0
        const double base = hj / (std::pow(2.0 * s2, half) * sigma);
        double binom = 1.0;
        for (int i = 0; i <= j; ++i) {
            if (i > 0) binom = binom * (j - i + 1) / i;
            // lam^i (sigma^2 tau / 2)^(j - i) tau^(-half - 1)
            r.add(i, (j - i) - half - 1, base * binom * std::pow(0.5 * s2, j - i));
        }
    }
    return r;
}

LamTauPoly vega_ratio_poly(int order, double s) {
    const double s2 = s * s;
    LamTauPoly r;
    if (order == 2) {
        r.add(2, -1, 1.0 / (s2 * s));
        r.add(0, 1, -s / 4.0);
    } else if (order == 3) {
        r.add(4, -2, 1.0 / (s2 * s2 * s2));
        r.add(2, -1, -3.0 / (s2 * s2));
        r.add(2, 0, -0.5 / s2);
        r.add(0, 2, s2 / 16.0);
        r.add(0, 1, -0.25);
    } else {
        throw DomainError("vega_ratio supports orders 2 and 3");
    }
    return r;
}

std::vector<ZReduction<double>> z_reductions(const TaylorTable& table, double beta, int order) {
    if (order < 0 || order > kMaxExpansionOrder)
        throw UnsupportedError("expansion order " + std::to_string(order) + " not supported");
    if (table.order() < order)
        throw DomainError("Taylor table order is below the expansion order");
    std::vector<ZReduction<double>> out;
    for (int n = 1; n <= order; ++n)
        out.push_back(reduce_to_z(build_Ln(table, n, beta, FinalFactor::APart)));
    return out;
}

namespace {

LamTauPoly u_over_vega(const ZReduction<double>& red, double s0) {
    LamTauPoly r;
    for (const auto& [m, chi] : red.chi) {
        LamTauPoly c;
        for (const auto& [p, v] : chi.tau_coefficients()) c.add(0, p, v);
        r += c * hermite_ratio_poly(m, s0);
    }
    return r;
}

/// Removes the cancelled negative-tau and over-degree terms, checking they really cancelled.
LamTauPoly finish_term(const LamTauPoly& raw, int n, double scale) {
    LamTauPoly out;
    for (const auto& [k, c] : raw.terms()) {
        if (k.second < 0 || k.first > n) {
            if (std::abs(c) > 1e-8 * scale)
                throw StructuralError("sigma_" + std::to_string(n) + " term lam^" +
                                      std::to_string(k.first) + " tau^" +
                                      std::to_string(k.second) + " failed to cancel");
            continue;
        }
        out.add(k.first, k.second, c);
    }
    return out;
}

}  // namespace

IvSeries iv_series_engine(const TaylorTable& table, double beta, int order) {
    if (order < 0 || order > kMaxIvOrder)
        throw UnsupportedError("implied-vol series available up to order 3");
    IvSeries s;
    s.sigma0 = sigma0(table, beta);
    const double s0 = s.sigma0;
    const auto red = z_reductions(table, beta, order);
    std::vector<LamTauPoly> U;
    for (const auto& r : red) U.push_back(u_over_vega(r, s0));

    if (order >= 1) {
        s.terms.push_back(finish_term(U[0], 1, U[0].max_abs()));
    }
    if (order >= 2) {
        const auto& s1 = s.terms[0];
        const LamTauPoly corr = 0.5 * (s1 * s1) * vega_ratio_poly(2, s0);
        const double scale = std::max(U[1].max_abs(), corr.max_abs());
        s.terms.push_back(finish_term(U[1] - corr, 2, scale));
    }
    if (order >= 3) {
        const auto& s1 = s.terms[0];
        const auto& s2 = s.terms[1];
        const LamTauPoly c2 = (s2 * s1) * vega_ratio_poly(2, s0);
        const LamTauPoly c3 = (1.0 / 6.0) * (s1 * s1 * s1) * vega_ratio_poly(3, s0);
        const double scale = std::max({U[2].max_abs(), c2.max_abs(), c3.max_abs()});
        s.terms.push_back(finish_term(U[2] - c2 - c3, 3, scale));
    }
    return s;
}

IvSeries iv_series_engine(const MarketPoint& point, const TaylorTable& table, int order) {
    validate(point);
    return iv_series_engine(table, point.beta, order);
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

namespace {

int sgn(double v) { return v > 0.0 ? 1 : -1; }

IvSeries printed_cev(const CevParams& p, const MarketPoint& pt, int order) {
    const double be = pt.beta, g1 = p.gamma - 1.0;
    IvSeries s;
    s.sigma0 = std::abs(be) * std::sqrt(p.delta * p.delta * std::exp(2.0 * pt.x * g1));
    const double s0 = s.sigma0;
    const double s03 = s0 * s0 * s0, s05 = s03 * s0 * s0, s07 = s05 * s0 * s0;
    const double b2 = be * be, b3 = b2 * be, b4 = b2 * b2, b5 = b4 * be, b6 = b3 * b3;
    if (order >= 1) {
        LamTauPoly t;
        t.add(0, 1, (be - 1) * g1 * s03 / (4 * b2));
        t.add(1, 0, g1 * s0 / (2 * be));
        s.terms.push_back(t);
    }
    if (order >= 2) {
        LamTauPoly t;
        const double g2 = g1 * g1;
        t.add(0, 1, g2 * s03 / (24 * b2));
        t.add(0, 2, (2 * be * (6 * be - 13) + 13) * g2 * s05 / (96 * b4));
        t.add(1, 1, 7 * (be - 1) * g2 * s03 / (24 * b3));
        t.add(2, 0, g2 * s0 / (12 * b2));
        s.terms.push_back(t);
    }
    if (order >= 3) {
        LamTauPoly t;
        const double g3 = g1 * g1 * g1;
        t.add(0, 2, 5 * (be - 1) * g3 * s05 / (32 * b4));
        t.add(0, 3, (be - 1) * (26 * b2 - 70 * be + 35) * g3 * s07 / (384 * b6));
        t.add(1, 1, g3 * s03 / (16 * b3));
        t.add(1, 2, 5 * (2 * be * (4 * be - 9) + 9) * g3 * s05 / (192 * b5));
        t.add(2, 1, 7 * (be - 1) * g3 * s03 / (48 * b4));
        s.terms.push_back(t);
    }
    return s;
}

IvSeries printed_heston(const HestonParams& p, const MarketPoint& pt, int order) {
    const double be = pt.beta, de = p.delta, rho = p.rho, ka = p.kappa, th = p.theta;
    IvSeries s;
    s.sigma0 = std::abs(be) * std::sqrt(std::exp(pt.y));
    const double s0 = s.sigma0, s02 = s0 * s0, s03 = s02 * s0, s04 = s02 * s02, s05 = s04 * s0,
                 s06 = s04 * s02;
    const double b2 = be * be, b3 = b2 * be, b4 = b2 * b2, b6 = b4 * b2;
    const double d2 = de * de, d3 = d2 * de, r2 = rho * rho;
    const double Q = d2 - 2 * th * ka;
    const double bdr = be * de * rho;
    if (order >= 1) {
        LamTauPoly t;
        t.add(0, 1, (s02 * (bdr - 2 * ka) - b2 * Q) / (8 * s0));
        t.add(1, 0, bdr / (4 * s0));
        s.terms.push_back(t);
    }
    if (order >= 2) {
        LamTauPoly t;
        t.add(0, 1, b2 * d2 * (r2 + 8) / (96 * s0));
        t.add(0, 2,
              (-3 * b4 * Q * Q - 2 * b2 * s02 * Q * (bdr - 2 * ka) +
               4 * s04 * (be * de * (be * de * (2 * r2 - 1) - 5 * ka * rho) + 5 * ka * ka)) /
                  (384 * s03));
        t.add(1, 1, bdr * (5 * b2 * Q + s02 * (2 * ka - bdr)) / (96 * s03));
        t.add(2, 0, b2 * d2 * (2 - 5 * r2) / (48 * s03));
        s.terms.push_back(t);
    }
    if (order >= 3) {
        LamTauPoly t;
        t.add(0, 2, b2 * d2 * (b2 * (5 * r2 + 4) * Q + 3 * r2 * s02 * (bdr - 2 * ka)) / (768 * s03));
        t.add(0, 3,
              (-3 * b6 * Q * Q * Q + b4 * s02 * Q * Q * (bdr - 2 * ka) +
               4 * b2 * ka * s04 * Q * (bdr - ka)) /
                  (3072 * s05));
        t.add(0, 3,
              2 * s06 * (bdr - 2 * ka) * (be * de * (be * de * (5 * r2 - 6) - 6 * ka * rho) + 6 * ka * ka) /
                  (3072 * s05));
        t.add(1, 1, -b3 * d3 * rho * (9 * r2 + 8) / (384 * s03));
        t.add(1, 2, bdr * (21 * b4 * Q * Q - 10 * b2 * s02 * Q * (bdr - 2 * ka)) / (1536 * s05));
        t.add(1, 2,
              bdr * (4 * s04 * (be * de * (be * (de - 2 * de * r2) + 3 * ka * rho) - 3 * ka * ka)) /
                  (1536 * s05));
        t.add(2, 1,
              -b2 * d2 * (b2 * (23 * r2 - 8) * Q + (7 * r2 - 2) * s02 * (2 * ka - bdr)) / (384 * s05));
        t.add(3, 0, b3 * d3 * rho * (8 * r2 - 5) / (96 * s05));
        s.terms.push_back(t);
    }
    return s;
}

/// Terms of the general second-order cross display that are linear in a11.
LamTauPoly general_a11_part(double be, double s0, double a11, double c00, double f00) {
    const double s02 = s0 * s0, s03 = s02 * s0, s05 = s03 * s02;
    const double b2 = be * be;
    LamTauPoly t;
    t.add(0, 1, b2 * s02 * a11 * f00 / (12 * s03));
    t.add(0, 2, 2 * (be - 1) * s02 * a11 * (2 * c00 + be * f00) / (48 * s0));
    t.add(1, 1, be * 2 * s02 * a11 * (2 * c00 + (2 * be - 1) * f00) / (24 * s03));
    t.add(2, 0, b2 * s02 * a11 * f00 / (6 * s05));
    return t;
}

IvSeries printed_sabr(const SabrParams& p, const MarketPoint& pt, int order,
                      PrintedVariant variant) {
    if (order > 2)
        throw UnsupportedError("SABR sigma_3 is not printed in closed form; use the engine");
    const double be = pt.beta, de = p.delta, rho = p.rho, g1 = p.gamma - 1.0;
    const double sg = sgn(be), ab = std::abs(be);
    IvSeries s;
    s.sigma0 = ab * std::sqrt(std::exp(2.0 * pt.y + 2.0 * pt.x * g1));
    const double s0 = s.sigma0, s02 = s0 * s0, s03 = s02 * s0, s05 = s03 * s02;
    const double b2 = be * be, b3 = b2 * be, b4 = b2 * b2, d2 = de * de, r2 = rho * rho;
    if (order >= 1) {
        LamTauPoly t;
        t.add(0, 1, (be - 1) * g1 * s03 / (4 * b2));
        t.add(1, 0, g1 * s0 / (2 * be));
        t.add(0, 1, -0.25 * de * s0 * (de - rho * s0 * sg));
        t.add(1, 0, 0.5 * de * rho * sg);
        s.terms.push_back(t);
    }
    if (order >= 2) {
        LamTauPoly t;
        const double g2 = g1 * g1;
        // sigma_{2,0}
        t.add(0, 1, g2 * s03 / (24 * b2));
        t.add(0, 2, (2 * be * (6 * be - 13) + 13) * g2 * s05 / (96 * b4));
        t.add(1, 1, 7 * (be - 1) * g2 * s03 / (24 * b3));
        t.add(2, 0, g2 * s0 / (12 * b2));
        // sigma_{1,1}
        t.add(0, 1, g1 * de * rho * s02 / (12 * ab));
        t.add(0, 2, g1 * de * s03 * (be * (6 * be - 7) * rho * s0 - 5 * (be - 1) * de * ab) /
                        (48 * ab * ab * ab));
        t.add(1, 1, g1 * de * s0 * (de * ab + (2 * be - 1) * rho * s0) / (24 * be * ab));
        t.add(2, 0, -g1 * de * rho / (3 * ab));
        // sigma_{0,2}
        t.add(0, 1, d2 * (8 - 3 * r2) * s0 / 24);
        t.add(0, 2, d2 * s0 * (5 * d2 + 4 * (3 * r2 - 1) * s02 - 14 * de * rho * s0 / sg) / 96);
        t.add(1, 1, -d2 * rho * (de - 3 * rho * s0 * sg) / (24 * sg));
        t.add(2, 0, d2 * (2 - 3 * r2) / (12 * s0));
        if (variant == PrintedVariant::Corrected) {
            const double a00 = s02 / (2 * b2);
            const double a11 = 4 * g1 * a00;
            const double f00 = rho * de * s0 / ab;
            t += general_a11_part(be, s0, a11, -0.5 * d2, f00);
        }
        s.terms.push_back(t);
    }
    return s;
}

}  // namespace

IvSeries iv_series_printed_general(const TaylorTable& tab, double be, int order,
                                   PrintedVariant variant) {
    if (order < 0 || order > 2)
        throw UnsupportedError("general closed-form series printed up to order 2 only");
    if (tab.order() < order) throw DomainError("Taylor table order is below the requested order");
    IvSeries s;
    s.sigma0 = sigma0(tab, be);
    const double s0 = s.sigma0, s02 = s0 * s0, s03 = s02 * s0, s04 = s02 * s02, s05 = s04 * s0,
                 s07 = s05 * s02;
    const double b2 = be * be, b3 = b2 * be, b4 = b2 * b2, b6 = b4 * b2;
    if (order >= 1) {
        const double a10 = tab.a(1, 0), a01 = tab.a(0, 1);
        const double c00 = tab.c(0, 0), f00 = tab.f(0, 0);
        LamTauPoly t;
        t.add(0, 1, (be - 1) * s0 * a10 / 4);
        t.add(1, 0, be * a10 / (2 * s0));
        t.add(0, 1, b2 * a01 * (2 * c00 + be * f00) / (4 * s0));
        t.add(1, 0, b3 * a01 * f00 / (2 * s03));
        s.terms.push_back(t);
    }
    if (order >= 2) {
        const double w = (variant == PrintedVariant::Corrected) ? 2.0 : 1.0;
        const double a10 = tab.a(1, 0), a01 = tab.a(0, 1);
        const double a20 = w * tab.a(2, 0), a11 = w * tab.a(1, 1), a02 = w * tab.a(0, 2);
        const double b00 = tab.b(0, 0), c00 = tab.c(0, 0), c10 = tab.c(1, 0), c01 = tab.c(0, 1);
        const double f00 = tab.f(0, 0), f10 = tab.f(1, 0), f01 = tab.f(0, 1);
        LamTauPoly t;
        // sigma_{2,0}
        t.add(0, 1, (2 * s02 * a20 - 3 * b2 * a10 * a10) / (24 * s0));
        t.add(0, 2, (b2 * (2 * be * (2 * be - 5) + 5) * s0 * a10 * a10 + 4 * (be - 1) * (be - 1) * s03 * a20) /
                        (96 * b2));
        t.add(1, 1, -(be - 1) * (b2 * a10 * a10 - 4 * s02 * a20) / (24 * be * s0));
        t.add(2, 0, (2 * s02 * a20 - 3 * b2 * a10 * a10) / (12 * s03));
        // sigma_{1,1}
        t.add(0, 1, b2 * (a01 * (b2 * a10 * f00 - 2 * s02 * f10) + s02 * a11 * f00) / (12 * s03));
        t.add(0, 2,
              (a01 * (b2 * a10 * (2 * (be - 1) * c00 - be * f00) + 2 * (be - 1) * s02 * (2 * c10 + be * f10)) +
               2 * (be - 1) * s02 * a11 * (2 * c00 + be * f00)) /
                  (48 * s0));
        t.add(1, 1,
              be *
                  (a01 * (5 * b2 * a10 * ((1 - 2 * be) * f00 - 2 * c00) + 2 * s02 * (2 * c10 + (2 * be - 1) * f10)) +
                   2 * s02 * a11 * (2 * c00 + (2 * be - 1) * f00)) /
                  (24 * s03));
        t.add(2, 0, b2 * (a01 * (s02 * f10 - 5 * b2 * a10 * f00) + s02 * a11 * f00) / (6 * s05));
        // sigma_{0,2}
        t.add(0, 1,
              (12 * b2 * s04 * a02 * b00 - 4 * b4 * s02 * (2 * a01 * a01 * b00 + a01 * f00 * f01 + a02 * f00 * f00) +
               9 * b6 * a01 * a01 * f00 * f00) /
                  (24 * s05));
        t.add(0, 2,
              b2 *
                  (s02 * (-2 * b2 * a01 * a01 * b00 + a01 * (2 * c00 + be * f00) * (2 * c01 + be * f01) +
                          a02 * (2 * c00 + be * f00) * (2 * c00 + be * f00)) -
                   3 * b2 * a01 * a01 * c00 * (c00 + be * f00)) /
                  (24 * s03));
        t.add(1, 1,
              b3 *
                  (-9 * b2 * a01 * a01 * f00 * (2 * c00 + be * f00) + 4 * s02 * a02 * f00 * (2 * c00 + be * f00) +
                   4 * s02 * a01 * (f01 * (c00 + be * f00) + c01 * f00)) /
                  (24 * s05));
        t.add(2, 0,
              b4 * (2 * s02 * (2 * a01 * a01 * b00 + a01 * f00 * f01 + a02 * f00 * f00) - 9 * b2 * a01 * a01 * f00 * f00) /
                  (12 * s07));
        s.terms.push_back(t);
    }
    return s;
}

IvSeries iv_series_printed(const ModelSpec& model, const MarketPoint& point, int order,
                           PrintedVariant variant) {
    validate(point);
    if (order < 0) throw DomainError("order must be nonnegative");
    switch (model.kind()) {
        case ModelKind::CEV:
            if (order > 3) throw UnsupportedError("CEV closed form printed up to order 3");
            return printed_cev(model.cev_params(), point, order);
        case ModelKind::Heston:
            if (order > 3) throw UnsupportedError("Heston closed form printed up to order 3");
            return printed_heston(model.heston_params(), point, order);
        case ModelKind::SABR:
            return printed_sabr(model.sabr_params(), point, order, variant);
        case ModelKind::CustomTable:
            return iv_series_printed_general(model.custom_table(), point.beta, order, variant);
    }
    throw UnsupportedError("unknown model kind");
}

// ---------------------------------------------------------------------------
// Prices
// ---------------------------------------------------------------------------

namespace {

void check_tau(double tau) {
    if (!(tau >= kMinTau)) throw DomainError("time to maturity below 1e-8 is not supported");
}

double bs_price(Payoff payoff, const BsInputs& in) {
    return payoff == Payoff::Call ? bs_call_price(in) : bs_put_price(in);
}

}  // namespace

double price_u0(const MarketPoint& point, const TaylorTable& table, Payoff payoff) {
    validate(point);
    check_tau(point.tau());
    return bs_price(payoff, {sigma0(table, point.beta), point.tau(), point.z, point.k});
}

double price_u0_integrated(const MarketPoint& point, double integrated_a00, Payoff payoff) {
    validate(point);
    check_tau(point.tau());
    if (!(integrated_a00 > 0.0)) throw DomainError("integrated a00 must be positive");
    // Mean z - beta^2 A, variance 2 beta^2 A.
    const double var = 2.0 * point.beta * point.beta * integrated_a00;
    return bs_price(payoff, {std::sqrt(var / point.tau()), point.tau(), point.z, point.k});
}

PriceExpansion::PriceExpansion(const TaylorTable& table, double beta, int order)
    : beta_(beta), sigma0_(letf::sigma0(table, beta)), chi_(z_reductions(table, beta, order)) {}

PriceApprox PriceExpansion::price(const MarketPoint& point, Payoff payoff) const {
    validate(point);
    check_tau(point.tau());
    if (point.beta != beta_) throw DomainError("point leverage differs from the expansion's");
    const double tau = point.tau();
    const BsInputs in{sigma0_, tau, point.z, point.k};
    PriceApprox out;
    out.u0 = bs_price(payoff, in);
    out.total = out.u0;
    // z-derivatives of puts and calls coincide, so u_n does not depend on the payoff.
    const double vega = bs_vega(in);
    for (const auto& red : chi_) {
        double un = 0.0;
        for (const auto& [m, chi] : red.chi) {
            std::array<double, kTimeSlots> v{};
            v[kTauSlot] = tau;
            un += chi.evaluate(v) * hermite_vega_ratio(m, in);
        }
        un *= vega;
        out.terms.push_back(un);
        out.total += un;
    }
    return out;
}

PriceApprox price_uN(const MarketPoint& point, const TaylorTable& table, int order,
                     Payoff payoff) {
    return PriceExpansion(table, point.beta, order).price(point, payoff);
}

double iv_approx(const MarketPoint& point, const ModelSpec& model, int order, IvMethod method) {
    validate(point);
    check_tau(point.tau());
    const IvSeries s = (method == IvMethod::Printed)
                           ? iv_series_printed(model, point, order)
                           : iv_series_engine(model.taylor_table(point.x, point.y, order),
                                              point.beta, order);
    return s.evaluate(point.lam(), point.tau());
}

double iv_approx(const MarketPoint& point, const TaylorTable& table, int order) {
    validate(point);
    check_tau(point.tau());
    return iv_series_engine(table, point.beta, order).evaluate(point.lam(), point.tau());
}

}  // namespace letf
