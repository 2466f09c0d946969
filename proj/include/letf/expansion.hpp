#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "letf/models.hpp"
#include "letf/opalgebra.hpp"
#include "letf/taylor_table.hpp"

namespace letf {

/// Laurent polynomial in (lam, tau): coefficients keyed by (lam power, tau power).
class LamTauPoly {
public:
    using Key = std::pair<int, int>;
    using Map = std::map<Key, double>;

    void add(int lam_pow, int tau_pow, double c);
    double coeff(int lam_pow, int tau_pow) const;
    const Map& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    double evaluate(double lam, double tau) const;
    int lam_degree() const;
    int min_tau_power() const;
    double max_abs() const;

    LamTauPoly& operator+=(const LamTauPoly& o);
    LamTauPoly& operator-=(const LamTauPoly& o);
    LamTauPoly& operator*=(double s);
    friend LamTauPoly operator+(LamTauPoly a, const LamTauPoly& b) { return a += b; }
    friend LamTauPoly operator-(LamTauPoly a, const LamTauPoly& b) { return a -= b; }
    friend LamTauPoly operator*(LamTauPoly a, double s) { return a *= s; }
    friend LamTauPoly operator*(double s, LamTauPoly a) { return a *= s; }
    friend LamTauPoly operator*(const LamTauPoly& a, const LamTauPoly& b);

private:
    Map terms_;
};

/// Implied-vol series sigma_0 + sigma_1 + ... + sigma_N, terms[n-1] = sigma_n(lam, tau).
struct IvSeries {
    double sigma0 = 0.0;
    std::vector<LamTauPoly> terms;

    int order() const noexcept { return static_cast<int>(terms.size()); }
    /// sigma_0 + ... + sigma_upto; upto < 0 means all terms.
    double evaluate(double lam, double tau, int upto = -1) const;
};

std::string to_json(const IvSeries& s);
IvSeries iv_series_from_json(const std::string& text);

/// |beta| sqrt(2 a00).
double sigma0(const TaylorTable& table, double beta);

/// d_z^m (d_z^2 - d_z) u_BS / vega as a (lam, tau) Laurent polynomial.
LamTauPoly hermite_ratio_poly(int m, double sigma);
/// d^n u / d sigma^n / vega for n in {2, 3}.
LamTauPoly vega_ratio_poly(int order, double sigma);

/// chi_{n,m}(tau) for n = 1..order from the operator pipeline.
std::vector<ZReduction<double>> z_reductions(const TaylorTable& table, double beta, int order);

/// Implied-vol series from the operator pipeline, order <= 3.
IvSeries iv_series_engine(const TaylorTable& table, double beta, int order);
IvSeries iv_series_engine(const MarketPoint& point, const TaylorTable& table, int order);

/// Literal reproduces the closed forms as printed. Corrected repairs the printed
/// second-order general display and the SABR sigma_{1,1} term, where every
/// contribution linear in a20, a11, a02 appears at half weight.
enum class PrintedVariant { Literal, Corrected };

/// Closed-form series: CEV and Heston up to order 3, SABR up to 2; CustomTable uses the
/// general time-homogeneous formulas up to order 2.
IvSeries iv_series_printed(const ModelSpec& model, const MarketPoint& point, int order,
                           PrintedVariant variant = PrintedVariant::Corrected);
/// General time-homogeneous formulas (orders <= 2) on an arbitrary table.
IvSeries iv_series_printed_general(const TaylorTable& table, double beta, int order,
                                   PrintedVariant variant = PrintedVariant::Corrected);

enum class Payoff { Call, Put };

struct PriceApprox {
    double u0 = 0.0;
    std::vector<double> terms;  // u_1..u_N
    double total = 0.0;
};

/// Zeroth-order price: Black-Scholes at sigma_0.
double price_u0(const MarketPoint& point, const TaylorTable& table, Payoff payoff);
/// Zeroth-order price with a time-dependent a00: pass int_t^T a00(s) ds.
double price_u0_integrated(const MarketPoint& point, double integrated_a00, Payoff payoff);

/// Reusable price expansion: the operator work is done once, pricing is then cheap.
class PriceExpansion {
public:
    PriceExpansion(const TaylorTable& table, double beta, int order);

    PriceApprox price(const MarketPoint& point, Payoff payoff) const;
    double sigma0() const noexcept { return sigma0_; }
    int order() const noexcept { return static_cast<int>(chi_.size()); }

private:
    double beta_;
    double sigma0_;
    std::vector<ZReduction<double>> chi_;
};

PriceApprox price_uN(const MarketPoint& point, const TaylorTable& table, int order,
                     Payoff payoff);

enum class IvMethod { Engine, Printed };

/// Approximate implied vol at the point's (lam, tau). The table is taken around (x, y).
double iv_approx(const MarketPoint& point, const ModelSpec& model, int order, IvMethod method);
double iv_approx(const MarketPoint& point, const TaylorTable& table, int order);

inline constexpr int kMaxIvOrder = 3;
inline constexpr double kMinTau = 1e-8;

}  // namespace letf
