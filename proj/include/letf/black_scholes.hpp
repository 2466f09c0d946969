#pragma once

#include <vector>

namespace letf {

/// Black-Scholes inputs with zero rates. z and k are log spot and log strike.
struct BsInputs {
    double sigma;
    double tau;
    double z;
    double k;
};

double normal_cdf(double x);
double normal_pdf(double x);

double bs_call_price(const BsInputs& in);
double bs_put_price(const BsInputs& in);
double bs_vega(const BsInputs& in);

struct ImpliedVolOptions {
    double sigma_lo = 1e-6;
    double sigma_hi = 5.0;
    double price_tol = 1e-12;  // relative to e^z
    int max_iter = 200;
};

/// Implied volatility of a call price. Throws ArbitrageError when the price
/// is outside ((e^z - e^k)^+, e^z) and SolverError on non-convergence.
double implied_vol(double call_price, double tau, double z, double k,
                   const ImpliedVolOptions& opt = {});

/// d^n u / d sigma^n divided by vega, n in {2, 3}.
double vega_ratio(int order, const BsInputs& in);

/// Coefficients of the physicists' Hermite polynomial H_m, lowest power first.
std::vector<double> hermite_coefficients(int m);
double hermite(int m, double w);

/// d_z^m (d_z^2 - d_z) u / vega
///   = (-1/sqrt(2 sigma^2 tau))^m H_m(w) / (tau sigma),
///   w = (z - k - sigma^2 tau / 2) / sqrt(2 sigma^2 tau).
/// Index and scaling were confirmed against finite differences.
double hermite_vega_ratio(int m, const BsInputs& in);

inline constexpr int kMaxHermiteOrder = 12;

}  // namespace letf
