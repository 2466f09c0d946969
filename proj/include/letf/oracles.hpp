#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "letf/expansion.hpp"
#include "letf/models.hpp"
#include "letf/smile.hpp"

namespace letf {

struct McConfig {
    std::uint64_t paths = 1'000'000;
    int steps_per_year = 250;
    std::uint64_t seed = 20130601;
    bool antithetic = true;
};

void validate(const McConfig& cfg);

struct McEstimate {
    double price = 0.0;
    double std_error = 0.0;
    double half_width_95 = 0.0;
};

/// Terminal state of every simulated path: X_T, the left-point integrated variance and an
/// absorption flag. With antithetic sampling paths 2p and 2p+1 share normals up to sign.
struct TerminalSample {
    double x0 = 0.0;
    double tau = 0.0;
    int steps = 0;
    bool antithetic = true;
    bool vol_explodes_at_zero = false;
    std::vector<double> x_T;
    std::vector<double> int_var;
    std::vector<std::uint8_t> absorbed;

    std::size_t size() const noexcept { return x_T.size(); }
    /// Z_T = z + beta (X_T - x) - beta (beta - 1)/2 * int sigma^2; -inf when absorbed.
    double z_T(std::size_t i, double z, double beta) const;
};

/// log S floor below which CEV and SABR paths are absorbed.
inline constexpr double kAbsorptionLogFloor = -27.631021115928547;  // log(1e-12)

/// Euler paths of (X, Y) in parallel (OpenMP). Results are independent of thread count.
TerminalSample mc_simulate_terminal(const ModelSpec& model, const MarketPoint& point,
                                    const McConfig& cfg);
/// Same paths, single thread; reference for the parallel kernel.
TerminalSample mc_simulate_terminal_serial(const ModelSpec& model, const MarketPoint& point,
                                           const McConfig& cfg);

/// Option price on Z from a terminal sample (sample means of pair averages when antithetic).
McEstimate mc_price(const TerminalSample& s, double beta, double z, double k, Payoff payoff);
std::vector<McEstimate> mc_prices(const TerminalSample& s, double beta, double z,
                                  const std::vector<double>& strikes, Payoff payoff);

McEstimate mc_simulate(const ModelSpec& model, const MarketPoint& point, const McConfig& cfg,
                       Payoff payoff);

struct MartingaleCheck {
    McEstimate exp_x;  // E[e^{X_T}]
    McEstimate exp_z;  // E[e^{Z_T}]
};
MartingaleCheck mc_martingale(const TerminalSample& s, double beta, double z);

/// Pathwise comparison of the reconstructed Z_T with two direct discretizations driven by
/// the same increments: Euler on dZ (identical up to rounding) and Milstein on the LETF
/// price dL = beta sigma L dW (an independent O(dt) scheme).
struct PathwiseGap {
    double max_gap_euler = 0.0;
    double max_gap_milstein = 0.0;
};
PathwiseGap mc_pathwise_gap(const ModelSpec& model, const MarketPoint& point,
                            const McConfig& cfg);

/// Implied-vol smile on lam = k - z from one batch of paths (common random numbers).
SmileCurve mc_implied_smile(const ModelSpec& model, const MarketPoint& point,
                            const std::vector<double>& lam_grid, const McConfig& cfg);
SmileCurve implied_smile_from_sample(const TerminalSample& s, const MarketPoint& point,
                                     const std::vector<double>& lam_grid,
                                     const std::string& model_name);

// ---------------------------------------------------------------------------
// Heston Fourier pricing
// ---------------------------------------------------------------------------

struct FourierConfig {
    double xi_imag = -1.75;
    double truncation = 200.0;
    int nodes = 2000;
    double tail_tol = 1e-12;
};

void validate(const FourierConfig& cfg);

/// E[exp(i xi X_tau)] = exp(i xi x + C(tau, xi) + D(tau, xi) e^y).
std::complex<double> heston_char_fn(const HestonParams& p, double tau, double x, double y,
                                    std::complex<double> xi);

/// The printed C, D with the logarithm tracked by phase unwrapping over `steps` maturities
/// in (0, tau]. Slow; used to cross-check heston_char_fn.
std::complex<double> heston_char_fn_tracked(const HestonParams& p, double tau, double x,
                                            double y, std::complex<double> xi, int steps);

/// Heston price of a European option on X (beta = 1 coordinates) with log strike k.
double heston_fourier_price_x(const HestonParams& p, double tau, double x, double y, double k,
                              const FourierConfig& cfg, Payoff payoff);

/// LETF option price: parameters mapped by heston_beta_map, then priced on z.
double heston_fourier_price(const HestonParams& p, const MarketPoint& point,
                            const FourierConfig& cfg, Payoff payoff);

/// Relative out-of-the-money value below which a Fourier price is treated as noise.
inline constexpr double kFourierPriceFloor = 1e-9;

/// Implied-vol smile on lam = k - z from Fourier prices. Strikes whose out-of-the-money value
/// is below the noise floor are returned as rejected.
SmileCurve fourier_implied_smile(const HestonParams& p, const MarketPoint& point,
                                 const std::vector<double>& lam_grid, const FourierConfig& cfg);

/// Caps OpenMP threads from LETF_SMILE_THREADS when set. Returns the thread count in use.
int configure_threads_from_env();

}  // namespace letf
