// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "letf/black_scholes.hpp"
#include "letf/errors.hpp"
#include "letf/expansion.hpp"
#include "letf/models.hpp"
#include "letf/oracles.hpp"
#include "letf/scaling.hpp"

using namespace letf;

namespace {

// Criterion 1
constexpr double kGoldenRelTol = 1e-10;
constexpr int kGoldenDraws = 50;
constexpr double kGoldenMaxSeconds = 10.0;
// Criteria 2-4
constexpr double kCevFloor = 0.005;
constexpr double kHestonTol = 0.005;
constexpr double kHestonLongTol = 0.02;
constexpr double kSabrFloor = 0.0075;
constexpr double kHalfWidthMultiple = 2.0;
constexpr double kPanelLamX = 0.3;
constexpr int kPanelLamPoints = 25;
constexpr std::uint64_t kPanelPaths = 1'000'000;
// Criterion 5
constexpr double kSlopeSlack = 0.4;
// Criterion 6
constexpr double kSmallTauTol = 0.002;
constexpr double kSmallTauLam = 0.1;
// Criterion 7
constexpr double kMartingaleSe = 3.0;
constexpr double kEulerIdentityTol = 1e-9;
constexpr double kMilsteinRatio = 1.8;
// Criterion 8
constexpr double kRoundTripTol = 1e-10;
constexpr double kFdRelTol = 1e-5;

struct Outcome {
    bool pass = true;
    std::string detail;
};

void report(int id, const char* name, const Outcome& o, double seconds) {
    std::printf("criterion %d [%s] %s: %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", name,
                o.detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

// ---------------------------------------------------------------------------
// 1. engine vs printed closed forms

/// Largest coefficient gap relative to the size of the series term.
double series_gap(const IvSeries& a, const IvSeries& b, int upto) {
    double worst = std::abs(a.sigma0 - b.sigma0) / std::abs(a.sigma0);
    for (int n = 0; n < upto; ++n) {
        const auto& ta = a.terms[static_cast<std::size_t>(n)];
        const auto& tb = b.terms[static_cast<std::size_t>(n)];
        const double scale = std::max({ta.max_abs(), tb.max_abs(), 1e-300});
        const LamTauPoly d = ta - tb;
        worst = std::max(worst, d.max_abs() / scale);
    }
    return worst;
}

double pick(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double pick_beta(std::mt19937_64& rng) {
    static const double betas[] = {1.0, -1.0, 2.0, -2.0, 3.0, -3.0};
    return betas[std::uniform_int_distribution<int>(0, 5)(rng)];
}

Outcome golden_equivalence() {
    Outcome o;
    std::mt19937_64 rng(7);
    double corrected = 0.0, literal = 0.0, half_weight_general = 0.0, half_weight_sabr = 0.0;
    for (int d = 0; d < kGoldenDraws; ++d) {
        const double beta = pick_beta(rng);
        const double x = pick(rng, -0.3, 0.3);
        {
            const ModelSpec m = ModelSpec::cev({pick(rng, 0.1, 0.6), pick(rng, -1.0, 0.9)});
            const MarketPoint p{0.0, 1.0, x, 0.0, 0.0, 0.0, beta};
            const IvSeries e = iv_series_engine(m.taylor_table(x, 0.0, 3), beta, 3);
            corrected = std::max(corrected, series_gap(e, iv_series_printed(m, p, 3), 3));
            literal = std::max(
                literal, series_gap(e, iv_series_printed(m, p, 3, PrintedVariant::Literal), 3));
        }
        {
            const ModelSpec m = ModelSpec::heston({pick(rng, 0.5, 3.0), pick(rng, 0.01, 0.2),
                                                   pick(rng, 0.1, 0.8), pick(rng, -0.9, 0.9)});
            const double y = std::log(pick(rng, 0.01, 0.2));
            const MarketPoint p{0.0, 1.0, x, y, 0.0, 0.0, beta};
            const IvSeries e = iv_series_engine(m.taylor_table(x, y, 3), beta, 3);
            corrected = std::max(corrected, series_gap(e, iv_series_printed(m, p, 3), 3));
            literal = std::max(
                literal, series_gap(e, iv_series_printed(m, p, 3, PrintedVariant::Literal), 3));
        }
        {
            const double delta = pick(rng, 0.1, 1.0), gamma = pick(rng, -1.0, 0.9);
            const double rho = pick(rng, -0.9, 0.9), y = pick(rng, -2.5, -0.5);
            const MarketPoint p{0.0, 1.0, x, y, 0.0, 0.0, beta};
            const ModelSpec m = ModelSpec::sabr({delta, gamma, rho});
            const IvSeries e = iv_series_engine(m.taylor_table(x, y, 2), beta, 2);
            corrected = std::max(corrected, series_gap(e, iv_series_printed(m, p, 2), 2));
            // The printed sigma_1, sigma_{2,0} (delta = 0) and sigma_{0,2} (gamma = 1) are
            // exact; only sigma_{1,1} carries the half-weight terms.
            literal = std::max(
                literal, series_gap(e, iv_series_printed(m, p, 2, PrintedVariant::Literal), 1));
            for (const ModelSpec& part : {ModelSpec::sabr({0.0, gamma, rho}),
                                          ModelSpec::sabr({delta, 1.0, rho})}) {
                const IvSeries ep = iv_series_engine(part.taylor_table(x, y, 2), beta, 2);
                literal = std::max(literal, series_gap(ep, iv_series_printed(part, p, 2,
                                                                         PrintedVariant::Literal),
                                                       2));
            }
            half_weight_sabr = std::max(
                half_weight_sabr, series_gap(e, iv_series_printed(m, p, 2, PrintedVariant::Literal), 2));
        }
        {
            TaylorTable t(2, x, 0.0);
            t.a(0, 0) = pick(rng, 0.005, 0.1);
            for (int i = 0; i <= 2; ++i)
                for (int j = 0; i + j <= 2; ++j) {
                    if (i + j > 0) t.a(i, j) = pick(rng, -0.05, 0.05);
                    t.b(i, j) = pick(rng, -0.1, 0.1);
                    t.c(i, j) = pick(rng, -0.2, 0.2);
                    t.f(i, j) = pick(rng, -0.05, 0.05);
                }
            const IvSeries e = iv_series_engine(t, beta, 2);
            corrected = std::max(corrected, series_gap(e, iv_series_printed_general(t, beta, 2), 2));
            literal = std::max(literal, series_gap(e, iv_series_printed_general(
                                                          t, beta, 1, PrintedVariant::Literal),
                                                   1));
            half_weight_general = std::max(
                half_weight_general,
                series_gap(e, iv_series_printed_general(t, beta, 2, PrintedVariant::Literal), 2));
        }
    }
    o.pass = corrected <= kGoldenRelTol && literal <= kGoldenRelTol;
    o.detail = "corrected max rel gap " + fmt("%.2e", corrected) + ", literal (terms without the half-weight defect) " +
               fmt("%.2e", literal) + "; literal general sigma_2 gap " +
               fmt("%.2e", half_weight_general) + " and SABR sigma_{1,1} gap " +
               fmt("%.2e", half_weight_sabr) + " come from the half-weight second-order terms";
    return o;
}

// ---------------------------------------------------------------------------
// 2-4. scaled LETF smiles against the exact oracles

struct PanelResult {
    double max_gap = 0.0;
    double worst_excess = -1.0;  // max over points of gap - tolerance
    int compared = 0;
    int flagged = 0;
};

/// Compares sigma_Z^(1/beta) (order `order`) with the oracle on lam_X in [-0.3, 0.3].
/// `tol_at` maps the oracle half-width (in scaled vol units) to the pointwise tolerance.
PanelResult scaled_panel(const ModelSpec& model, const MarketPoint& p0, int order,
                         const SmileCurve& exact_z, const std::function<double(double)>& tol_at) {
    const double beta = p0.beta, tau = p0.tau(), ab = std::abs(beta);
    const IvSeries s = iv_series_engine(model.taylor_table(p0.x, p0.y, order), beta, order);
    PanelResult r;
    for (const auto& pt : exact_z.points()) {
        const double approx = s.evaluate(pt.lam, tau) / ab;
        const double exact = pt.iv / ab;
        const double hw = pt.iv_half_width / ab;
        if (pt.flagged) {
            ++r.flagged;
            continue;
        }
        const double gap = std::abs(approx - exact);
        r.max_gap = std::max(r.max_gap, gap);
        r.worst_excess = std::max(r.worst_excess, gap - tol_at(hw));
        ++r.compared;
    }
    r.flagged += static_cast<int>(exact_z.rejected().size());
    return r;
}

std::vector<double> z_grid(double beta) {
    std::vector<double> g;
    for (double lx : linspace(-kPanelLamX, kPanelLamX, kPanelLamPoints)) g.push_back(beta * lx);
    std::sort(g.begin(), g.end());
    return g;
}

Outcome mc_panels(const ModelSpec& model, double x, double y, const std::vector<double>& taus,
                  int order, double floor) {
    Outcome o;
    McConfig cfg;
    cfg.paths = kPanelPaths;
    std::string detail;
    for (double tau : taus) {
        // One set of ETF paths serves both leverage ratios.
        const MarketPoint base{0.0, tau, x, y, 0.0, 0.0, 2.0};
        const TerminalSample sample = mc_simulate_terminal(model, base, cfg);
        for (double beta : {2.0, -2.0}) {
            MarketPoint p = base;
            p.beta = beta;
            const SmileCurve ex = implied_smile_from_sample(sample, p, z_grid(beta), "mc");
            const PanelResult r = scaled_panel(model, p, order, ex, [&](double hw) {
                return std::max(floor, kHalfWidthMultiple * hw);
            });
            const bool ok = r.worst_excess <= 0.0 && r.flagged == 0 && r.compared > 0;
            o.pass = o.pass && ok;
            detail += " beta=" + fmt("%+.0f", beta) + ",tau=" + fmt("%.2f", tau) + ":" +
                      fmt("%.4f", r.max_gap) + (r.flagged ? "(" + std::to_string(r.flagged) +
                                                                " flagged)"
                                                          : "") +
                      (ok ? "" : "!");
        }
    }
    o.detail = "max scaled gap per panel" + detail;
    return o;
}

Outcome heston_panels() {
    Outcome o;
    const HestonParams hp;
    const ModelSpec model = ModelSpec::heston(hp);
    const double y = std::log(hp.theta);
    std::string detail;
    bool degraded_ok = true;
    for (double tau : {0.25, 0.5, 1.0}) {
        const double tol = tau < 1.0 ? kHestonTol : kHestonLongTol;
        for (double beta : {2.0, -2.0}) {
            const MarketPoint p{0.0, tau, 0.0, y, 0.0, 0.0, beta};
            const SmileCurve ex = fourier_implied_smile(hp, p, z_grid(beta), FourierConfig{});
            const PanelResult r = scaled_panel(model, p, 3, ex, [&](double) { return tol; });
            const bool ok = r.worst_excess <= 0.0 && r.flagged == 0 && r.compared > 0;
            if (tau < 1.0)
                o.pass = o.pass && ok;
            else
                degraded_ok = degraded_ok && ok;
            detail += " beta=" + fmt("%+.0f", beta) + ",tau=" + fmt("%.2f", tau) + ":" +
                      fmt("%.4f", r.max_gap) + (ok ? "" : "!");
        }
    }
    o.pass = o.pass && degraded_ok;
    o.detail = "max scaled gap per panel" + detail +
               " (tau=1 held to the relaxed " + fmt("%.3f", kHestonLongTol) +
               ": degraded without a time-dependent expansion point)";
    return o;
}

// ---------------------------------------------------------------------------
// 5. convergence order of the price expansion

Outcome convergence_order() {
    Outcome o;
    const HestonParams hp;
    const ModelSpec model = ModelSpec::heston(hp);
    const double y = std::log(hp.theta), beta = 2.0;
    const std::vector<double> taus = {0.05, 0.1, 0.2, 0.4};
    const PriceExpansion pe(model.taylor_table(0.0, y, 3), beta, 3);
    std::vector<std::vector<double>> err(4);
    for (double tau : taus) {
        const MarketPoint p{0.0, tau, 0.0, y, 0.0, 0.0, beta};
        const double exact = heston_fourier_price(hp, p, FourierConfig{}, Payoff::Call);
        const PriceApprox a = pe.price(p, Payoff::Call);
        double partial = a.u0;
        for (int n = 0; n <= 3; ++n) {
            if (n > 0) partial += a.terms[static_cast<std::size_t>(n - 1)];
            err[static_cast<std::size_t>(n)].push_back(std::abs(exact - partial));
        }
    }
    std::string detail = "slopes";
    for (int n = 0; n <= 3; ++n) {
        const auto& e = err[static_cast<std::size_t>(n)];
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < taus.size(); ++i) {
            const double lx = std::log(taus[i]), ly = std::log(e[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double k = static_cast<double>(taus.size());
        const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        const double need = 0.5 * (n + 2) - kSlopeSlack;
        const bool ok = std::isfinite(slope) && slope >= need;
        o.pass = o.pass && ok;
        detail += " N=" + std::to_string(n) + ":" + fmt("%.2f", slope) + (ok ? ">=" : "<") +
                  fmt("%.2f", need);
    }
    o.detail = detail;
    return o;
}

// ---------------------------------------------------------------------------
// 6. small-tau agreement of scaled LETF and ETF smiles

Outcome small_tau_scaling() {
    Outcome o;
    const HestonParams hp;
    struct Case {
        ModelSpec model;
        double x, y;
    };
    const std::vector<Case> cases = {{ModelSpec::cev({}), 0.0, 0.0},
                                     {ModelSpec::heston(hp), 0.0, std::log(hp.theta)},
                                     {ModelSpec::sabr({}), 0.0, -1.5}};
    std::string detail;
    double worst_small = 0.0, worst_scaled = 0.0;
    for (const auto& c : cases) {
        const TaylorTable t = c.model.taylor_table(c.x, c.y, 3);
        const IvSeries sx = iv_series_engine(t, 1.0, 3);
        for (double beta : {2.0, -2.0, -3.0}) {
            const IvSeries sz = iv_series_engine(t, beta, 3);
            std::vector<double> d;
            for (double tau : {0.05, 0.25, 1.0}) {
                const SmileFn fz = [&, tau](double lam) { return sz.evaluate(lam, tau); };
                const SmileFn fx = [&, tau](double lam) { return sx.evaluate(lam, tau); };
                d.push_back(smile_distance(fz, scale_X_to_Z(fx, beta),
                                           LamRange{-kSmallTauLam, kSmallTauLam}));
            }
            const bool ok = d[0] <= kSmallTauTol && d[0] < d[1] && d[1] < d[2];
            worst_small = std::max(worst_small, d[0]);
            worst_scaled = std::max(worst_scaled, d[0] / std::abs(beta));
            o.pass = o.pass && ok;
            if (!ok)
                detail += " " + to_string(c.model.kind()) + " beta=" + fmt("%+.0f", beta) + ":" +
                          fmt("%.4f", d[0]) + "/" + fmt("%.4f", d[1]) + "/" + fmt("%.4f", d[2]);
        }
    }
    o.detail = "worst LETF-vol distance at tau=0.05 is " + fmt("%.5f", worst_small) + " (" +
               fmt("%.5f", worst_scaled) + " in scaled units)" +
               (detail.empty() ? ", monotone in tau" : "; failing cases d(0.05)/d(0.25)/d(1):" + detail);
    return o;
}

// ---------------------------------------------------------------------------
// 7. oracle cross-validation

Outcome oracle_cross_validation() {
    Outcome o;
    const HestonParams hp;
    const ModelSpec heston = ModelSpec::heston(hp);
    const double y = std::log(hp.theta);
    McConfig cfg;
    std::string detail = "Fourier vs MC";
    int inside = 0, total = 0;
    const double lams[] = {-0.2, 0.0, 0.2};
    for (double tau : {0.25, 0.5, 1.0}) {
        const MarketPoint base{0.0, tau, 0.0, y, 0.0, 0.0, 1.0};
        const TerminalSample s = mc_simulate_terminal(heston, base, cfg);
        int idx = 0;
        for (double beta : {2.0, -2.0, 3.0}) {
            const double lam = lams[idx++] * (tau < 0.5 ? 1.0 : 1.5);
            MarketPoint p = base;
            p.beta = beta;
            p.k = lam;
            const double f = heston_fourier_price(hp, p, FourierConfig{}, Payoff::Call);
            const McEstimate e = mc_price(s, beta, 0.0, lam, Payoff::Call);
            const bool ok = std::abs(f - e.price) <= e.half_width_95;
            inside += ok;
            ++total;
            if (!ok)
                detail += " miss(beta=" + fmt("%+.0f", beta) + ",tau=" + fmt("%.2f", tau) +
                          ",lam=" + fmt("%+.2f", lam) + ":" + fmt("%.2e", f - e.price) + " vs " +
                          fmt("%.2e", e.half_width_95) + ")";
        }
    }
    o.pass = inside == total;
    detail += " " + std::to_string(inside) + "/" + std::to_string(total) + " inside 95% CI";

    // Martingale property of e^X and e^Z on the reference parameter sets.
    const std::vector<std::pair<ModelSpec, double>> models = {
        {ModelSpec::cev({}), 0.0}, {heston, y}, {ModelSpec::sabr({}), -1.5}};
    bool mart = true;
    int mart_checks = 0, mart_miss = 0;
    for (const auto& [m, y0] : models)
        for (double tau : {0.25, 0.5, 1.0}) {
            const MarketPoint p{0.0, tau, 0.0, y0, 0.0, 0.0, 2.0};
            const TerminalSample s = mc_simulate_terminal(m, p, cfg);
            for (double beta : {2.0, -2.0}) {
                const MartingaleCheck mc = mc_martingale(s, beta, 0.0);
                const bool ok =
                    std::abs(mc.exp_x.price - 1.0) <= kMartingaleSe * mc.exp_x.std_error &&
                    std::abs(mc.exp_z.price - 1.0) <= kMartingaleSe * mc.exp_z.std_error;
                ++mart_checks;
                if (!ok) {
                    ++mart_miss;
                    detail += " martingale miss(" + to_string(m.kind()) + ",beta=" +
                              fmt("%+.0f", beta) + ",tau=" + fmt("%.2f", tau) +
                              ": E e^Z - 1 = " + fmt("%.2e", mc.exp_z.price - 1) + ", SE " +
                              fmt("%.1e", mc.exp_z.std_error) + ")";
                }
                mart = mart && ok;
            }
        }
    detail += "; martingale " + std::to_string(mart_checks - mart_miss) + "/" +
              std::to_string(mart_checks) + " within 3 SE";


    // Pathwise reconstruction of Z.
    const MarketPoint pp{0.0, 0.5, 0.0, y, 0.0, 0.0, 2.0};
    McConfig coarse = cfg, fine = cfg;
    coarse.steps_per_year = 100;
    fine.steps_per_year = 200;
    const PathwiseGap g1 = mc_pathwise_gap(heston, pp, coarse);
    const PathwiseGap g2 = mc_pathwise_gap(heston, pp, fine);
    const double ratio = g1.max_gap_milstein / g2.max_gap_milstein;
    const bool path_ok = std::max(g1.max_gap_euler, g2.max_gap_euler) <= kEulerIdentityTol &&
                         ratio >= kMilsteinRatio;
    detail += "; pathwise Euler-dZ gap " + fmt("%.1e", std::max(g1.max_gap_euler, g2.max_gap_euler)) +
              ", Milstein-L gap ratio on halving dt " + fmt("%.2f", ratio);
    o.pass = o.pass && mart && path_ok;
    o.detail = detail;
    return o;
}

// ---------------------------------------------------------------------------
// 8. Black-Scholes layer

double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

Outcome black_scholes_layer() {
    Outcome o;
    double worst_rt = 0.0;
    int tested = 0, skipped = 0;
    for (double sigma : linspace(0.01, 3.0, 60))
        for (double tau : {0.1, 1.0, 3.0})
            for (double lam : {-0.3, -0.1, 0.0, 0.1, 0.3}) {
                const BsInputs in{sigma, tau, 0.0, lam};
                // Below this vega the price does not pin sigma down to 1e-10 in double.
                if (bs_vega(in) < 1e-6) {
                    ++skipped;
                    continue;
                }
                const double iv = implied_vol(bs_call_price(in), tau, 0.0, lam);
                worst_rt = std::max(worst_rt, std::abs(iv - sigma));
                ++tested;
            }
    double worst_fd = 0.0;
    for (double sigma : {0.15, 0.4, 0.9})
        for (double tau : {0.25, 1.0})
            for (double lam : {-0.15, 0.05, 0.2}) {
                const BsInputs in{sigma, tau, 0.0, lam};
                auto rel = [&](double a, double b) {
                    worst_fd = std::max(worst_fd, std::abs(a - b) / std::max(std::abs(b), 1e-3));
                };
                // Vega ratios: d^n u / d sigma^n over d u / d sigma.
                auto vega_at = [&](double s) { return bs_vega({s, tau, 0.0, lam}); };
                const double h = 1e-3 * sigma;
                const double v = bs_vega(in);
                rel(vega_ratio(2, in), central_diff(vega_at, sigma, h) / v);
                auto dvega = [&](double s) { return central_diff(vega_at, s, h); };
                rel(vega_ratio(3, in), central_diff(dvega, sigma, h) / v);
                // Hermite ratios: d_z^m (d_z^2 - d_z) u / d_sigma u.
                std::function<double(double)> g = [&](double z) {
                    const double sd = sigma * std::sqrt(tau);
                    return std::exp(z) * normal_pdf((z - lam + 0.5 * sd * sd) / sd) / sd;
                };
                const double hz = 2e-2 * sigma * std::sqrt(tau);
                for (int m = 0; m <= 3; ++m) {
                    rel(hermite_vega_ratio(m, in), g(0.0) / v);
                    const auto prev = g;
                    g = [prev, hz](double z) { return central_diff(prev, z, hz); };
                }
            }
    o.pass = worst_rt <= kRoundTripTol && worst_fd <= kFdRelTol;
    o.detail = "round-trip max error " + fmt("%.2e", worst_rt) + " over " +
               std::to_string(tested) + " points (" + std::to_string(skipped) +
               " with vega < 1e-6 skipped), finite-difference max rel error " +
               fmt("%.2e", worst_fd);
    return o;
}

template <class F>
bool run(int id, const char* name, F&& f, double max_seconds = 0.0) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = f();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (max_seconds > 0.0 && secs > max_seconds) {
        o.pass = false;
        o.detail += "; runtime above " + fmt("%.0f", max_seconds) + " s";
    }
    report(id, name, o, secs);
    return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
    configure_threads_from_env();
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    auto want = [&](int id) {
        return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
    };
    bool ok = true;
    if (want(1)) ok &= run(1, "golden-formula equivalence", golden_equivalence, kGoldenMaxSeconds);
    if (want(2))
        ok &= run(2, "CEV scaled smile vs Monte Carlo", [] {
            return mc_panels(ModelSpec::cev({}), 0.0, 0.0, {0.25, 0.5, 1.0}, 3, kCevFloor);
        });
    if (want(3)) ok &= run(3, "Heston scaled smile vs Fourier", heston_panels);
    if (want(4))
        ok &= run(4, "SABR scaled smile vs Monte Carlo", [] {
            return mc_panels(ModelSpec::sabr({}), 0.0, -1.5, {0.25, 0.5}, 2, kSabrFloor);
        });
    if (want(5)) ok &= run(5, "price convergence order", convergence_order, 60.0);
    if (want(6)) ok &= run(6, "small-tau scaling agreement", small_tau_scaling);
    if (want(7)) ok &= run(7, "oracle cross-validation", oracle_cross_validation);
    if (want(8)) ok &= run(8, "Black-Scholes layer", black_scholes_layer);
    return ok ? 0 : 1;
}
