#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "letf/black_scholes.hpp"
#include "letf/errors.hpp"
#include "letf/oracles.hpp"
#include "letf/philox.hpp"

namespace letf {

void validate(const McConfig& cfg) {
    if (cfg.steps_per_year < 50) throw DomainError("steps_per_year must be at least 50");
    if (cfg.paths < 2) throw DomainError("need at least two paths");
    if (cfg.antithetic && cfg.paths % 2 != 0)
        throw DomainError("antithetic sampling needs an even number of paths");
}

double TerminalSample::z_T(std::size_t i, double z, double beta) const {
    if (absorbed[i]) return -std::numeric_limits<double>::infinity();
    return z + beta * (x_T[i] - x0) - 0.5 * beta * (beta - 1.0) * int_var[i];
}

namespace {

/// Per-model Euler step in (x, y).
class Stepper {
public:
    explicit Stepper(const ModelSpec& m) : kind_(m.kind()) {
        switch (kind_) {
            case ModelKind::CEV:
                delta_ = m.cev_params().delta;
                gm1_ = m.cev_params().gamma - 1.0;
                break;
            case ModelKind::Heston: {
                const auto& p = m.heston_params();
                delta_ = p.delta;
                rho_ = p.rho;
                kappa_ = p.kappa;
                drift_num_ = p.kappa * p.theta - 0.5 * p.delta * p.delta;
                break;
            }
            case ModelKind::SABR:
                delta_ = m.sabr_params().delta;
                gm1_ = m.sabr_params().gamma - 1.0;
                rho_ = m.sabr_params().rho;
                break;
            case ModelKind::CustomTable:
                throw DomainError("Monte Carlo needs a model with coefficient functions");
        }
        rhobar_ = std::sqrt(1.0 - rho_ * rho_);
    }

    double variance(double x, double y) const {
        switch (kind_) {
            case ModelKind::CEV: return delta_ * delta_ * std::exp(2.0 * gm1_ * x);
            case ModelKind::Heston: return std::exp(y);
            default: return std::exp(2.0 * (y + gm1_ * x));
        }
    }

    bool has_floor() const noexcept { return kind_ != ModelKind::Heston; }

    /// Advances (x, y) by one step given standard normals; returns sigma^2 at the left point.
    double step(double& x, double& y, double n1, double n2, double dt, double sqdt) const {
        const double v = variance(x, y);
        const double s = std::sqrt(v);
        const double dwx = n1 * sqdt;
        x += -0.5 * v * dt + s * dwx;
        if (kind_ == ModelKind::Heston) {
            const double dwy = (rho_ * n1 + rhobar_ * n2) * sqdt;
            const double emy = std::exp(-y);
            y += (drift_num_ * emy - kappa_) * dt + delta_ * std::sqrt(emy) * dwy;
        } else if (kind_ == ModelKind::SABR) {
            const double dwy = (rho_ * n1 + rhobar_ * n2) * sqdt;
            y += -0.5 * delta_ * delta_ * dt + delta_ * dwy;
        }
        return v;
    }

private:
    ModelKind kind_;
    double delta_ = 0.0, gm1_ = 0.0, rho_ = 0.0, rhobar_ = 1.0, kappa_ = 0.0, drift_num_ = 0.0;
};

struct Grid {
    int steps;
    double dt;
    double sqdt;
};

Grid make_grid(double tau, int steps_per_year) {
    const int n = std::max(1, static_cast<int>(std::lround(tau * steps_per_year)));
    const double dt = tau / n;
    return {n, dt, std::sqrt(dt)};
}

/// Simulates one stream of normals, once per copy; copy 1 uses the negated normals.
void run_stream(const Stepper& st, const Grid& g, double x0, double y0, std::uint64_t seed,
                std::uint64_t stream, int copies, double* xT, double* iv, std::uint8_t* absorbed) {
    double x[2] = {x0, x0}, y[2] = {y0, y0}, acc[2] = {0.0, 0.0};
    bool dead[2] = {false, false};
    for (int i = 0; i < g.steps; ++i) {
        const auto n = philox_normal_pair(seed, stream, static_cast<std::uint32_t>(i));
        for (int c = 0; c < copies; ++c) {
            if (dead[c]) continue;
            const double sign = c == 0 ? 1.0 : -1.0;
            acc[c] += st.step(x[c], y[c], sign * n[0], sign * n[1], g.dt, g.sqdt) * g.dt;
            if (!std::isfinite(x[c]) || !std::isfinite(y[c]) || !std::isfinite(acc[c]) ||
                (st.has_floor() && x[c] <= kAbsorptionLogFloor))
                dead[c] = true;
        }
    }
    for (int c = 0; c < copies; ++c) {
        xT[c] = x[c];
        iv[c] = acc[c];
        absorbed[c] = dead[c] ? 1 : 0;
    }
}

TerminalSample simulate(const ModelSpec& model, const MarketPoint& point, const McConfig& cfg,
                        bool parallel) {
    validate(point);
    validate(cfg);
    const Stepper st(model);
    const Grid g = make_grid(point.tau(), cfg.steps_per_year);
    TerminalSample s;
    s.x0 = point.x;
    s.tau = point.tau();
    s.steps = g.steps;
    s.antithetic = cfg.antithetic;
    s.vol_explodes_at_zero = model.kind() != ModelKind::Heston;
    const std::size_t n = cfg.paths;
    s.x_T.resize(n);
    s.int_var.resize(n);
    s.absorbed.resize(n);
    const int copies = cfg.antithetic ? 2 : 1;
    const auto streams = static_cast<std::int64_t>(n / copies);
    double* xT = s.x_T.data();
    double* iv = s.int_var.data();
    std::uint8_t* ab = s.absorbed.data();
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t p = 0; p < streams; ++p) {
            const std::size_t off = static_cast<std::size_t>(p) * copies;
            run_stream(st, g, point.x, point.y, cfg.seed, static_cast<std::uint64_t>(p), copies,
                       xT + off, iv + off, ab + off);
        }
    } else {
        for (std::int64_t p = 0; p < streams; ++p) {
            const std::size_t off = static_cast<std::size_t>(p) * copies;
            run_stream(st, g, point.x, point.y, cfg.seed, static_cast<std::uint64_t>(p), copies,
                       xT + off, iv + off, ab + off);
        }
    }
    return s;
}

/// Mean and standard error of per-unit values (pair averages when antithetic).
template <class F>
McEstimate estimate(const TerminalSample& s, F&& value) {
    const std::size_t n = s.size();
    const std::size_t unit = s.antithetic ? 2 : 1;
    const std::size_t m = n / unit;
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < unit; ++c) acc += value(i * unit + c);
        v[i] = acc / static_cast<double>(unit);
    }
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = m > 1 ? ss / static_cast<double>(m - 1) : 0.0;
    McEstimate e;
    e.price = mean;
    e.std_error = std::sqrt(var / static_cast<double>(m));
    e.half_width_95 = 1.96 * e.std_error;
    return e;
}

}  // namespace

TerminalSample mc_simulate_terminal(const ModelSpec& model, const MarketPoint& point,
                                    const McConfig& cfg) {
    return simulate(model, point, cfg, true);
}

TerminalSample mc_simulate_terminal_serial(const ModelSpec& model, const MarketPoint& point,
                                           const McConfig& cfg) {
    return simulate(model, point, cfg, false);
}

McEstimate mc_price(const TerminalSample& s, double beta, double z, double k, Payoff payoff) {
    const double ek = std::exp(k);
    return estimate(s, [&](std::size_t i) {
        const double zt = s.z_T(i, z, beta);
        const double st = std::exp(zt);
        return payoff == Payoff::Call ? std::max(st - ek, 0.0) : std::max(ek - st, 0.0);
    });
}

std::vector<McEstimate> mc_prices(const TerminalSample& s, double beta, double z,
                                  const std::vector<double>& strikes, Payoff payoff) {
    std::vector<McEstimate> out;
    out.reserve(strikes.size());
    for (double k : strikes) out.push_back(mc_price(s, beta, z, k, payoff));
    return out;
}

McEstimate mc_simulate(const ModelSpec& model, const MarketPoint& point, const McConfig& cfg,
                       Payoff payoff) {
    const auto s = mc_simulate_terminal(model, point, cfg);
    return mc_price(s, point.beta, point.z, point.k, payoff);
}

MartingaleCheck mc_martingale(const TerminalSample& s, double beta, double z) {
    MartingaleCheck m;
    m.exp_x = estimate(s, [&](std::size_t i) { return s.absorbed[i] ? 0.0 : std::exp(s.x_T[i]); });
    m.exp_z = estimate(s, [&](std::size_t i) { return std::exp(s.z_T(i, z, beta)); });
    return m;
}

PathwiseGap mc_pathwise_gap(const ModelSpec& model, const MarketPoint& point,
                            const McConfig& cfg) {
    validate(point);
    validate(cfg);
    const Stepper st(model);
    const Grid g = make_grid(point.tau(), cfg.steps_per_year);
    const double beta = point.beta;
    PathwiseGap gap;
    for (std::uint64_t p = 0; p < cfg.paths; ++p) {
        double x = point.x, y = point.y, acc = 0.0;
        double z_euler = point.z;
        double log_l = point.z;  // Milstein on L, kept in log form step by step
        bool dead = false;
        for (int i = 0; i < g.steps && !dead; ++i) {
            const auto n = philox_normal_pair(cfg.seed, p, static_cast<std::uint32_t>(i));
            const double v = st.variance(x, y);
            const double s = std::sqrt(v);
            const double dw = n[0] * g.sqdt;
            z_euler += -0.5 * beta * beta * v * g.dt + beta * s * dw;
            const double growth = 1.0 + beta * s * dw + 0.5 * beta * beta * v * (dw * dw - g.dt);
            if (!(growth > 0.0)) {
                dead = true;
                break;
            }
            log_l += std::log(growth);
            acc += st.step(x, y, n[0], n[1], g.dt, g.sqdt) * g.dt;
            if (!std::isfinite(x) || (st.has_floor() && x <= kAbsorptionLogFloor)) dead = true;
        }
        if (dead) continue;
        const double z_rec = point.z + beta * (x - point.x) - 0.5 * beta * (beta - 1.0) * acc;
        gap.max_gap_euler = std::max(gap.max_gap_euler, std::abs(z_rec - z_euler));
        gap.max_gap_milstein = std::max(gap.max_gap_milstein, std::abs(z_rec - log_l));
    }
    return gap;
}

SmileCurve implied_smile_from_sample(const TerminalSample& s, const MarketPoint& point,
                                     const std::vector<double>& lam_grid,
                                     const std::string& model_name) {
    const double z = point.z, ez = std::exp(z), tau = s.tau;
    std::vector<SmilePoint> pts, rejected;
    for (double lam : lam_grid) {
        const double k = z + lam;
        const double ek = std::exp(k);
        // For beta < 0 with a volatility that explodes at S = 0 (CEV, SABR) e^Z is a strict
        // local martingale: direct call prices would carry the lost mass E[e^Z_T] < e^z, so
        // every strike is priced as a put and converted by parity against e^z.
        const bool put = k <= z || (point.beta < 0 && s.vol_explodes_at_zero);
        const auto e = mc_price(s, point.beta, z, k, put ? Payoff::Put : Payoff::Call);
        SmilePoint sp;
        sp.lam = lam;
        sp.price = put ? e.price + ez - ek : e.price;
        sp.price_se = e.std_error;
        const double intrinsic = std::max(ez - ek, 0.0);
        sp.flagged = sp.price - e.half_width_95 <= intrinsic || sp.price + e.half_width_95 >= ez;
        try {
            sp.iv = implied_vol(sp.price, tau, z, k);
            const double vega = bs_vega({sp.iv, tau, z, k});
            sp.iv_half_width = e.half_width_95 / vega;
            pts.push_back(sp);
        } catch (const ArbitrageError&) {
            sp.iv = std::numeric_limits<double>::quiet_NaN();
            sp.flagged = true;
            rejected.push_back(sp);
        } catch (const SolverError&) {
            sp.iv = std::numeric_limits<double>::quiet_NaN();
            sp.flagged = true;
            rejected.push_back(sp);
        }
    }
    SmileCurve c(std::move(pts), {model_name, point.beta, tau, "mc"});
    c.set_rejected(std::move(rejected));
    return c;
}

SmileCurve mc_implied_smile(const ModelSpec& model, const MarketPoint& point,
                            const std::vector<double>& lam_grid, const McConfig& cfg) {
    const auto s = mc_simulate_terminal(model, point, cfg);
    return implied_smile_from_sample(s, point, lam_grid, to_string(model.kind()));
}

int configure_threads_from_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("LETF_SMILE_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1)
            throw ConfigError(std::string("LETF_SMILE_THREADS must be a positive integer, got '") +
                              env + "'");
        omp_set_num_threads(static_cast<int>(std::min<long>(n, omp_get_num_procs())));
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace letf
