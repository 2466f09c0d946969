#include <boost/math/quadrature/gauss.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "letf/black_scholes.hpp"
#include "letf/errors.hpp"
#include "letf/oracles.hpp"

namespace letf {

using cplx = std::complex<double>;

void validate(const FourierConfig& cfg) {
    if (!(cfg.xi_imag < -1.0)) throw DomainError("Fourier contour needs xi_imag < -1");
    if (!(cfg.truncation > 0.0)) throw DomainError("Fourier truncation must be positive");
    if (cfg.nodes < 20) throw DomainError("Fourier quadrature needs at least 20 nodes");
}

namespace {

constexpr cplx I{0.0, 1.0};

/// log(1 + w) / w, accurate for small |w|.
cplx log1p_over(cplx w) {
    if (std::abs(w) < 1e-4) return 1.0 - w / 2.0 + w * w / 3.0 - w * w * w / 4.0;
    return std::log(1.0 + w) / w;
}

}  // namespace

std::complex<double> heston_char_fn(const HestonParams& p, double tau, double x, double y,
                                    std::complex<double> xi) {
    const double ka = p.kappa, th = p.theta, de = p.delta, rho = p.rho;
    const cplx q = xi * xi + I * xi;
    const cplx b = ka - rho * de * I * xi;
    const cplx d = std::sqrt(b * b + de * de * q);
    const cplx bpd = b + d;
    // b - d = delta^2 B, computed without cancellation.
    const cplx B = -q / bpd;
    const cplx g = de * de * B / bpd;  // (b - d)/(b + d) = 1/f
    const cplx e = std::exp(-d * tau);
    const cplx D = B * (1.0 - e) / (1.0 - g * e);
    // The printed log((1 - f e^{d tau})/(1 - f)), tracked continuously from tau = 0, equals
    // d tau + log((1 - g e^{-d tau})/(1 - g)); the latter stays on the principal branch.
    const cplx w_over_d2 = B * (1.0 - e) / (bpd * (1.0 - g));
    const cplx w = de * de * w_over_d2;
    const cplx log_over_d2 = log1p_over(w) * w_over_d2;
    const cplx C = ka * th * (B * tau - 2.0 * log_over_d2);
    return std::exp(I * xi * x + C + D * std::exp(y));
}

std::complex<double> heston_char_fn_tracked(const HestonParams& p, double tau, double x,
                                            double y, std::complex<double> xi, int steps) {
    if (steps < 1) throw DomainError("phase tracking needs at least one step");
    const double ka = p.kappa, th = p.theta, de = p.delta, rho = p.rho;
    const cplx b = ka - rho * de * I * xi;
    const cplx d = std::sqrt(b * b + de * de * (xi * xi + I * xi));
    const cplx f = (b + d) / (b - d);
    double phase = 0.0;
    double prev = 0.0;
    cplx ratio = 1.0;
    for (int j = 1; j <= steps; ++j) {
        const double t = tau * j / steps;
        ratio = (1.0 - f * std::exp(d * t)) / (1.0 - f);
        const double a = std::arg(ratio);
        double delta = a - prev;
        while (delta > std::numbers::pi) delta -= 2.0 * std::numbers::pi;
        while (delta < -std::numbers::pi) delta += 2.0 * std::numbers::pi;
        phase += delta;
        prev = a;
    }
    const cplx logr{std::log(std::abs(ratio)), phase};
    const cplx edt = std::exp(d * tau);
    const cplx C = ka * th / (de * de) * ((b + d) * tau - 2.0 * logr);
    const cplx D = (b + d) / (de * de) * (1.0 - edt) / (1.0 - f * edt);
    return std::exp(I * xi * x + C + D * std::exp(y));
}

double heston_fourier_price_x(const HestonParams& p, double tau, double x, double y, double k,
                              const FourierConfig& cfg, Payoff payoff) {
    validate(cfg);
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto& absc = GL::abscissa();
    const auto& wts = GL::weights();
    const int panels = (cfg.nodes + 19) / 20;
    const double L = cfg.truncation;
    const double h = 2.0 * L / panels;

    auto integrand = [&](double xr) {
        const cplx xi{xr, cfg.xi_imag};
        const cplx phi_hat = -std::exp(k - I * k * xi) / (I * xi + xi * xi);
        return (heston_char_fn(p, tau, x, y, xi) * phi_hat).real();
    };

    double total = 0.0;
    for (int j = 0; j < panels; ++j) {
        const double mid = -L + (j + 0.5) * h;
        const double half = 0.5 * h;
        double acc = 0.0;
        for (std::size_t i = 0; i < absc.size(); ++i) {
            acc += wts[i] * (integrand(mid + half * absc[i]) + integrand(mid - half * absc[i]));
        }
        total += acc * half;
    }
    const double call = total / (2.0 * std::numbers::pi);

    // |integrand| decays at least like 1/xi^2, so the tail beyond L is bounded by |F(L)| L.
    const cplx xl{L, cfg.xi_imag};
    const double fl = std::abs(heston_char_fn(p, tau, x, y, xl) *
                               std::exp(k - I * k * xl) / (I * xl + xl * xl));
    const double xr_ = -L;
    const cplx xm{xr_, cfg.xi_imag};
    const double fm = std::abs(heston_char_fn(p, tau, x, y, xm) *
                               std::exp(k - I * k * xm) / (I * xm + xm * xm));
    const double tail = (fl + fm) * L / (2.0 * std::numbers::pi);
    const double scale = std::max(1.0, std::exp(x));
    if (!(tail <= cfg.tail_tol * scale) || !std::isfinite(call)) {
        std::ostringstream os;
        os.precision(3);
        os << "Fourier quadrature not converged: estimated tail " << tail << " at truncation "
           << L << " (tau=" << tau << ", k=" << k << ", xi_imag=" << cfg.xi_imag << ")";
        throw NumericalError(os.str());
    }
    if (payoff == Payoff::Call) return call;
    return call - std::exp(x) + std::exp(k);
}

double heston_fourier_price(const HestonParams& p, const MarketPoint& point,
                            const FourierConfig& cfg, Payoff payoff) {
    validate(point);
    const auto m = heston_beta_map(p, point.y, point.beta);
    return heston_fourier_price_x(m.params, point.tau(), point.z, m.y, point.k, cfg, payoff);
}

SmileCurve fourier_implied_smile(const HestonParams& p, const MarketPoint& point,
                                 const std::vector<double>& lam_grid, const FourierConfig& cfg) {
    validate(point);
    const double tau = point.tau();
    std::vector<SmilePoint> pts, rejected;
    for (double lam : lam_grid) {
        MarketPoint q = point;
        q.k = point.z + lam;
        SmilePoint sp;
        sp.lam = lam;
        sp.price = heston_fourier_price(p, q, cfg, Payoff::Call);
        // Out-of-the-money value at the quadrature noise level carries no vol information.
        const double otm = sp.price - std::max(std::exp(q.z) - std::exp(q.k), 0.0);
        if (otm < kFourierPriceFloor * std::max(std::exp(q.z), std::exp(q.k))) {
            sp.iv = std::numeric_limits<double>::quiet_NaN();
            sp.flagged = true;
            rejected.push_back(sp);
            continue;
        }
        sp.iv = implied_vol(sp.price, tau, q.z, q.k);
        pts.push_back(sp);
    }
    SmileCurve c(std::move(pts), {"heston", point.beta, tau, "fourier"});
    c.set_rejected(std::move(rejected));
    return c;
}

}  // namespace letf
