#include "letf/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "letf/errors.hpp"

namespace letf {

namespace {

void check_inputs(const BsInputs& in) {
    if (!(in.sigma > 0.0)) throw DomainError("sigma must be positive");
    if (!(in.tau > 0.0)) throw DomainError("tau must be positive");
}

struct D12 {
    double plus;
    double minus;
};

D12 d12(const BsInputs& in) {
    const double sd = in.sigma * std::sqrt(in.tau);
    const double dp = (in.z - in.k + 0.5 * sd * sd) / sd;
    return {dp, dp - sd};
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 * 0.5); }

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) * 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
}

double bs_call_price(const BsInputs& in) {
    check_inputs(in);
    const auto d = d12(in);
    return std::exp(in.z) * normal_cdf(d.plus) - std::exp(in.k) * normal_cdf(d.minus);
}

double bs_put_price(const BsInputs& in) {
    check_inputs(in);
    const auto d = d12(in);
    return std::exp(in.k) * normal_cdf(-d.minus) - std::exp(in.z) * normal_cdf(-d.plus);
}

double bs_vega(const BsInputs& in) {
    check_inputs(in);
    return std::exp(in.z) * normal_pdf(d12(in).plus) * std::sqrt(in.tau);
}

double implied_vol(double call_price, double tau, double z, double k,
                   const ImpliedVolOptions& opt) {
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    const double ez = std::exp(z);
    const double ek = std::exp(k);
    const double intrinsic = std::max(ez - ek, 0.0);
    if (!(call_price > intrinsic && call_price < ez)) {
        std::ostringstream os;
        os.precision(17);
        os << "call price " << call_price << " outside no-arbitrage bounds (" << intrinsic
           << ", " << ez << ")";
        throw ArbitrageError(os.str());
    }

    // Work with the out-of-the-money side to keep the time value well conditioned.
    const bool use_put = k < z;
    const double target = use_put ? call_price - ez + ek : call_price;
    auto price = [&](double s) {
        const BsInputs in{s, tau, z, k};
        return use_put ? bs_put_price(in) : bs_call_price(in);
    };

    const double tol = opt.price_tol * ez;
    double lo = opt.sigma_lo;
    double hi = opt.sigma_hi;
    if (price(lo) - target > 0.0 || price(hi) - target < 0.0)
        throw SolverError("implied vol outside initial bracket", lo, hi);

    // Newton from the inflection point of price(sigma) is monotone for Black-Scholes.
    const double infl = std::sqrt(2.0 * std::abs(k - z) / tau);
    double s = std::clamp(infl > 0.0 ? infl : 0.2, lo, hi);
    for (int it = 0; it < opt.max_iter; ++it) {
        const double f = price(s) - target;
        if (f > 0.0)
            hi = s;
        else
            lo = s;
        const double v = bs_vega({s, tau, z, k});
        double next = (v > 0.0) ? s - f / v : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - s);
        if (std::abs(f) <= tol && step <= 1e-14 * s) return s;
        if (hi - lo <= 1e-15 * hi) return 0.5 * (lo + hi);
        s = next;
    }
    const double f = price(s) - target;
    if (std::abs(f) <= tol) return s;
    throw SolverError("implied vol did not converge", lo, hi);
}

double vega_ratio(int order, const BsInputs& in) {
    check_inputs(in);
    const double lam = in.k - in.z;
    const double s = in.sigma;
    const double t = in.tau;
    const double l2 = lam * lam;
    switch (order) {
        case 2:
            return l2 / (t * s * s * s) - t * s / 4.0;
        case 3: {
            const double s2 = s * s;
            return l2 * l2 / (t * t * s2 * s2 * s2) - (3.0 / (t * s2 * s2) + 0.5 / s2) * l2 +
                   t * t * s2 / 16.0 - t / 4.0;
        }
        default:
            throw DomainError("vega_ratio supports orders 2 and 3");
    }
}

std::vector<double> hermite_coefficients(int m) {
    if (m < 0) throw DomainError("Hermite order must be nonnegative");
    std::vector<double> prev{1.0};
    if (m == 0) return prev;
    std::vector<double> cur{0.0, 2.0};
    for (int n = 1; n < m; ++n) {
        std::vector<double> next(n + 2, 0.0);
        for (int j = 0; j <= n; ++j) next[j + 1] += 2.0 * cur[j];
        for (int j = 0; j < n; ++j) next[j] -= 2.0 * n * prev[j];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

double hermite(int m, double w) {
    if (m < 0) throw DomainError("Hermite order must be nonnegative");
    double h0 = 1.0;
    if (m == 0) return h0;
    double h1 = 2.0 * w;
    for (int n = 1; n < m; ++n) {
        const double h2 = 2.0 * w * h1 - 2.0 * n * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double hermite_vega_ratio(int m, const BsInputs& in) {
    check_inputs(in);
    if (m < 0 || m > kMaxHermiteOrder) throw DomainError("Hermite ratio order out of range");
    const double s = std::sqrt(2.0 * in.sigma * in.sigma * in.tau);
    const double w = (in.z - in.k - 0.5 * in.sigma * in.sigma * in.tau) / s;
    return std::pow(-1.0 / s, m) * hermite(m, w) / (in.tau * in.sigma);
}

}  // namespace letf
