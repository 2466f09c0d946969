#include "letf/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "letf/errors.hpp"

namespace letf {

namespace {

void check(double beta) {
    if (beta == 0.0 || !std::isfinite(beta)) throw DomainError("leverage ratio must be nonzero");
}

std::vector<SmilePoint> map_points(const std::vector<SmilePoint>& in, double lam_factor,
                                   double iv_factor) {
    std::vector<SmilePoint> out;
    out.reserve(in.size());
    for (auto p : in) {
        p.lam *= lam_factor;
        p.iv *= iv_factor;
        p.iv_half_width *= iv_factor;
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(),
              [](const SmilePoint& a, const SmilePoint& b) { return a.lam < b.lam; });
    return out;
}

SmileCurve map_curve(const SmileCurve& c, double lam_factor, double iv_factor,
                     const std::string& tag) {
    SmileMeta meta = c.meta();
    meta.method += " " + tag;
    SmileCurve out(map_points(c.points(), lam_factor, iv_factor), meta);
    out.set_rejected(map_points(c.rejected(), lam_factor, iv_factor));
    return out;
}

}  // namespace

SmileFn scale_X_to_Z(SmileFn sigma_x, double beta) {
    check(beta);
    return [f = std::move(sigma_x), beta](double lam) { return std::abs(beta) * f(lam / beta); };
}

SmileFn scale_Z_to_X(SmileFn sigma_z, double beta) {
    check(beta);
    return [f = std::move(sigma_z), beta](double lam) { return f(beta * lam) / std::abs(beta); };
}

SmileCurve scale_X_to_Z(const SmileCurve& sigma_x, double beta) {
    check(beta);
    return map_curve(sigma_x, beta, std::abs(beta), "(scaled beta)");
}

SmileCurve scale_Z_to_X(const SmileCurve& sigma_z, double beta) {
    check(beta);
    return map_curve(sigma_z, 1.0 / beta, 1.0 / std::abs(beta), "(scaled 1/beta)");
}

LamRange common_range(const SmileCurve& a, const SmileCurve& b, std::optional<LamRange> limit) {
    double lo = std::max(a.lam_min(), b.lam_min());
    double hi = std::min(a.lam_max(), b.lam_max());
    if (limit) {
        lo = std::max(lo, limit->first);
        hi = std::min(hi, limit->second);
    }
    if (!(hi > lo)) {
        std::ostringstream os;
        os << "smiles have no overlapping log-moneyness range ([" << a.lam_min() << ", "
           << a.lam_max() << "] vs [" << b.lam_min() << ", " << b.lam_max() << "])";
        throw DomainError(os.str());
    }
    return {lo, hi};
}

double smile_distance(const SmileFn& a, const SmileFn& b, LamRange range) {
    const auto [lo, hi] = range;
    if (!(hi > lo)) throw DomainError("empty log-moneyness range");
    double worst = 0.0;
    for (int i = 0; i < kDistanceGridPoints; ++i) {
        const double lam = (i == kDistanceGridPoints - 1)
                               ? hi
                               : lo + (hi - lo) * i / (kDistanceGridPoints - 1);
        worst = std::max(worst, std::abs(a(lam) - b(lam)));
    }
    return worst;
}

double smile_distance(const SmileCurve& a, const SmileCurve& b, std::optional<LamRange> limit) {
    const auto range = common_range(a, b, limit);
    return smile_distance([&](double l) { return a(l); }, [&](double l) { return b(l); }, range);
}

}  // namespace letf
