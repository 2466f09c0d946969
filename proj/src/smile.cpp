#include "letf/smile.hpp"

#include <algorithm>
#include <cmath>

// pchip in Boost 1.74 calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "letf/errors.hpp"

namespace letf {

namespace {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

}  // namespace

struct SmileCurve::Interp {
    Pchip pchip;
};

SmileCurve::SmileCurve(std::vector<SmilePoint> points, SmileMeta meta)
    : points_(std::move(points)), meta_(std::move(meta)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!(points_[i].iv > 0.0) || !std::isfinite(points_[i].iv))
            throw DomainError("smile implied vols must be positive");
        if (i > 0 && !(points_[i].lam > points_[i - 1].lam))
            throw DomainError("smile log-moneyness must be strictly increasing");
    }
    if (points_.size() >= 4) {
        std::vector<double> xs, ys;
        for (const auto& p : points_) {
            xs.push_back(p.lam);
            ys.push_back(p.iv);
        }
        interp_ = std::make_shared<const Interp>(Interp{Pchip(std::move(xs), std::move(ys))});
    }
}

double SmileCurve::lam_min() const {
    if (points_.empty()) throw DomainError("empty smile");
    return points_.front().lam;
}

double SmileCurve::lam_max() const {
    if (points_.empty()) throw DomainError("empty smile");
    return points_.back().lam;
}

double SmileCurve::operator()(double lam) const {
    if (points_.empty()) throw DomainError("empty smile");
    const double lo = lam_min(), hi = lam_max();
    // Allow a rounding-level overshoot at the ends.
    const double slack = 1e-12 * std::max(1.0, hi - lo);
    if (lam < lo - slack || lam > hi + slack) {
        std::ostringstream os;
        os << "lam " << lam << " outside sampled range [" << lo << ", " << hi << "]";
        throw DomainError(os.str());
    }
    lam = std::clamp(lam, lo, hi);
    if (points_.size() == 1) return points_.front().iv;
    if (points_.size() < 4) {
        auto it = std::upper_bound(points_.begin(), points_.end(), lam,
                                   [](double v, const SmilePoint& p) { return v < p.lam; });
        if (it == points_.end()) return points_.back().iv;
        const auto& b = *it;
        const auto& a = *(it - 1);
        const double w = (lam - a.lam) / (b.lam - a.lam);
        return a.iv + w * (b.iv - a.iv);
    }
    return interp_->pchip(lam);
}

void write_smile_csv(std::ostream& os, const SmileCurve& curve) {
    std::vector<SmilePoint> rows = curve.points();
    rows.insert(rows.end(), curve.rejected().begin(), curve.rejected().end());
    std::sort(rows.begin(), rows.end(),
              [](const SmilePoint& a, const SmilePoint& b) { return a.lam < b.lam; });
    const auto old_prec = os.precision(10);
    os << "lam,iv,iv_half_width,price,price_se\n";
    for (const auto& p : rows)
        os << p.lam << ',' << p.iv << ',' << p.iv_half_width << ',' << p.price << ','
           << p.price_se << '\n';
    os.precision(old_prec);
}

}  // namespace letf
