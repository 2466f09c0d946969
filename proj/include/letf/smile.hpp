#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace letf {

struct SmilePoint {
    double lam = 0.0;
    double iv = 0.0;
    double iv_half_width = 0.0;
    double price = std::numeric_limits<double>::quiet_NaN();
    double price_se = 0.0;
    bool flagged = false;  // price CI touches a no-arbitrage bound
};

struct SmileMeta {
    std::string model;
    double beta = 1.0;
    double tau = 0.0;
    std::string method;
};

/// Sampled implied-vol curve. Points have strictly increasing lam and positive iv;
/// evaluation interpolates with a monotone cubic and never extrapolates.
class SmileCurve {
public:
    SmileCurve() = default;
    SmileCurve(std::vector<SmilePoint> points, SmileMeta meta);

    const std::vector<SmilePoint>& points() const noexcept { return points_; }
    const SmileMeta& meta() const noexcept { return meta_; }
    SmileMeta& meta() noexcept { return meta_; }

    /// Strikes whose price could not be inverted (kept for reporting).
    const std::vector<SmilePoint>& rejected() const noexcept { return rejected_; }
    void set_rejected(std::vector<SmilePoint> r) { rejected_ = std::move(r); }

    double lam_min() const;
    double lam_max() const;
    double operator()(double lam) const;

private:
    struct Interp;
    std::shared_ptr<const Interp> interp_;
    std::vector<SmilePoint> points_;
    std::vector<SmilePoint> rejected_;
    SmileMeta meta_;
};

/// CSV with header lam,iv,iv_half_width,price,price_se and 10 significant digits.
/// Rejected strikes are written with iv = nan.
void write_smile_csv(std::ostream& os, const SmileCurve& curve);

}  // namespace letf
