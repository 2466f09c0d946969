#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "letf/smile.hpp"

namespace letf {

using SmileFn = std::function<double(double)>;

/// sigma_X^(beta)(lam) = |beta| sigma_X(lam / beta).
SmileFn scale_X_to_Z(SmileFn sigma_x, double beta);
/// sigma_Z^(1/beta)(lam) = sigma_Z(beta lam) / |beta|.
SmileFn scale_Z_to_X(SmileFn sigma_z, double beta);

/// Sampled versions map every sample exactly; the method tag gains "(scaled beta)" or
/// "(scaled 1/beta)". Rejected strikes are mapped as well.
SmileCurve scale_X_to_Z(const SmileCurve& sigma_x, double beta);
SmileCurve scale_Z_to_X(const SmileCurve& sigma_z, double beta);

using LamRange = std::pair<double, double>;

/// Intersection of the sampled ranges (and `limit`, when given). Throws on empty overlap.
LamRange common_range(const SmileCurve& a, const SmileCurve& b,
                      std::optional<LamRange> limit = std::nullopt);

/// Max |a - b| over 101 equally spaced points of the common range.
double smile_distance(const SmileCurve& a, const SmileCurve& b,
                      std::optional<LamRange> limit = std::nullopt);
double smile_distance(const SmileFn& a, const SmileFn& b, LamRange range);

inline constexpr int kDistanceGridPoints = 101;

}  // namespace letf
