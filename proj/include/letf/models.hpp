#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "letf/taylor_table.hpp"

namespace letf {

/// Coordinates of a single option: log ETF x, auxiliary state y, log LETF z, log strike k.
struct MarketPoint {
    double t = 0.0;
    double T = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double k = 0.0;
    double beta = 1.0;

    double tau() const noexcept { return T - t; }
    double lam() const noexcept { return k - z; }
};

void validate(const MarketPoint& p);

enum class ModelKind { CEV, Heston, SABR, CustomTable };

std::string to_string(ModelKind kind);

struct CevParams {
    double delta = 0.2;
    double gamma = -0.75;
};

struct HestonParams {
    double kappa = 1.15;
    double theta = 0.04;
    double delta = 0.2;
    double rho = -0.4;
};

struct SabrParams {
    double delta = 0.5;
    double gamma = -0.5;
    double rho = 0.0;
};

/// Values of the generator coefficients at a state (x, y).
struct Coefficients {
    double a;
    double b;
    double c;
    double f;
};

/// Immutable model description. Coefficients follow the generator
///   a[(Dx^2 - Dx) + beta^2 (Dz^2 - Dz) + 2 beta Dx Dz] + b Dy^2 + c Dy + f (Dx Dy + beta Dy Dz).
class ModelSpec {
public:
    static ModelSpec cev(const CevParams& p);
    static ModelSpec heston(const HestonParams& p);
    static ModelSpec sabr(const SabrParams& p);
    static ModelSpec custom(const TaylorTable& table);

    ModelKind kind() const noexcept { return kind_; }
    const CevParams& cev_params() const;
    const HestonParams& heston_params() const;
    const SabrParams& sabr_params() const;
    const TaylorTable& custom_table() const;

    /// a, b, c, f at (x, y). Not available for CustomTable.
    Coefficients coefficients(double x, double y) const;

    /// Exact Taylor table around (xbar, ybar).
    TaylorTable taylor_table(double xbar, double ybar, int order) const;

    /// Whether the model has a second (stochastic volatility) factor.
    bool two_factor() const noexcept { return kind_ == ModelKind::Heston || kind_ == ModelKind::SABR; }

private:
    ModelKind kind_ = ModelKind::CEV;
    CevParams cev_{};
    HestonParams heston_{};
    SabrParams sabr_{};
    std::optional<TaylorTable> table_{};
};

/// Parameters of the LETF log price Z viewed as a Heston process.
struct HestonBetaMap {
    HestonParams params;
    double y;
};

/// (kappa, beta^2 theta, |beta| delta, sgn(beta) rho) and y + log beta^2.
HestonBetaMap heston_beta_map(const HestonParams& p, double y, double beta);

/// Right-continuous piecewise-constant function: value[i] on [breaks[i], breaks[i+1]),
/// value.back() beyond the last break, value.front() before the first.
class PiecewiseConstant {
public:
    PiecewiseConstant() : breaks_{0.0}, values_{0.0} {}
    explicit PiecewiseConstant(double constant) : breaks_{0.0}, values_{constant} {}
    PiecewiseConstant(std::vector<double> breaks, std::vector<double> values);

    double operator()(double t) const;
    double integral(double t0, double t1) const;

    const std::vector<double>& breaks() const noexcept { return breaks_; }
    const std::vector<double>& values() const noexcept { return values_; }

    friend PiecewiseConstant operator+(const PiecewiseConstant& a, const PiecewiseConstant& b);

private:
    std::vector<double> breaks_;
    std::vector<double> values_;
};

/// Interest rate r, ETF dividend yield q and LETF expense rate c.
struct RateCurves {
    PiecewiseConstant r;
    PiecewiseConstant q;
    PiecewiseConstant c;
};

/// Moves (x, z) so that zero-rate pricing applies: x += int(r - q), z += int(r - c - beta q).
/// Multiply the resulting prices by discount_factor().
MarketPoint drift_shift(const MarketPoint& p, const RateCurves& curves);
double discount_factor(const MarketPoint& p, const RateCurves& curves);

/// Contents of a model parameter file.
struct ModelFile {
    ModelSpec model;
    double beta = 1.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double z0 = 0.0;
    std::vector<std::string> warnings;
};

/// Parses `key = value` lines. Keys: kind, delta, gamma, kappa, theta, rho, beta, x0, y0,
/// z0. Values are numbers or log(<number>). '#' starts a comment. Throws ConfigError with
/// the offending line on unknown keys or malformed input.
ModelFile parse_model_file(std::istream& in, const std::string& source = "<input>");
ModelFile load_model_file(const std::string& path);

/// Returns a warning when beta is outside the usual {-3,-2,-1,1,2,3}; throws on beta = 0.
std::optional<std::string> check_beta(double beta);

}  // namespace letf
