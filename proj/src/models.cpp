#include "letf/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "letf/errors.hpp"

namespace letf {

namespace {

double factorial(int n) {
    double v = 1.0;
    for (int i = 2; i <= n; ++i) v *= i;
    return v;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

void validate_cev(const CevParams& p) {
    require(p.delta > 0.0, "CEV delta must be positive");
    require(p.gamma <= 1.0, "CEV gamma must be <= 1");
}

void validate_heston(const HestonParams& p) {
    require(p.kappa > 0.0, "Heston kappa must be positive");
    require(p.theta > 0.0, "Heston theta must be positive");
    require(p.delta >= 0.0, "Heston delta must be nonnegative");
    require(p.rho > -1.0 && p.rho < 1.0, "Heston rho must lie in (-1, 1)");
}

void validate_sabr(const SabrParams& p) {
    require(p.delta >= 0.0, "SABR delta must be nonnegative");
    require(p.gamma <= 1.0, "SABR gamma must be <= 1");
    require(p.rho > -1.0 && p.rho < 1.0, "SABR rho must lie in (-1, 1)");
}

}  // namespace

void validate(const MarketPoint& p) {
    require(p.T > p.t, "maturity must exceed valuation time");
    require(p.beta != 0.0 && std::isfinite(p.beta), "leverage ratio must be nonzero");
    require(std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) && std::isfinite(p.k),
            "market coordinates must be finite");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::CEV: return "cev";
        case ModelKind::Heston: return "heston";
        case ModelKind::SABR: return "sabr";
        case ModelKind::CustomTable: return "table";
    }
    return "unknown";
}

ModelSpec ModelSpec::cev(const CevParams& p) {
    validate_cev(p);
    ModelSpec m;
    m.kind_ = ModelKind::CEV;
    m.cev_ = p;
    return m;
}

ModelSpec ModelSpec::heston(const HestonParams& p) {
    validate_heston(p);
    ModelSpec m;
    m.kind_ = ModelKind::Heston;
    m.heston_ = p;
    return m;
}

ModelSpec ModelSpec::sabr(const SabrParams& p) {
    validate_sabr(p);
    ModelSpec m;
    m.kind_ = ModelKind::SABR;
    m.sabr_ = p;
    return m;
}

ModelSpec ModelSpec::custom(const TaylorTable& table) {
    require(table.a(0, 0) > 0.0, "Taylor table needs a00 > 0");
    ModelSpec m;
    m.kind_ = ModelKind::CustomTable;
    m.table_ = table;
    return m;
}

const CevParams& ModelSpec::cev_params() const {
    require(kind_ == ModelKind::CEV, "model is not CEV");
    return cev_;
}
const HestonParams& ModelSpec::heston_params() const {
    require(kind_ == ModelKind::Heston, "model is not Heston");
    return heston_;
}
const SabrParams& ModelSpec::sabr_params() const {
    require(kind_ == ModelKind::SABR, "model is not SABR");
    return sabr_;
}
const TaylorTable& ModelSpec::custom_table() const {
    require(kind_ == ModelKind::CustomTable, "model is not a custom table");
    return *table_;
}

Coefficients ModelSpec::coefficients(double x, double y) const {
    switch (kind_) {
        case ModelKind::CEV: {
            const double d = cev_.delta;
            return {0.5 * d * d * std::exp(2.0 * (cev_.gamma - 1.0) * x), 0.0, 0.0, 0.0};
        }
        case ModelKind::Heston: {
            const auto& p = heston_;
            const double emy = std::exp(-y);
            return {0.5 * std::exp(y), 0.5 * p.delta * p.delta * emy,
                    (p.kappa * p.theta - 0.5 * p.delta * p.delta) * emy - p.kappa, p.rho * p.delta};
        }
        case ModelKind::SABR: {
            const auto& p = sabr_;
            const double vol = std::exp(y + (p.gamma - 1.0) * x);
            return {0.5 * vol * vol, 0.5 * p.delta * p.delta, -0.5 * p.delta * p.delta,
                    p.rho * p.delta * vol};
        }
        case ModelKind::CustomTable:
            break;
    }
    throw DomainError("custom tables have no coefficient functions");
}

TaylorTable ModelSpec::taylor_table(double xbar, double ybar, int order) const {
    if (order < 0) throw DomainError("Taylor table order must be nonnegative");
    if (kind_ == ModelKind::CustomTable) {
        if (table_->order() < order)
            throw DomainError("custom table order is below the requested order");
        return *table_;
    }
    TaylorTable t(order, xbar, ybar);
    const auto c0 = coefficients(xbar, ybar);
    switch (kind_) {
        case ModelKind::CEV: {
            const double g = 2.0 * (cev_.gamma - 1.0);
            for (int i = 0; i <= order; ++i) t.a(i, 0) = c0.a * std::pow(g, i) / factorial(i);
            break;
        }
        case ModelKind::Heston: {
            const auto& p = heston_;
            const double emy = std::exp(-ybar);
            for (int j = 0; j <= order; ++j) {
                const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
                t.a(0, j) = c0.a / factorial(j);
                t.b(0, j) = 0.5 * p.delta * p.delta * emy * sgn / factorial(j);
                t.c(0, j) = (p.kappa * p.theta - 0.5 * p.delta * p.delta) * emy * sgn / factorial(j);
            }
            t.c(0, 0) -= p.kappa;
            t.f(0, 0) = c0.f;
            break;
        }
        case ModelKind::SABR: {
            const double g = sabr_.gamma - 1.0;
            for (int i = 0; i <= order; ++i)
                for (int j = 0; i + j <= order; ++j) {
                    const double fact = factorial(i) * factorial(j);
                    t.a(i, j) = c0.a * std::pow(2.0 * g, i) * std::pow(2.0, j) / fact;
                    t.f(i, j) = c0.f * std::pow(g, i) / fact;
                }
            t.b(0, 0) = c0.b;
            t.c(0, 0) = c0.c;
            break;
        }
        case ModelKind::CustomTable:
            break;
    }
    return t;
}

HestonBetaMap heston_beta_map(const HestonParams& p, double y, double beta) {
    if (beta == 0.0) throw DomainError("leverage ratio must be nonzero");
    HestonParams q = p;
    q.theta = beta * beta * p.theta;
    q.delta = std::abs(beta) * p.delta;
    q.rho = beta > 0.0 ? p.rho : -p.rho;
    return {q, y + std::log(beta * beta)};
}

PiecewiseConstant::PiecewiseConstant(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
    if (breaks_.empty() || breaks_.size() != values_.size())
        throw DomainError("piecewise-constant curve needs one value per breakpoint");
    if (!std::is_sorted(breaks_.begin(), breaks_.end()) ||
        std::adjacent_find(breaks_.begin(), breaks_.end()) != breaks_.end())
        throw DomainError("breakpoints must be strictly increasing");
}

double PiecewiseConstant::operator()(double t) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    if (it == breaks_.begin()) return values_.front();
    return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
}

double PiecewiseConstant::integral(double t0, double t1) const {
    if (t1 < t0) return -integral(t1, t0);
    // Piece i covers [breaks[i], breaks[i+1]); the first piece extends to -inf, the last to +inf.
    double total = 0.0;
    const std::size_t n = breaks_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = (i == 0) ? t0 : std::max(t0, breaks_[i]);
        const double hi = (i + 1 == n) ? t1 : std::min(t1, breaks_[i + 1]);
        if (hi > lo) total += values_[i] * (hi - lo);
    }
    return total;
}

PiecewiseConstant operator+(const PiecewiseConstant& a, const PiecewiseConstant& b) {
    std::vector<double> br = a.breaks_;
    br.insert(br.end(), b.breaks_.begin(), b.breaks_.end());
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    std::vector<double> vals;
    vals.reserve(br.size());
    for (double t : br) vals.push_back(a(t) + b(t));
    return PiecewiseConstant(std::move(br), std::move(vals));
}

MarketPoint drift_shift(const MarketPoint& p, const RateCurves& curves) {
    MarketPoint out = p;
    const double R = curves.r.integral(p.t, p.T);
    const double Q = curves.q.integral(p.t, p.T);
    const double C = curves.c.integral(p.t, p.T);
    out.x += R - Q;
    out.z += R - C - p.beta * Q;
    return out;
}

double discount_factor(const MarketPoint& p, const RateCurves& curves) {
    return std::exp(-curves.r.integral(p.t, p.T));
}

std::optional<std::string> check_beta(double beta) {
    if (beta == 0.0 || !std::isfinite(beta)) throw DomainError("leverage ratio must be nonzero");
    static const double usual[] = {-3, -2, -1, 1, 2, 3};
    for (double b : usual)
        if (beta == b) return std::nullopt;
    std::ostringstream os;
    os << "leverage ratio " << beta << " is outside the usual set {-3,-2,-1,1,2,3}";
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool parse_plain_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == s.size() && std::isfinite(out);
}

bool parse_number(const std::string& text, double& out) {
    const std::string s = trim(text);
    if (s.size() > 5 && lower(s.substr(0, 4)) == "log(" && s.back() == ')') {
        double inner = 0.0;
        if (!parse_plain_number(trim(s.substr(4, s.size() - 5)), inner) || !(inner > 0.0))
            return false;
        out = std::log(inner);
        return true;
    }
    return parse_plain_number(s, out);
}

}  // namespace

ModelFile parse_model_file(std::istream& in, const std::string& source) {
    static const std::set<std::string> known = {"kind",  "delta", "gamma", "kappa", "theta",
                                                "rho",   "beta",  "x0",    "y0",    "z0"};
    std::map<std::string, double> num;
    std::map<std::string, int> where;
    std::string kind;
    int kind_line = 0;
    std::string line;
    int lineno = 0;
    auto fail = [&](int ln, const std::string& msg) -> ConfigError {
        return ConfigError(source + ":" + std::to_string(ln) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw fail(lineno, "expected 'key = value'");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (!known.count(key)) throw fail(lineno, "unknown key '" + key + "'");
        if (where.count(key) || (key == "kind" && kind_line))
            throw fail(lineno, "duplicate key '" + key + "'");
        if (key == "kind") {
            kind = lower(value);
            kind_line = lineno;
            continue;
        }
        double v = 0.0;
        if (!parse_number(value, v)) throw fail(lineno, "malformed number for '" + key + "'");
        num[key] = v;
        where[key] = lineno;
    }
    if (kind.empty()) throw ConfigError(source + ": missing 'kind'");

    std::set<std::string> allowed = {"beta", "x0", "y0", "z0"};
    std::vector<std::string> needed;
    if (kind == "cev")
        needed = {"delta", "gamma"};
    else if (kind == "heston")
        needed = {"kappa", "theta", "delta", "rho"};
    else if (kind == "sabr")
        needed = {"delta", "gamma", "rho"};
    else
        throw fail(kind_line, "unknown model kind '" + kind + "' (expected cev, heston or sabr)");
    allowed.insert(needed.begin(), needed.end());
    for (const auto& [key, ln] : where)
        if (!allowed.count(key)) throw fail(ln, "key '" + key + "' is not a " + kind + " parameter");
    for (const auto& key : needed)
        if (!num.count(key)) throw ConfigError(source + ": missing '" + key + "' for " + kind);

    auto get = [&](const std::string& key, double def) {
        auto it = num.find(key);
        return it == num.end() ? def : it->second;
    };
    ModelFile out;
    try {
        if (kind == "cev")
            out.model = ModelSpec::cev({num["delta"], num["gamma"]});
        else if (kind == "heston")
            out.model = ModelSpec::heston({num["kappa"], num["theta"], num["delta"], num["rho"]});
        else
            out.model = ModelSpec::sabr({num["delta"], num["gamma"], num["rho"]});
        out.beta = get("beta", 1.0);
        if (auto w = check_beta(out.beta)) out.warnings.push_back(*w);
    } catch (const DomainError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    out.x0 = get("x0", 0.0);
    out.y0 = get("y0", kind == "heston" ? std::log(num["theta"]) : 0.0);
    out.z0 = get("z0", 0.0);
    return out;
}

ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file '" + path + "'");
    return parse_model_file(in, path);
}

}  // namespace letf
