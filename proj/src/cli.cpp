#include "letf/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "letf/black_scholes.hpp"
#include "letf/errors.hpp"
#include "letf/expansion.hpp"
#include "letf/scaling.hpp"

namespace letf::cli {

namespace {

Command parse_command(const std::string& s) {
    if (s == "smile") return Command::Smile;
    if (s == "compare") return Command::Compare;
    if (s == "convergence") return Command::Convergence;
    throw ConfigError("unknown command '" + s + "' (expected smile, compare or convergence)");
}

Method parse_method(const std::string& s) {
    if (s == "engine") return Method::Engine;
    if (s == "printed") return Method::Printed;
    if (s == "mc") return Method::Mc;
    if (s == "fourier") return Method::Fourier;
    throw ConfigError("unknown method '" + s + "' (expected engine, printed, mc or fourier)");
}

const char* method_name(Method m) {
    switch (m) {
        case Method::Engine: return "engine";
        case Method::Printed: return "printed";
        case Method::Mc: return "mc";
        case Method::Fourier: return "fourier";
    }
    return "?";
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

MarketPoint make_point(const ModelFile& m, double beta, double tau, double lam) {
    MarketPoint p;
    p.t = 0.0;
    p.T = tau;
    p.x = m.x0;
    p.y = m.y0;
    p.z = m.z0;
    p.k = m.z0 + lam;
    p.beta = beta;
    return p;
}

double beta_of(const RunConfig& cfg, const ModelFile& m) { return cfg.beta.value_or(m.beta); }

/// Approximate smile from the engine (or closed forms) on the grid.
SmileCurve approx_smile(const ModelFile& m, double beta, double tau, int order, Method method,
                        const std::vector<double>& grid) {
    const MarketPoint p0 = make_point(m, beta, tau, 0.0);
    const IvSeries s = method == Method::Printed
                           ? iv_series_printed(m.model, p0, order)
                           : iv_series_engine(m.model.taylor_table(m.x0, m.y0, order), beta, order);
    std::vector<SmilePoint> pts;
    for (double lam : grid) {
        SmilePoint sp;
        sp.lam = lam;
        sp.iv = s.evaluate(lam, tau);
        if (!(sp.iv > 0.0))
            throw NumericalError("approximate implied vol is not positive at lam = " + fmt(lam) +
                                 ", tau = " + fmt(tau));
        sp.price = bs_call_price({sp.iv, tau, m.z0, m.z0 + lam});
        sp.price_se = 0.0;
        pts.push_back(sp);
    }
    return SmileCurve(std::move(pts), {to_string(m.model.kind()), beta, tau, method_name(method)});
}

SmileCurve exact_smile(const ModelFile& m, double beta, double tau, Method method,
                       const RunConfig& cfg, const std::vector<double>& grid,
                       const TerminalSample* sample) {
    const MarketPoint p = make_point(m, beta, tau, 0.0);
    if (method == Method::Fourier) {
        if (m.model.kind() != ModelKind::Heston)
            throw ConfigError("method fourier is only available for the Heston model");
        return fourier_implied_smile(m.model.heston_params(), p, grid, cfg.fourier);
    }
    if (sample) return implied_smile_from_sample(*sample, p, grid, to_string(m.model.kind()));
    return mc_implied_smile(m.model, p, grid, cfg.mc);
}

std::string per_tau_path(const std::string& out, double tau) {
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    std::string stem = out, ext;
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        stem = out.substr(0, dot);
        ext = out.substr(dot);
    }
    return stem + "_tau" + fmt(tau) + ext;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    return f;
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
    RunConfig cfg;
    CLI::App app{"Implied volatility expansions for leveraged ETF options"};
    std::string command = "smile", method, taus;
    std::optional<double> beta;
    std::uint64_t paths = cfg.mc.paths;
    int steps = cfg.mc.steps_per_year;
    std::uint64_t seed = cfg.mc.seed;
    app.add_option("--config", cfg.model_path, "model parameter file")->required();
    app.add_option("--command", command, "smile | compare | convergence");
    app.add_option("--method", method, "engine | printed | mc | fourier");
    app.add_option("--order", cfg.order, "expansion order");
    app.add_option("--beta", beta, "leverage ratio (overrides the model file)");
    app.add_option("--tau", taus, "comma-separated maturities");
    app.add_option("--lam-min", cfg.lam_min);
    app.add_option("--lam-max", cfg.lam_max);
    app.add_option("--lam-count", cfg.lam_count);
    app.add_option("--paths", paths, "Monte Carlo paths");
    app.add_option("--steps", steps, "Monte Carlo steps per year");
    app.add_option("--seed", seed, "Monte Carlo seed");
    app.add_option("--out", cfg.out, "output path ('-' for stdout)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("command line: ") + e.what());
    }
    cfg.command = parse_command(command);
    if (!method.empty()) cfg.method = parse_method(method);
    cfg.beta = beta;
    cfg.mc.paths = paths;
    cfg.mc.steps_per_year = steps;
    cfg.mc.seed = seed;
    if (!taus.empty()) {
        cfg.taus.clear();
        std::stringstream ss(taus);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != item.size())
                throw ConfigError("--tau: malformed maturity '" + item + "'");
            cfg.taus.push_back(v);
        }
    }
    validate(cfg);
    return cfg;
}

void validate(const RunConfig& cfg) {
    if (cfg.lam_count < 2) throw ConfigError("--lam-count must be at least 2");
    if (!(cfg.lam_max > cfg.lam_min)) throw ConfigError("--lam-max must exceed --lam-min");
    if (cfg.taus.empty()) throw ConfigError("--tau needs at least one maturity");
    for (double t : cfg.taus)
        if (!(t > 0.0)) throw ConfigError("maturities must be positive");
    if (cfg.order < 0) throw ConfigError("--order must be nonnegative");
    if (cfg.command == Command::Convergence) {
        if (cfg.order > kMaxExpansionOrder)
            throw ConfigError("--order above " + std::to_string(kMaxExpansionOrder) +
                              " is not supported for price convergence");
        if (cfg.taus.size() < 3) throw ConfigError("convergence needs at least three maturities");
        if (cfg.method && *cfg.method != Method::Fourier)
            throw ConfigError("convergence uses the Fourier oracle (--method fourier)");
    } else if (cfg.order > kMaxIvOrder) {
        throw ConfigError("--order above 3 is not supported for implied vols");
    }
    if (cfg.command == Command::Compare && cfg.method &&
        (*cfg.method == Method::Engine || *cfg.method == Method::Printed))
        throw ConfigError("compare needs an exact method (mc or fourier)");
    try {
        letf::validate(cfg.mc);
        letf::validate(cfg.fourier);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

std::vector<double> lam_grid(const RunConfig& cfg) {
    std::vector<double> g;
    for (int i = 0; i < cfg.lam_count; ++i)
        g.push_back(i == cfg.lam_count - 1
                        ? cfg.lam_max
                        : cfg.lam_min + (cfg.lam_max - cfg.lam_min) * i / (cfg.lam_count - 1));
    return g;
}

void cmd_smile(const RunConfig& cfg, const ModelFile& m, const std::string& out_path) {
    const Method method = cfg.method.value_or(Method::Engine);
    const double beta = beta_of(cfg, m);
    const auto grid = lam_grid(cfg);
    if (cfg.taus.size() > 1 && out_path == "-")
        throw ConfigError("several maturities need --out (one file per maturity)");
    for (double tau : cfg.taus) {
        SmileCurve c = (method == Method::Engine || method == Method::Printed)
                           ? approx_smile(m, beta, tau, cfg.order, method, grid)
                           : exact_smile(m, beta, tau, method, cfg, grid, nullptr);
        if (out_path == "-") {
            write_smile_csv(std::cout, c);
        } else {
            const std::string path = cfg.taus.size() > 1 ? per_tau_path(out_path, tau) : out_path;
            auto f = open_out(path);
            write_smile_csv(f, c);
        }
    }
}

CompareSummary cmd_compare(const RunConfig& cfg, const ModelFile& m, std::ostream& out,
                           std::ostream& summary) {
    const Method method = cfg.method.value_or(
        m.model.kind() == ModelKind::Heston ? Method::Fourier : Method::Mc);
    const double beta = beta_of(cfg, m);
    const auto grid = lam_grid(cfg);
    CompareSummary sum;
    nlohmann::json js;
    js["model"] = to_string(m.model.kind());
    js["beta"] = beta;
    js["order"] = cfg.order;
    js["exact_method"] = method_name(method);
    js["per_tau"] = nlohmann::json::array();

    out << std::setprecision(10);
    out << "tau,lam,iv_exact,iv_exact_half_width,iv_approx,iv_beta1,iv_beta1_exact,"
           "iv_exact_scaled,iv_approx_scaled,gap,gap_scaled,flagged\n";
    for (double tau : cfg.taus) {
        std::optional<TerminalSample> sample;
        if (method == Method::Mc)
            sample = mc_simulate_terminal(m.model, make_point(m, beta, tau, 0.0), cfg.mc);
        const TerminalSample* sp = sample ? &*sample : nullptr;
        const SmileCurve ex = exact_smile(m, beta, tau, method, cfg, grid, sp);
        const SmileCurve ex1 = exact_smile(m, 1.0, tau, method, cfg, grid, sp);
        const SmileCurve ap = approx_smile(m, beta, tau, cfg.order, Method::Engine, grid);
        const SmileCurve ap1 = approx_smile(m, 1.0, tau, cfg.order, Method::Engine, grid);
        const SmileCurve ex_s = scale_Z_to_X(ex, beta);
        const SmileCurve ap_s = scale_Z_to_X(ap, beta);
        const LamRange range = common_range(ex_s, ap_s, LamRange{grid.front(), grid.back()});

        CompareSummary::PerTau pt;
        pt.tau = tau;
        pt.scaled_lo = range.first;
        pt.scaled_hi = range.second;
        auto find = [](const SmileCurve& c, double lam) -> const SmilePoint* {
            for (const auto& p : c.points())
                if (p.lam == lam) return &p;
            return nullptr;
        };
        for (double lam : grid) {
            const SmilePoint* e = find(ex, lam);
            const SmilePoint* e1 = find(ex1, lam);
            const double iv_ap = ap(lam);
            const double iv_ap1 = ap1(lam);
            const bool flagged = !e || e->flagged;
            if (flagged) ++pt.flagged;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            const double iv_e = e ? e->iv : nan;
            const double gap = e ? std::abs(iv_e - iv_ap) : nan;
            if (e && !e->flagged && gap > pt.max_gap) {
                pt.max_gap = gap;
                pt.lam_at_max_gap = lam;
            }
            double es = nan, as = nan, gs = nan;
            if (lam >= range.first && lam <= range.second) {
                try {
                    es = ex_s(lam);
                    as = ap_s(lam);
                    gs = std::abs(es - as);
                    if (!flagged) pt.max_gap_scaled = std::max(pt.max_gap_scaled, gs);
                } catch (const DomainError&) {
                }
            }
            out << tau << ',' << lam << ',' << iv_e << ',' << (e ? e->iv_half_width : nan) << ','
                << iv_ap << ',' << iv_ap1 << ',' << (e1 ? e1->iv : nan) << ',' << es << ',' << as
                << ',' << gap << ',' << gs << ',' << (flagged ? 1 : 0) << '\n';
        }
        sum.max_gap = std::max(sum.max_gap, pt.max_gap);
        sum.max_gap_scaled = std::max(sum.max_gap_scaled, pt.max_gap_scaled);
        sum.per_tau.push_back(pt);
        js["per_tau"].push_back({{"tau", tau},
                                 {"max_gap", pt.max_gap},
                                 {"lam_at_max_gap", pt.lam_at_max_gap},
                                 {"max_gap_scaled", pt.max_gap_scaled},
                                 {"scaled_range", {range.first, range.second}},
                                 {"flagged", pt.flagged}});
    }
    js["max_gap"] = sum.max_gap;
    js["max_gap_scaled"] = sum.max_gap_scaled;
    summary << js.dump(2) << '\n';
    return sum;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs matching samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("log-log fit needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport cmd_convergence(const RunConfig& cfg, const ModelFile& m, std::ostream& out,
                                  std::ostream& summary) {
    if (m.model.kind() != ModelKind::Heston)
        throw ConfigError("convergence needs a Heston model (Fourier oracle)");
    const double beta = beta_of(cfg, m);
    const int N = cfg.order;
    const PriceExpansion exp(m.model.taylor_table(m.x0, m.y0, N), beta, N);
    ConvergenceReport rep;
    std::vector<std::vector<double>> errs(static_cast<std::size_t>(N + 1));
    for (double tau : cfg.taus) {
        const MarketPoint p = make_point(m, beta, tau, 0.0);
        const double exact = heston_fourier_price(m.model.heston_params(), p, cfg.fourier, Payoff::Call);
        const PriceApprox a = exp.price(p, Payoff::Call);
        double partial = a.u0;
        for (int n = 0; n <= N; ++n) {
            if (n > 0) partial += a.terms[static_cast<std::size_t>(n - 1)];
            const double e = std::abs(exact - partial);
            rep.rows.push_back({tau, n, exact, partial, e});
            errs[static_cast<std::size_t>(n)].push_back(e);
        }
    }
    nlohmann::json js;
    js["model"] = "heston";
    js["beta"] = beta;
    js["lam"] = 0.0;
    js["taus"] = cfg.taus;
    js["slopes"] = nlohmann::json::array();
    for (int n = 0; n <= N; ++n) {
        const double s = loglog_slope(cfg.taus, errs[static_cast<std::size_t>(n)]);
        rep.slopes.push_back(s);
        js["slopes"].push_back({{"order", n}, {"slope", s}, {"bound", 0.5 * (n + 2)}});
    }
    out << std::setprecision(10) << "tau,order,price_exact,price_approx,abs_error\n";
    for (const auto& r : rep.rows)
        out << r.tau << ',' << r.order << ',' << r.exact << ',' << r.approx << ',' << r.error << '\n';
    summary << js.dump(2) << '\n';
    return rep;
}

int run_main(int argc, const char* const* argv, std::ostream& err) {
    try {
        configure_threads_from_env();
        const RunConfig cfg = parse_args(argc, argv);
        ModelFile m = load_model_file(cfg.model_path);
        for (const auto& w : m.warnings) err << "warning: " << w << '\n';
        if (cfg.beta)
            if (auto w = check_beta(*cfg.beta)) err << "warning: " << *w << '\n';
        if (cfg.method == Method::Fourier && m.model.kind() != ModelKind::Heston)
            throw ConfigError("method fourier is only available for the Heston model");
        switch (cfg.command) {
            case Command::Smile:
                cmd_smile(cfg, m, cfg.out);
                break;
            case Command::Compare:
            case Command::Convergence: {
                std::ofstream file, side;
                std::ostream* out = &std::cout;
                std::ostream* summary = &err;
                if (cfg.out != "-") {
                    file = open_out(cfg.out);
                    side = open_out(cfg.out + ".json");
                    out = &file;
                    summary = &side;
                }
                if (cfg.command == Command::Compare)
                    cmd_compare(cfg, m, *out, *summary);
                else
                    cmd_convergence(cfg, m, *out, *summary);
                break;
            }
        }
        return kExitOk;
    } catch (const CLI::CallForHelp&) {
        err << "usage: letf_smile --config FILE [--command smile|compare|convergence] "
               "[--method engine|printed|mc|fourier] [--order N] [--beta B] [--tau T[,T...]] "
               "[--lam-min L] [--lam-max L] [--lam-count N] [--paths N] [--steps N] "
               "[--seed S] [--out PATH]\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UnsupportedError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ArbitrageError& e) {
        err << "no-arbitrage violation: " << e.what() << '\n';
        return kExitArbitrage;
    } catch (const SolverError& e) {
        err << "implied vol inversion failed: " << e.what() << '\n';
        return kExitArbitrage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace letf::cli
