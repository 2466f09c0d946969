#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "letf/models.hpp"
#include "letf/oracles.hpp"

namespace letf::cli {

enum class Command { Smile, Compare, Convergence };
enum class Method { Engine, Printed, Mc, Fourier };

struct RunConfig {
    Command command = Command::Smile;
    std::string model_path;
    std::optional<double> beta;  // overrides the model file
    std::vector<double> taus{0.25};
    double lam_min = -0.4;
    double lam_max = 0.4;
    int lam_count = 41;
    int order = 3;
    std::optional<Method> method;  // per-command default when unset
    std::string out = "-";
    McConfig mc{};
    FourierConfig fourier{};
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitArbitrage = 4;

/// Parses command-line flags. Throws ConfigError on invalid input.
RunConfig parse_args(int argc, const char* const* argv);
void validate(const RunConfig& cfg);

std::vector<double> lam_grid(const RunConfig& cfg);

struct CompareSummary {
    struct PerTau {
        double tau = 0.0;
        double max_gap = 0.0;
        double max_gap_scaled = 0.0;
        double lam_at_max_gap = 0.0;
        double scaled_lo = 0.0;
        double scaled_hi = 0.0;
        int flagged = 0;
    };
    std::vector<PerTau> per_tau;
    double max_gap = 0.0;
    double max_gap_scaled = 0.0;
};

struct ConvergenceReport {
    struct Row {
        double tau;
        int order;
        double exact;
        double approx;
        double error;
    };
    std::vector<Row> rows;
    std::vector<double> slopes;  // one per order 0..N
};

/// Each command writes its table to `out` (and a JSON summary to `summary` for compare and
/// convergence) and returns the in-memory result.
void cmd_smile(const RunConfig& cfg, const ModelFile& model, const std::string& out_path);
CompareSummary cmd_compare(const RunConfig& cfg, const ModelFile& model, std::ostream& out,
                           std::ostream& summary);
ConvergenceReport cmd_convergence(const RunConfig& cfg, const ModelFile& model,
                                  std::ostream& out, std::ostream& summary);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Full program: parse, run, map exceptions to exit codes. Diagnostics go to `err`.
int run_main(int argc, const char* const* argv, std::ostream& err);

}  // namespace letf::cli
