#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semcmg/model.hpp"
#include "semcmg/semcm.hpp"

namespace semcmg::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDataError = 2,
    kNumericalFailure = 3,
};

struct SimulateOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
};

struct InitOptions {
    /// Side information for the signal shape.
    std::optional<double> m1_guess;
    /// Start from the parameters in a truth CSV (as written by simulate),
    /// each multiplied by an independent factor in [1 - perturb, 1 + perturb].
    std::optional<std::string> truth_path;
    double perturb = 0.5;
};

struct EstimateOptions {
    std::string input_path;
    std::string out_path;
    std::optional<std::string> trace_path;
    double c_db = -109.0;
    double ld_step = 0.5;
    SemConfig sem;
    InitOptions init;
    /// 0 picks the hardware concurrency.
    unsigned workers = 0;
};

struct FitOptions {
    std::string input_path;
    int component = 1;
    std::optional<std::pair<double, double>> exclude_ld;
    std::optional<std::string> out_path;
};

/// Result of estimating one bin. The trace is empty for failed bins.
struct BinResult {
    EstimateRow row;
    std::size_t observed = 0;
    SemTrace trace;
};

using InitProvider = std::function<MixtureParams(const CensoredBin&)>;

/// Packet log -> censored bins (gap losses included).
std::vector<CensoredBin> load_bins(const std::string& path, double ld_step, double c_db);

/// Runs SEM on every bin in parallel; each bin draws from a generator keyed on
/// (sem.seed, bin index) so output does not depend on scheduling.
std::vector<BinResult> estimate_bins(const std::vector<CensoredBin>& bins, const SemConfig& sem,
                                     const InitProvider& init, double ld_step, unsigned workers = 0);

/// Multiplies alpha1 and every shape and scale by 1 + perturb * U(-1, 1).
MixtureParams perturb_params(const MixtureParams& truth, double perturb, Rng& rng);

/// Stream id for the generator of the bin starting at ld.
std::uint64_t bin_stream(double ld, double ld_step);

/// "LO:HI" -> (LO, HI).
std::optional<std::pair<double, double>> parse_ld_range(const std::string& text);

std::string truth_path_for(const std::string& out_path);

int cmd_simulate(const SimulateOptions& opts, std::ostream& err);
int cmd_estimate(const EstimateOptions& opts, std::ostream& err);
int cmd_compare(const EstimateOptions& opts, std::ostream& err);
int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace semcmg::cli
