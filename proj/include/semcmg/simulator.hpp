#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "semcmg/model.hpp"

namespace semcmg {

/// Synthetic distance-binned measurement campaign: a signal whose mean
/// power follows a path-loss line, a distance-independent interferer, a
/// per-packet choice between the two, and left-censoring at a noise floor.
struct Scenario {
    double ld_start = 23.0;
    double ld_end = 32.0;
    double ld_step = 0.5;
    std::size_t n_per_bin = 1000;
    double m1 = 7.0;
    double m2 = 35.0;
    PathLossLine pl_line{-16.0, 3.0};
    double interference_mean_db = -97.0;
    double mixing_alpha1 = 0.5;
    double c_db = -109.0;
    std::uint64_t seed = 1;

    void validate() const;
    std::vector<double> grid() const;
};

/// JSON with exactly the Scenario fields; pl_line is {"a": .., "b": ..}.
/// Throws DomainError on missing, unknown or mistyped keys.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Omega of the signal component at log-distance ld, chosen so that
/// 10 log10(m1 * omega) lies on the path-loss line.
double signal_omega_at(double ld, const Scenario& scenario);

double interference_omega(const Scenario& scenario);

MixtureParams true_params_at(double ld, const Scenario& scenario);

/// Probability that a packet in the bin at ld falls at or below the threshold.
double analytic_loss_fraction(double ld, const Scenario& scenario);

/// Every draw of one bin before censoring.
struct BinDraws {
    double ld = 0.0;
    std::vector<double> power;
    std::vector<bool> is_signal;
    std::vector<bool> censored;
};

/// Draws for bin `index` of the grid, from a generator keyed on (seed, index).
BinDraws simulate_bin(const Scenario& scenario, std::size_t index);

struct BinTruth {
    double ld = 0.0;
    MixtureParams params;
    double analytic_loss = 0.0;
};

struct GroundTruth {
    std::vector<BinTruth> bins;
    PathLossLine signal_line;
    double interference_mean_db = 0.0;
};

struct SimulatedData {
    std::vector<CensoredBin> bins;
    GroundTruth truth;
    std::vector<std::size_t> censored_counts;
};

SimulatedData generate_scenario(const Scenario& scenario);

/// Packet log (seq,distance_m,rssi_dbm) for the whole scenario. Censored
/// packets are written as explicit loss rows with an empty rssi field.
void write_packet_log(std::ostream& out, const Scenario& scenario);

/// Per-bin true parameters; same columns as the estimates CSV (loss_fraction
/// is the empirical one) plus analytic_loss_fraction.
void write_truth_csv(std::ostream& out, const SimulatedData& data);

}  // namespace semcmg
