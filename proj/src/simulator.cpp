#include "semcmg/simulator.hpp"

#include <cmath>
#include <ostream>
#include <set>
#include <string>

#include "semcmg/csv.hpp"
#include "semcmg/error.hpp"
#include "semcmg/gamma.hpp"
#include "semcmg/rng.hpp"

namespace semcmg {

namespace {

const std::set<std::string> kScenarioKeys = {"ld_start", "ld_end",   "ld_step",       "n_per_bin",
                                             "m1",       "m2",       "pl_line",       "interference_mean_db",
                                             "mixing_alpha1", "c_db", "seed"};

double number_field(const nlohmann::json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_number()) {
        throw DomainError(std::string("scenario: '") + key + "' must be a number");
    }
    return v.get<double>();
}

std::uint64_t count_field(const nlohmann::json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_number_unsigned()) {
        throw DomainError(std::string("scenario: '") + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

}  // namespace

void Scenario::validate() const {
    if (!std::isfinite(ld_start) || !std::isfinite(ld_end) || !(ld_step > 0.0) || ld_end < ld_start) {
        throw DomainError("scenario: distance grid must be non-empty with a positive step");
    }
    if (n_per_bin < 1) {
        throw DomainError("scenario: n_per_bin must be at least 1");
    }
    if (!(m1 > 0.0) || !(m2 > 0.0) || !std::isfinite(m1) || !std::isfinite(m2)) {
        throw DomainError("scenario: shapes must be positive");
    }
    if (!std::isfinite(pl_line.a) || !std::isfinite(pl_line.b) || !std::isfinite(interference_mean_db)) {
        throw DomainError("scenario: path-loss line and interference level must be finite");
    }
    if (!(mixing_alpha1 >= 0.0 && mixing_alpha1 <= 1.0)) {
        throw DomainError("scenario: mixing_alpha1 must lie in [0, 1]");
    }
    if (std::isnan(c_db)) {
        throw DomainError("scenario: c_db must be a number");
    }
}

std::vector<double> Scenario::grid() const {
    const auto count = static_cast<std::size_t>(std::floor((ld_end - ld_start) / ld_step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(ld_start + static_cast<double>(i) * ld_step);
    }
    return out;
}

Scenario scenario_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw DomainError("scenario: document must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!kScenarioKeys.contains(key)) {
            throw DomainError("scenario: unknown key '" + key + "'");
        }
    }
    for (const auto& key : kScenarioKeys) {
        if (!doc.contains(key)) {
            throw DomainError("scenario: missing key '" + key + "'");
        }
    }
    const auto& line = doc.at("pl_line");
    if (!line.is_object() || line.size() != 2 || !line.contains("a") || !line.contains("b")) {
        throw DomainError("scenario: 'pl_line' must be an object with keys 'a' and 'b'");
    }

    Scenario s;
    s.ld_start = number_field(doc, "ld_start");
    s.ld_end = number_field(doc, "ld_end");
    s.ld_step = number_field(doc, "ld_step");
    s.n_per_bin = count_field(doc, "n_per_bin");
    s.m1 = number_field(doc, "m1");
    s.m2 = number_field(doc, "m2");
    s.pl_line = {number_field(line, "a"), number_field(line, "b")};
    s.interference_mean_db = number_field(doc, "interference_mean_db");
    s.mixing_alpha1 = number_field(doc, "mixing_alpha1");
    s.c_db = number_field(doc, "c_db");
    s.seed = count_field(doc, "seed");
    s.validate();
    return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
    return {
        {"ld_start", s.ld_start},
        {"ld_end", s.ld_end},
        {"ld_step", s.ld_step},
        {"n_per_bin", s.n_per_bin},
        {"m1", s.m1},
        {"m2", s.m2},
        {"pl_line", {{"a", s.pl_line.a}, {"b", s.pl_line.b}}},
        {"interference_mean_db", s.interference_mean_db},
        {"mixing_alpha1", s.mixing_alpha1},
        {"c_db", s.c_db},
        {"seed", s.seed},
    };
}

double signal_omega_at(double ld, const Scenario& scenario) {
    return db_to_linear(scenario.pl_line.at(ld)) / scenario.m1;
}

double interference_omega(const Scenario& scenario) {
    return db_to_linear(scenario.interference_mean_db) / scenario.m2;
}

MixtureParams true_params_at(double ld, const Scenario& scenario) {
    return {scenario.mixing_alpha1,
            {scenario.m1, signal_omega_at(ld, scenario)},
            {scenario.m2, interference_omega(scenario)}};
}

double analytic_loss_fraction(double ld, const Scenario& scenario) {
    const auto p = true_params_at(ld, scenario);
    const double c = db_to_linear(scenario.c_db);
    return p.alpha1 * reg_lower_gamma(p.comp1.m, c / p.comp1.omega) +
           p.alpha2() * reg_lower_gamma(p.comp2.m, c / p.comp2.omega);
}

BinDraws simulate_bin(const Scenario& scenario, std::size_t index) {
    scenario.validate();
    const auto grid = scenario.grid();
    if (index >= grid.size()) {
        throw DomainError("simulate_bin: bin index outside the grid");
    }
    BinDraws draws;
    draws.ld = grid[index];
    const auto params = true_params_at(draws.ld, scenario);
    const double c_lin = db_to_linear(scenario.c_db);

    Rng rng = make_rng(scenario.seed, index);
    draws.power.reserve(scenario.n_per_bin);
    for (std::size_t k = 0; k < scenario.n_per_bin; ++k) {
        const bool signal = bernoulli(rng, scenario.mixing_alpha1);
        const double y = sample_gamma(signal ? params.comp1 : params.comp2, rng);
        draws.power.push_back(y);
        draws.is_signal.push_back(signal);
        draws.censored.push_back(y <= c_lin);
    }
    return draws;
}

SimulatedData generate_scenario(const Scenario& scenario) {
    scenario.validate();
    SimulatedData data;
    data.truth.signal_line = scenario.pl_line;
    data.truth.interference_mean_db = scenario.interference_mean_db;
    const auto grid = scenario.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto draws = simulate_bin(scenario, i);
        std::vector<double> observed;
        observed.reserve(draws.power.size());
        for (std::size_t k = 0; k < draws.power.size(); ++k) {
            if (!draws.censored[k]) observed.push_back(draws.power[k]);
        }
        const std::size_t censored = draws.power.size() - observed.size();
        data.bins.emplace_back(draws.ld, std::move(observed), scenario.n_per_bin, scenario.c_db);
        data.censored_counts.push_back(censored);
        data.truth.bins.push_back({draws.ld, true_params_at(draws.ld, scenario), analytic_loss_fraction(draws.ld, scenario)});
    }
    return data;
}

void write_packet_log(std::ostream& out, const Scenario& scenario) {
    scenario.validate();
    out << "seq,distance_m,rssi_dbm\n";
    long long seq = 1;
    const auto grid = scenario.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto draws = simulate_bin(scenario, i);
        const std::string distance = csv::format(std::pow(10.0, draws.ld / 10.0));
        for (std::size_t k = 0; k < draws.power.size(); ++k, ++seq) {
            out << seq << ',' << distance << ',';
            if (!draws.censored[k]) out << csv::format(linear_to_db(draws.power[k]));
            out << '\n';
        }
    }
}

void write_truth_csv(std::ostream& out, const SimulatedData& data) {
    out << kEstimateHeader << ",analytic_loss_fraction\n";
    for (std::size_t i = 0; i < data.truth.bins.size(); ++i) {
        const auto& t = data.truth.bins[i];
        const auto est = make_bin_estimate(t.ld, t.params, data.bins[i].loss_fraction());
        out << csv::format(est.ld) << ',' << csv::format(t.params.alpha1) << ',' << csv::format(t.params.comp1.m) << ','
            << csv::format(t.params.comp1.omega) << ',' << csv::format(t.params.comp2.m) << ','
            << csv::format(t.params.comp2.omega) << ',' << csv::format(est.mean1_db) << ',' << csv::format(est.mean2_db)
            << ',' << csv::format(est.loss_fraction) << ',' << csv::format(t.analytic_loss) << '\n';
    }
}

}  // namespace semcmg
