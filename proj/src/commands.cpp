#include "semcmg/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "semcmg/baselines.hpp"
#include "semcmg/csv.hpp"
#include "semcmg/error.hpp"
#include "semcmg/ingest.hpp"
#include "semcmg/simulator.hpp"

namespace semcmg::cli {

namespace {

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Reads ld and mixture parameters from any CSV that carries the estimate
// columns (truth files included), keyed by bin stream id.
std::map<std::uint64_t, MixtureParams> read_params_by_bin(std::istream& in, double ld_step) {
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> column;
    std::map<std::uint64_t, MixtureParams> out;
    std::vector<ParseIssue> issues;
    const char* needed[] = {"ld", "alpha1", "m1", "omega1", "m2", "omega2"};
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::is_skippable(line)) continue;
        const auto fields = csv::split(csv::trim(line));
        if (column.empty()) {
            for (std::size_t i = 0; i < fields.size(); ++i) column[std::string(fields[i])] = i;
            for (const char* name : needed) {
                if (!column.contains(name)) throw ParseError({{line_no, std::string("missing column '") + name + "'"}});
            }
            continue;
        }
        double v[6];
        bool good = true;
        for (std::size_t i = 0; i < 6; ++i) {
            const std::size_t idx = column[needed[i]];
            const auto parsed = idx < fields.size() ? csv::parse_double(fields[idx]) : std::nullopt;
            if (!parsed) {
                issues.push_back({line_no, std::string("bad value in column '") + needed[i] + "'"});
                good = false;
                break;
            }
            v[i] = *parsed;
        }
        if (good) out[bin_stream(v[0], ld_step)] = {v[1], {v[2], v[3]}, {v[4], v[5]}};
    }
    if (!issues.empty()) throw ParseError(std::move(issues));
    return out;
}

InitProvider make_init_provider(const EstimateOptions& opts) {
    if (opts.init.truth_path) {
        auto in = open_in(*opts.init.truth_path);
        auto truth = std::make_shared<std::map<std::uint64_t, MixtureParams>>(read_params_by_bin(in, opts.ld_step));
        const auto seed = opts.sem.seed;
        const double perturb = opts.init.perturb;
        const double step = opts.ld_step;
        return [truth, seed, perturb, step](const CensoredBin& bin) {
            const auto key = bin_stream(bin.ld(), step);
            const auto it = truth->find(key);
            if (it == truth->end()) {
                throw InsufficientDataError("no initial parameters for bin at ld=" + csv::format(bin.ld()));
            }
            // Odd streams are reserved for initialization, even ones for the SEM chain.
            Rng rng = make_rng(seed, 2 * key + 1);
            return perturb_params(it->second, perturb, rng);
        };
    }
    const auto guess = opts.init.m1_guess;
    return [guess](const CensoredBin& bin) { return init_heuristic(bin, guess); };
}

void write_trace_csv(std::ostream& out, const std::vector<BinResult>& results) {
    out << "ld,iteration,alpha1,m1,omega1,m2,omega2\n";
    for (const auto& r : results) {
        for (std::size_t i = 0; i < r.trace.iterates.size(); ++i) {
            const auto& p = r.trace.iterates[i];
            out << csv::format(r.row.estimate.ld) << ',' << (i + 1) << ',' << csv::format(p.alpha1) << ','
                << csv::format(p.comp1.m) << ',' << csv::format(p.comp1.omega) << ',' << csv::format(p.comp2.m) << ','
                << csv::format(p.comp2.omega) << '\n';
        }
    }
}

// Maps exceptions escaping a command to an exit code.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: invalid configuration: " << e.what() << '\n';
        return kDataError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace

std::uint64_t bin_stream(double ld, double ld_step) { return static_cast<std::uint64_t>(ld_bin_index(ld, ld_step)); }

std::vector<CensoredBin> load_bins(const std::string& path, double ld_step, double c_db) {
    auto in = open_in(path);
    const auto records = parse_packet_log(in);
    const auto losses = infer_losses(records);
    return bin_by_ld(records, losses, ld_step, c_db);
}

MixtureParams perturb_params(const MixtureParams& truth, double perturb, Rng& rng) {
    auto factor = [&] { return 1.0 + perturb * (2.0 * uniform01(rng) - 1.0); };
    MixtureParams p = truth;
    p.alpha1 = std::clamp(p.alpha1 * factor(), 0.0, 1.0);
    p.comp1.m *= factor();
    p.comp1.omega *= factor();
    p.comp2.m *= factor();
    p.comp2.omega *= factor();
    return p;
}

std::vector<BinResult> estimate_bins(const std::vector<CensoredBin>& bins, const SemConfig& sem,
                                     const InitProvider& init, double ld_step, unsigned workers) {
    sem.validate();
    std::vector<BinResult> results(bins.size());

    auto run_one = [&](std::size_t i) {
        const auto& bin = bins[i];
        auto& result = results[i];
        result.observed = bin.observed().size();
        result.row.estimate = make_bin_estimate(bin.ld(), {kNaN, {kNaN, kNaN}, {kNaN, kNaN}}, bin.loss_fraction());
        try {
            if (bin.observed().size() < 2) {
                throw InsufficientDataError("fewer than two received samples");
            }
            const auto start = init(bin);
            Rng rng = make_rng(sem.seed, 2 * bin_stream(bin.ld(), ld_step));
            result.trace = run_semcm(bin, start, sem, rng);
            result.row.estimate = make_bin_estimate(bin.ld(), result.trace.final, bin.loss_fraction());
            result.row.status = status::ok;
        } catch (const InsufficientDataError&) {
            result.row.status = status::insufficient_data;
        } catch (const DegenerateFitError& e) {
            result.trace = e.partial_trace();
            result.row.status = status::degenerate_fit;
        } catch (const std::exception&) {
            result.row.status = status::numerical_failure;
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, bins.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < bins.size(); ++i) run_one(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < bins.size(); i = next++) run_one(i);
            });
        }
    }
    return results;
}

std::optional<std::pair<double, double>> parse_ld_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return std::nullopt;
    const auto lo = csv::parse_double(std::string_view(text).substr(0, colon));
    const auto hi = csv::parse_double(std::string_view(text).substr(colon + 1));
    if (!lo || !hi || *lo > *hi) return std::nullopt;
    return std::pair{*lo, *hi};
}

std::string truth_path_for(const std::string& out_path) {
    std::filesystem::path p(out_path);
    p.replace_extension(".truth.csv");
    return p.string();
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        auto in = open_in(opts.config_path);
        Scenario scenario = scenario_from_json(nlohmann::json::parse(in));
        if (opts.seed) scenario.seed = *opts.seed;
        const auto data = generate_scenario(scenario);
        {
            auto out = open_out(opts.out_path);
            write_packet_log(out, scenario);
        }
        auto truth = open_out(truth_path_for(opts.out_path));
        write_truth_csv(truth, data);
        return static_cast<int>(kOk);
    });
}

int cmd_estimate(const EstimateOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        const auto bins = load_bins(opts.input_path, opts.ld_step, opts.c_db);
        const auto results = estimate_bins(bins, opts.sem, make_init_provider(opts), opts.ld_step, opts.workers);
        std::vector<EstimateRow> rows;
        rows.reserve(results.size());
        for (const auto& r : results) rows.push_back(r.row);
        {
            auto out = open_out(opts.out_path);
            write_estimates_csv(out, rows);
        }
        if (opts.trace_path) {
            auto out = open_out(*opts.trace_path);
            write_trace_csv(out, results);
        }
        return static_cast<int>(kOk);
    });
}

int cmd_compare(const EstimateOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        const auto bins = load_bins(opts.input_path, opts.ld_step, opts.c_db);
        const auto results = estimate_bins(bins, opts.sem, make_init_provider(opts), opts.ld_step, opts.workers);
        auto try_shape = [](auto&& estimator, const std::vector<double>& samples) {
            try {
                return estimator(samples);
            } catch (const std::exception&) {
                return kNaN;
            }
        };
        auto out = open_out(opts.out_path);
        out << "ld,sem_m1,ml_m,mb_m,loss_fraction,status\n";
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const auto& obs = bins[i].observed();
            const auto& est = results[i].row.estimate;
            out << csv::format(bins[i].ld()) << ',' << csv::format(est.params.comp1.m) << ','
                << csv::format(try_shape([](const auto& s) { return ml_minus_shape(s); }, obs)) << ','
                << csv::format(try_shape([](const auto& s) { return mb_shape(s); }, obs)) << ','
                << csv::format(bins[i].loss_fraction()) << ',' << results[i].row.status << '\n';
        }
        return static_cast<int>(kOk);
    });
}

int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        if (opts.component != 1 && opts.component != 2) {
            err << "error: component must be 1 or 2\n";
            return kUsage;
        }
        auto in = open_in(opts.input_path);
        const auto rows = read_estimates_csv(in);
        LineFitInput input;
        for (const auto& row : rows) {
            if (row.status != status::ok) continue;
            const double ld = row.estimate.ld;
            if (opts.exclude_ld && ld >= opts.exclude_ld->first && ld <= opts.exclude_ld->second) continue;
            const double value = opts.component == 1 ? row.estimate.mean1_db : row.estimate.mean2_db;
            if (std::isfinite(value)) input.points.push_back({ld, value});
        }
        if (input.points.size() < 2) {
            err << "error: need at least two usable bins, got " << input.points.size() << '\n';
            return kDataError;
        }
        const auto line = lse_line_fit(input);
        std::ostringstream text;
        text << "a,b,points\n" << csv::format(line.a) << ',' << csv::format(line.b) << ',' << input.points.size() << '\n';
        if (opts.out_path) {
            auto file = open_out(*opts.out_path);
            file << text.str();
        } else {
            out << text.str();
        }
        return kOk;
    });
}

}  // namespace semcmg::cli
