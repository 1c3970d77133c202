#include "semcmg/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <string>
#include <unordered_map>

#include "semcmg/csv.hpp"
#include "semcmg/error.hpp"

namespace semcmg {

namespace {

constexpr std::string_view kHeader = "seq,distance_m,rssi_dbm";

// Binning tolerance so that ld values reconstructed from a distance land on
// the grid point they were generated from.
constexpr double kBinSlack = 1e-9;

}  // namespace

std::vector<PacketRecord> parse_packet_log(std::istream& in) {
    std::vector<PacketRecord> records;
    std::vector<ParseIssue> issues;
    std::unordered_map<std::int64_t, std::size_t> first_line_of_seq;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (csv::is_skippable(line)) continue;
        if (!header_seen) {
            if (csv::trim(line) != kHeader) {
                throw ParseError({{line_no, "expected header '" + std::string(kHeader) + "'"}});
            }
            header_seen = true;
            continue;
        }
        const auto fields = csv::split(csv::trim(line));
        if (fields.size() != 3) {
            issues.push_back({line_no, "expected 3 fields, got " + std::to_string(fields.size())});
            continue;
        }
        const auto seq = csv::parse_int(fields[0]);
        const auto distance = csv::parse_double(fields[1]);
        if (!seq) {
            issues.push_back({line_no, "sequence number is not an integer"});
            continue;
        }
        if (!distance || !(*distance > 0.0) || !std::isfinite(*distance)) {
            issues.push_back({line_no, "distance must be a positive number"});
            continue;
        }
        PacketRecord rec{*seq, *distance, std::nullopt};
        if (!fields[2].empty()) {
            const auto rssi = csv::parse_double(fields[2]);
            if (!rssi || !std::isfinite(*rssi)) {
                issues.push_back({line_no, "rssi is not a number"});
                continue;
            }
            rec.rssi_dbm = *rssi;
        }
        const auto [it, inserted] = first_line_of_seq.emplace(rec.seq, line_no);
        if (!inserted) {
            issues.push_back({line_no, "duplicate sequence number " + std::to_string(rec.seq) + " (first on line " +
                                           std::to_string(it->second) + ")"});
            continue;
        }
        records.push_back(rec);
    }
    if (!header_seen) {
        throw ParseError({{line_no, "missing header '" + std::string(kHeader) + "'"}});
    }
    if (!issues.empty()) throw ParseError(std::move(issues));
    return records;
}

std::vector<LossEvent> infer_losses(std::span<const PacketRecord> records) {
    if (std::none_of(records.begin(), records.end(), [](const auto& r) { return r.received(); })) {
        throw InsufficientDataError("infer_losses: no received packets");
    }
    std::vector<PacketRecord> sorted(records.begin(), records.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });

    std::vector<LossEvent> losses;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const auto& prev = sorted[i - 1];
        const auto& next = sorted[i];
        const std::int64_t span = next.seq - prev.seq;
        for (std::int64_t s = prev.seq + 1; s < next.seq; ++s) {
            const double t = static_cast<double>(s - prev.seq) / static_cast<double>(span);
            losses.push_back({s, prev.distance_m + t * (next.distance_m - prev.distance_m)});
        }
    }
    return losses;
}

double log_distance(double distance_m) { return 10.0 * std::log10(distance_m); }

long long ld_bin_index(double ld, double ld_step) {
    return static_cast<long long>(std::floor(ld / ld_step + kBinSlack));
}

std::vector<CensoredBin> bin_by_ld(std::span<const PacketRecord> records, std::span<const LossEvent> losses,
                                   double ld_step, double c_db) {
    if (!(ld_step > 0.0)) {
        throw DomainError("bin_by_ld: ld step must be positive");
    }
    struct Accum {
        std::vector<double> observed;
        std::size_t total = 0;
    };
    const double c_lin = db_to_linear(c_db);
    std::map<long long, Accum> bins;
    // Sample order inside a bin follows seq, so shuffled logs give identical bins.
    std::vector<PacketRecord> sorted(records.begin(), records.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
    for (const auto& rec : sorted) {
        auto& acc = bins[ld_bin_index(log_distance(rec.distance_m), ld_step)];
        ++acc.total;
        if (rec.received()) {
            const double power = db_to_linear(*rec.rssi_dbm);
            if (power > c_lin) acc.observed.push_back(power);
        }
    }
    for (const auto& loss : losses) {
        ++bins[ld_bin_index(log_distance(loss.distance_m), ld_step)].total;
    }

    std::vector<CensoredBin> out;
    out.reserve(bins.size());
    for (auto& [index, acc] : bins) {
        out.emplace_back(static_cast<double>(index) * ld_step, std::move(acc.observed), acc.total, c_db);
    }
    return out;
}

}  // namespace semcmg
