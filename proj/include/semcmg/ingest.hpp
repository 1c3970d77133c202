#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "semcmg/model.hpp"

namespace semcmg {

/// One row of a packet log. A missing rssi marks a packet whose loss was
/// logged explicitly.
struct PacketRecord {
    std::int64_t seq = 0;
    double distance_m = 0.0;
    std::optional<double> rssi_dbm;

    bool received() const noexcept { return rssi_dbm.has_value(); }
};

/// A packet known to be lost only because its sequence number is missing.
struct LossEvent {
    std::int64_t seq = 0;
    double distance_m = 0.0;
};

/// Parses `seq,distance_m,rssi_dbm` CSV. Blank lines and '#' comments are
/// skipped. Throws ParseError listing every bad line.
std::vector<PacketRecord> parse_packet_log(std::istream& in);

/// Losses implied by gaps in the sequence numbers. Each missing packet gets
/// a distance interpolated linearly (in seq) between its neighbours.
std::vector<LossEvent> infer_losses(std::span<const PacketRecord> records);

/// log-distance 10 log10(d).
double log_distance(double distance_m);

/// Index of the ld bin [k * step, (k + 1) * step) containing ld.
long long ld_bin_index(double ld, double ld_step);

/// Groups received samples and losses into censored bins ordered by ld.
/// Received samples at or below c_db count as censored.
std::vector<CensoredBin> bin_by_ld(std::span<const PacketRecord> records, std::span<const LossEvent> losses,
                                   double ld_step, double c_db);

}  // namespace semcmg
