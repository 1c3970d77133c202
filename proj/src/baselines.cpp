#include "semcmg/baselines.hpp"

#include <cmath>
#include <numeric>

#include "semcmg/error.hpp"

namespace semcmg {

namespace {

void check_samples(std::span<const double> samples, const char* where) {
    if (samples.size() < 2) {
        throw InsufficientDataError(std::string(where) + ": need at least two samples");
    }
    for (const double x : samples) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw DomainError(std::string(where) + ": samples must be finite and positive");
        }
    }
}

double mean_of(std::span<const double> samples) {
    return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

}  // namespace

double ml_minus_shape(std::span<const double> samples) {
    check_samples(samples, "ml_minus_shape");
    // ln(mean) - mean(ln x) == -mean(ln(x / mean)); the normalized form is
    // scale invariant to rounding.
    const double mu = mean_of(samples);
    double sum_log = 0.0;
    for (const double x : samples) sum_log += std::log(x / mu);
    const double delta = -sum_log / static_cast<double>(samples.size());
    if (!(delta > 0.0)) {
        throw DegenerateEstimateError("ml_minus_shape: samples have no dispersion");
    }
    return (6.0 + std::sqrt(36.0 + 48.0 * delta)) / (24.0 * delta);
}

double mb_shape(std::span<const double> samples) {
    check_samples(samples, "mb_shape");
    const double mu = mean_of(samples);
    double ss = 0.0;
    for (const double x : samples) ss += (x - mu) * (x - mu);
    const double var = ss / static_cast<double>(samples.size());
    if (!(var > 0.0)) {
        throw DegenerateEstimateError("mb_shape: samples have zero variance");
    }
    return mu * mu / var;
}

double scale_from_mean(std::span<const double> samples, double m) {
    if (samples.empty()) {
        throw InsufficientDataError("scale_from_mean: no samples");
    }
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw DomainError("scale_from_mean: shape must be positive");
    }
    return mean_of(samples) / m;
}

PathLossLine lse_line_fit(const LineFitInput& input) {
    const auto& pts = input.points;
    if (pts.size() < 2) {
        throw RankDeficientError("lse_line_fit: need at least two points");
    }
    const double n = static_cast<double>(pts.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& p : pts) {
        mean_x += p.ld;
        mean_y += p.value_db;
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : pts) {
        sxx += (p.ld - mean_x) * (p.ld - mean_x);
        sxy += (p.ld - mean_x) * (p.value_db - mean_y);
    }
    if (!(sxx > 0.0)) {
        throw RankDeficientError("lse_line_fit: all points share the same ld");
    }
    const double slope = sxy / sxx;
    return {mean_y - slope * mean_x, -slope};
}

}  // namespace semcmg
