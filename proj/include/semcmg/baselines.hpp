#pragma once

#include <span>
#include <vector>

#include "semcmg/model.hpp"

namespace semcmg {

/// Single-Gamma shape estimators that treat the received samples as the
/// whole population (no knowledge of losses or of a second component).

/// Closed-form ML approximation m = (6 + sqrt(36 + 48 D)) / (24 D), where
/// D = ln(mean) - mean(ln). Throws DegenerateEstimateError on constant data.
double ml_minus_shape(std::span<const double> samples);

/// Moment estimator mean^2 / variance of the received power.
double mb_shape(std::span<const double> samples);

/// Omega = sample mean / m.
double scale_from_mean(std::span<const double> samples, double m);

struct LinePoint {
    double ld = 0.0;
    double value_db = 0.0;
};

struct LineFitInput {
    std::vector<LinePoint> points;
};

/// Ordinary least squares of value_db on ld, reported as PL = a - b * ld.
PathLossLine lse_line_fit(const LineFitInput& input);

}  // namespace semcmg
