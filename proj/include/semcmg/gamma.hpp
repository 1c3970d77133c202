#pragma once

#include "semcmg/rng.hpp"

namespace semcmg {

/// One Gamma component in the linear power domain (mW).
/// Mean power is m * omega.
struct GammaParams {
    double m = 1.0;
    double omega = 1.0;

    double mean() const noexcept { return m * omega; }
    bool valid() const noexcept;

    friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

/// Throws DomainError unless m and omega are finite and positive.
void validate(const GammaParams& p);

/// Log-density of Gamma(m, omega) at y > 0.
double gamma_logpdf(double y, const GammaParams& p);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double reg_lower_gamma(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// directly so it keeps full relative accuracy in the upper tail.
double reg_upper_gamma(double a, double x);

/// ln P(a, x). Finite wherever P(a, x) > 0 in exact arithmetic, even when
/// P itself underflows a double.
double log_reg_lower_gamma(double a, double x);

/// Inverse of P(a, .) in its second argument: returns x with P(a, x) = q.
/// Requires 0 <= q < 1.
double inv_reg_lower_gamma(double a, double q);

enum class DigammaMode {
    exact,         ///< recurrence + asymptotic series, ~1e-15 absolute
    three_term,  ///< ln x - 1/(2x) - 1/(12x^2)
};

double digamma(double x, DigammaMode mode = DigammaMode::exact);

/// Derivative of digamma() in the same mode.
double trigamma(double x, DigammaMode mode = DigammaMode::exact);

/// Solves digamma(m) = target for m > 0.
double solve_shape(double target, DigammaMode mode = DigammaMode::exact);

double sample_gamma(const GammaParams& p, Rng& rng);

/// Draw from Gamma(m, omega) conditioned on y <= upper, by inverting the
/// CDF. Throws TruncationUnderflowError when P(m, upper/omega) < 1e-300.
double sample_truncated_gamma(const GammaParams& p, double upper, Rng& rng);

}  // namespace semcmg
