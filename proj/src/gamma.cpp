#include "semcmg/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "semcmg/error.hpp"

namespace semcmg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxSeriesTerms = 1'000'000;

void require_shape(double a, const char* where) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError(std::string(where) + ": shape must be finite and positive");
    }
}

// ln of x^a e^-x / Gamma(a), with x given through t = ln x.
double log_prefactor(double a, double t, double x) { return a * t - x - std::lgamma(a); }

// sum_{k>=0} x^k / (a (a+1) ... (a+k)); converges for all x, fast when x < a + 1.
double lower_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int k = 0; k < kMaxSeriesTerms; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) {
            return sum;
        }
    }
    throw NumericalError("incomplete gamma series failed to converge");
}

// Continued fraction for Q(a, x) without the prefactor (modified Lentz).
double upper_fraction(double a, double x) {
    constexpr double fpmin = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxSeriesTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            return h;
        }
    }
    throw NumericalError("incomplete gamma continued fraction failed to converge");
}

// ln P(a, e^t). Works for t far below the underflow limit of exp.
double log_p_at(double a, double t) {
    const double x = std::exp(t);
    if (x < a + 1.0) {
        return log_prefactor(a, t, x) + std::log(lower_series(a, x));
    }
    const double q = std::exp(log_prefactor(a, t, x)) * upper_fraction(a, x);
    return std::log1p(-q);
}

// ln Q(a, e^t).
double log_q_at(double a, double t) {
    const double x = std::exp(t);
    if (x >= a + 1.0) {
        return log_prefactor(a, t, x) + std::log(upper_fraction(a, x));
    }
    const double p = std::exp(log_prefactor(a, t, x)) * lower_series(a, x);
    return std::log1p(-p);
}

// Solves ln P(a, e^t) = log_q for t, by safeguarded Newton in t = ln x.
double inverse_from_log(double a, double log_q) {
    // Work with whichever tail carries the target with full precision.
    const bool use_lower = log_q <= -std::log(2.0);
    const double target = use_lower ? log_q : std::log(-std::expm1(log_q));
    const double lg = std::lgamma(a);

    // f is increasing in t for both branches.
    auto eval = [&](double t, double& slope) {
        const double x = std::exp(t);
        const double log_xpdf = a * t - x - lg;
        if (use_lower) {
            const double lp = log_p_at(a, t);
            slope = std::exp(log_xpdf - lp);
            return lp - target;
        }
        const double lq = log_q_at(a, t);
        slope = std::exp(log_xpdf - lq);
        return target - lq;
    };

    // P(a, x) <= x^a / Gamma(a + 1), so this start never overshoots in the lower tail.
    double t = use_lower ? (log_q + std::lgamma(a + 1.0)) / a : std::log(std::max(a, 1.0));
    double slope = 0.0;
    double f = eval(t, slope);

    double lo = t;
    double hi = t;
    double f_lo = f;
    double f_hi = f;
    for (double step = 1.0; f_hi < 0.0; step *= 2.0) {
        lo = hi;
        f_lo = f_hi;
        hi += step;
        f_hi = eval(hi, slope);
    }
    for (double step = 1.0; f_lo > 0.0; step *= 2.0) {
        hi = lo;
        f_hi = f_lo;
        lo -= step;
        f_lo = eval(lo, slope);
    }
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;

    t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        f = eval(t, slope);
        if (f == 0.0 || std::abs(f) < 1e-14) {
            break;
        }
        if (f < 0.0) {
            lo = t;
        } else {
            hi = t;
        }
        double next = t - f / slope;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - t) <= 4.0 * kEps * std::max(1.0, std::abs(t))) {
            t = next;
            break;
        }
        t = next;
    }
    return t;
}

double digamma_exact(double x) {
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli-number asymptotic tail through x^-12.
    const double tail =
        inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * 691.0 / 32760)))));
    return result + std::log(x) - 0.5 * inv - tail;
}

double trigamma_exact(double x) {
    double result = 0.0;
    while (x < 10.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double tail =
        inv * (1.0 + inv * (0.5 + inv * (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * 5.0 / 66))))));
    return result + tail;
}

}  // namespace

bool GammaParams::valid() const noexcept {
    return std::isfinite(m) && std::isfinite(omega) && m > 0.0 && omega > 0.0;
}

void validate(const GammaParams& p) {
    if (!p.valid()) {
        throw DomainError("gamma parameters must be finite and positive (m=" + std::to_string(p.m) +
                          ", omega=" + std::to_string(p.omega) + ")");
    }
}

double gamma_logpdf(double y, const GammaParams& p) {
    validate(p);
    if (!(y > 0.0) || !std::isfinite(y)) {
        throw DomainError("gamma_logpdf: y must be finite and positive");
    }
    const double z = y / p.omega;
    return (p.m - 1.0) * std::log(z) - z - std::lgamma(p.m) - std::log(p.omega);
}

double reg_lower_gamma(double a, double x) {
    require_shape(a, "reg_lower_gamma");
    if (!(x >= 0.0)) {
        throw DomainError("reg_lower_gamma: x must be non-negative");
    }
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double t = std::log(x);
    if (x < a + 1.0) {
        return std::exp(log_prefactor(a, t, x)) * lower_series(a, x);
    }
    return 1.0 - std::exp(log_prefactor(a, t, x)) * upper_fraction(a, x);
}

double reg_upper_gamma(double a, double x) {
    require_shape(a, "reg_upper_gamma");
    if (!(x >= 0.0)) {
        throw DomainError("reg_upper_gamma: x must be non-negative");
    }
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double t = std::log(x);
    if (x >= a + 1.0) {
        return std::exp(log_prefactor(a, t, x)) * upper_fraction(a, x);
    }
    return 1.0 - std::exp(log_prefactor(a, t, x)) * lower_series(a, x);
}

double log_reg_lower_gamma(double a, double x) {
    require_shape(a, "log_reg_lower_gamma");
    if (!(x >= 0.0)) {
        throw DomainError("log_reg_lower_gamma: x must be non-negative");
    }
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (std::isinf(x)) return 0.0;
    return log_p_at(a, std::log(x));
}

double inv_reg_lower_gamma(double a, double q) {
    require_shape(a, "inv_reg_lower_gamma");
    if (!(q >= 0.0 && q < 1.0)) {
        throw DomainError("inv_reg_lower_gamma: q must lie in [0, 1)");
    }
    if (q == 0.0) return 0.0;
    return std::exp(inverse_from_log(a, std::log(q)));
}

double digamma(double x, DigammaMode mode) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("digamma: argument must be finite and positive");
    }
    if (mode == DigammaMode::three_term) {
        return std::log(x) - 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x);
    }
    return digamma_exact(x);
}

double trigamma(double x, DigammaMode mode) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("trigamma: argument must be finite and positive");
    }
    if (mode == DigammaMode::three_term) {
        return 1.0 / x + 1.0 / (2.0 * x * x) + 1.0 / (6.0 * x * x * x);
    }
    return trigamma_exact(x);
}

double solve_shape(double target, DigammaMode mode) {
    if (!std::isfinite(target)) {
        throw DomainError("solve_shape: target must be finite");
    }
    // digamma is strictly increasing from -inf to +inf in both modes, so
    // growing a bracket geometrically from 1 always terminates.
    double lo = 1.0;
    double hi = 1.0;
    if (digamma(1.0, mode) < target) {
        while (digamma(hi, mode) < target) {
            lo = hi;
            hi *= 2.0;
            if (!std::isfinite(hi)) throw DomainError("solve_shape: target too large");
        }
    } else {
        while (digamma(lo, mode) > target) {
            hi = lo;
            lo *= 0.5;
            if (lo == 0.0) throw DomainError("solve_shape: target too small");
        }
    }

    const double tol = 1e-12 * std::max(1.0, std::abs(target));
    double m = 0.5 * (lo + hi);
    for (int iter = 0; iter < 300; ++iter) {
        const double f = digamma(m, mode) - target;
        if (std::abs(f) < tol) break;
        if (f < 0.0) {
            lo = m;
        } else {
            hi = m;
        }
        double next = m - f / trigamma(m, mode);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (next == m || hi - lo <= 2.0 * kEps * hi) {
            m = next;
            break;
        }
        m = next;
    }
    return m;
}

double sample_gamma(const GammaParams& p, Rng& rng) {
    validate(p);
    std::gamma_distribution<double> dist(p.m, p.omega);
    return dist(rng);
}

double sample_truncated_gamma(const GammaParams& p, double upper, Rng& rng) {
    validate(p);
    if (!(upper > 0.0)) {
        throw DomainError("sample_truncated_gamma: upper bound must be positive");
    }
    const double log_mass = log_reg_lower_gamma(p.m, upper / p.omega);
    if (log_mass < std::log(kTiny)) {
        throw TruncationUnderflowError("component has no mass below the censoring threshold (m=" +
                                       std::to_string(p.m) + ", omega=" + std::to_string(p.omega) + ")");
    }
    // u in (0, 1]
    const double u = 1.0 - uniform01(rng);
    const double log_q = std::min(std::log(u) + log_mass, -kEps);
    const double y = p.omega * std::exp(inverse_from_log(p.m, log_q));
    return std::clamp(y, std::numeric_limits<double>::min(), upper);
}

}  // namespace semcmg
