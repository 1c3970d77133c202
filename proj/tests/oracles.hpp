#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's special functions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Gamma(m, omega) density at y evaluated in 50-digit arithmetic.
inline Big gamma_pdf_big(const Big& y, const Big& m, const Big& omega) {
    using boost::multiprecision::exp;
    using boost::multiprecision::log;
    const Big z = y / omega;
    return exp((m - 1) * log(z) - z - boost::math::lgamma(m) - log(omega));
}

/// P(a, x) by numerical quadrature of the Gamma(a, 1) density on [0, x].
inline double reg_lower_gamma_quadrature(double a, double x) {
    if (x == 0.0) return 0.0;
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double lg = std::lgamma(a);
    auto density = [a, lg](double t) { return t > 0.0 ? std::exp((a - 1.0) * std::log(t) - t - lg) : 0.0; };
    // Split at the mode so the peak is resolved for large shapes.
    const double mode = std::max(a - 1.0, 0.0);
    if (mode > 0.0 && mode < x) {
        return integrator.integrate(density, 0.0, mode) + integrator.integrate(density, mode, x);
    }
    return integrator.integrate(density, 0.0, x);
}

/// Integral of f over (0, inf).
inline double integrate_half_line(const std::function<double(double)>& f) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

/// P(a, x) from Boost.Math.
inline double gamma_p(double a, double x) { return boost::math::gamma_p(a, x); }

inline double digamma_ref(double x) { return boost::math::digamma(x); }

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return d;
}

/// Root of a monotone increasing f on [lo, hi] by plain bisection.
template <class F>
double bisect(F f, double lo, double hi, double tol = 1e-13) {
    while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
