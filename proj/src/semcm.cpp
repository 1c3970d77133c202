#include "semcmg/semcm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "semcmg/baselines.hpp"

namespace semcmg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_weight(double alpha) { return alpha > 0.0 ? std::log(alpha) : kNegInf; }

// Normalized weight of the first of two log-weights.
double first_share(double l1, double l2) {
    const double top = std::max(l1, l2);
    const double w1 = std::exp(l1 - top);
    const double w2 = std::exp(l2 - top);
    return w1 / (w1 + w2);
}

// Squared distance between two components in (ln m, ln mean) coordinates.
double separation(const GammaParams& a, const GammaParams& b) {
    const double dm = std::log(a.m) - std::log(b.m);
    const double dmu = std::log(a.mean()) - std::log(b.mean());
    return dm * dm + dmu * dmu;
}

}  // namespace

void SemConfig::validate() const {
    if (iterations < 1) {
        throw DomainError("SEM config: iterations must be at least 1");
    }
    if (burn_window < 1 || burn_window > iterations) {
        throw DomainError("SEM config: burn window must lie in [1, iterations]");
    }
    if (!(alpha_floor > 0.0 && alpha_floor < 0.5)) {
        throw DomainError("SEM config: alpha floor must lie in (0, 0.5)");
    }
}

double e_step_observed(double x, const MixtureParams& phi) {
    if (!(x > 0.0)) {
        throw DomainError("e_step_observed: sample must be positive");
    }
    const double l1 = log_weight(phi.alpha1) + gamma_logpdf(x, phi.comp1);
    const double l2 = log_weight(phi.alpha2()) + gamma_logpdf(x, phi.comp2);
    if (l1 == kNegInf && l2 == kNegInf) {
        throw DegenerateLikelihoodError("both components have zero density at sample " + std::to_string(x));
    }
    return first_share(l1, l2);
}

double e_step_censored(double c_lin, const MixtureParams& phi) {
    if (!(c_lin > 0.0)) {
        throw DomainError("e_step_censored: threshold must be positive");
    }
    validate(phi);
    const double l1 = log_weight(phi.alpha1) + log_reg_lower_gamma(phi.comp1.m, c_lin / phi.comp1.omega);
    const double l2 = log_weight(phi.alpha2()) + log_reg_lower_gamma(phi.comp2.m, c_lin / phi.comp2.omega);
    if (l1 == kNegInf && l2 == kNegInf) {
        throw DegenerateLikelihoodError("neither component has mass below the censoring threshold");
    }
    return first_share(l1, l2);
}

Assignment s_step(const CensoredBin& bin, const MixtureParams& phi, Rng& rng) {
    validate(phi);
    Assignment out;
    const auto& observed = bin.observed();
    out.observed_first.reserve(observed.size());
    for (const double x : observed) {
        out.observed_first.push_back(bernoulli(rng, e_step_observed(x, phi)));
    }

    const std::size_t r1 = bin.r1();
    if (r1 == 0) return out;
    const double t_censored = e_step_censored(bin.c_lin(), phi);
    out.censored_first.reserve(r1);
    out.imputed.reserve(r1);
    for (std::size_t j = 0; j < r1; ++j) {
        const bool first = bernoulli(rng, t_censored);
        out.censored_first.push_back(first);
        out.imputed.push_back(sample_truncated_gamma(first ? phi.comp1 : phi.comp2, bin.c_lin(), rng));
    }
    return out;
}

std::pair<ComponentSums, ComponentSums> component_sums(const CensoredBin& bin, const Assignment& assignment) {
    const auto& observed = bin.observed();
    if (assignment.observed_first.size() != observed.size() || assignment.censored_first.size() != bin.r1() ||
        assignment.imputed.size() != bin.r1()) {
        throw DomainError("assignment does not match the bin's sample counts");
    }
    ComponentSums first;
    ComponentSums second;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        (assignment.observed_first[k] ? first : second).add(observed[k]);
    }
    for (std::size_t j = 0; j < assignment.imputed.size(); ++j) {
        (assignment.censored_first[j] ? first : second).add(assignment.imputed[j]);
    }
    return {first, second};
}

GammaParams update_component(const ComponentSums& sums, double m_prev, DigammaMode mode) {
    if (!(sums.count > 0.0)) {
        throw EmptyComponentError("component has no assigned samples");
    }
    if (!(m_prev > 0.0)) {
        throw DomainError("update_component: previous shape must be positive");
    }
    const double omega_m = sums.sum / sums.count;
    const double omega = omega_m / m_prev;
    const double mean_log_ratio = sums.sum_log / sums.count - std::log(omega);
    return {solve_shape(mean_log_ratio, mode), omega};
}

double raw_alpha1(const CensoredBin& bin, const Assignment& assignment) {
    if (bin.n_total() == 0) {
        throw InsufficientDataError("bin has no samples");
    }
    const auto first = static_cast<double>(std::count(assignment.observed_first.begin(), assignment.observed_first.end(), true) +
                                           std::count(assignment.censored_first.begin(), assignment.censored_first.end(), true));
    return first / static_cast<double>(bin.n_total());
}

MixtureParams m_step(const CensoredBin& bin, const Assignment& assignment, std::pair<double, double> m_prev,
                     const SemConfig& config) {
    const auto [first, second] = component_sums(bin, assignment);
    if (first.count == 0.0 || second.count == 0.0) {
        throw EmptyComponentError("S-step left a component without samples");
    }
    MixtureParams next;
    next.comp1 = update_component(first, m_prev.first, config.digamma_mode);
    next.comp2 = update_component(second, m_prev.second, config.digamma_mode);
    next.alpha1 = std::clamp(raw_alpha1(bin, assignment), config.alpha_floor, 1.0 - config.alpha_floor);
    return next;
}

MixtureParams order_labels(const MixtureParams& next, const MixtureParams& anchor, LabelOrder order) {
    switch (order) {
        case LabelOrder::anchor_to_init: {
            const double keep = separation(next.comp1, anchor.comp1) + separation(next.comp2, anchor.comp2);
            const double swap = separation(next.comp1, anchor.comp2) + separation(next.comp2, anchor.comp1);
            return swap < keep ? next.swapped() : next;
        }
        case LabelOrder::shape_descending:
            return next.comp1.m < next.comp2.m ? next.swapped() : next;
        case LabelOrder::none:
            break;
    }
    return next;
}

MixtureParams burn_average(std::span<const MixtureParams> iterates, std::size_t window) {
    if (window < 1 || window > iterates.size()) {
        throw DomainError("burn window must lie in [1, number of iterates]");
    }
    const auto tail = iterates.last(window);
    MixtureParams avg{0.0, {0.0, 0.0}, {0.0, 0.0}};
    for (const auto& p : tail) {
        avg.alpha1 += p.alpha1;
        avg.comp1.m += p.comp1.m;
        avg.comp1.omega += p.comp1.omega;
        avg.comp2.m += p.comp2.m;
        avg.comp2.omega += p.comp2.omega;
    }
    const double n = static_cast<double>(window);
    avg.alpha1 /= n;
    avg.comp1.m /= n;
    avg.comp1.omega /= n;
    avg.comp2.m /= n;
    avg.comp2.omega /= n;
    return avg;
}

SemTrace run_semcm(const CensoredBin& bin, const MixtureParams& init, const SemConfig& config, Rng& rng) {
    config.validate();
    validate(init);
    if (bin.observed().size() < 2) {
        throw InsufficientDataError("need at least two received samples, got " + std::to_string(bin.observed().size()));
    }

    SemTrace trace;
    trace.iterates.reserve(config.iterations);
    trace.imputations.reserve(config.iterations);
    MixtureParams current = init;
    for (std::size_t iter = 0; iter < config.iterations; ++iter) {
        std::optional<MixtureParams> next;
        Assignment assignment;
        for (std::size_t attempt = 0; attempt <= config.max_redraws && !next; ++attempt) {
            assignment = s_step(bin, current, rng);
            try {
                next = m_step(bin, assignment, {current.comp1.m, current.comp2.m}, config);
            } catch (const EmptyComponentError&) {
                if (attempt < config.max_redraws) ++trace.redraws;
            }
        }
        if (!next) {
            if (!trace.iterates.empty()) trace.final = trace.iterates.back();
            throw DegenerateFitError("component stayed empty after " + std::to_string(config.max_redraws) +
                                         " S-step redraws at iteration " + std::to_string(iter + 1),
                                     std::move(trace));
        }
        const auto in_first = static_cast<std::size_t>(
            std::count(assignment.censored_first.begin(), assignment.censored_first.end(), true));
        trace.imputations.push_back({in_first, assignment.censored_first.size() - in_first});

        current = order_labels(*next, init, config.label_order);
        trace.iterates.push_back(current);
    }
    trace.final = burn_average(trace.iterates, config.burn_window);
    return trace;
}

SemTrace run_semcm(const CensoredBin& bin, const MixtureParams& init, const SemConfig& config) {
    Rng rng = make_rng(config.seed);
    return run_semcm(bin, init, config, rng);
}

MixtureParams init_heuristic(const CensoredBin& bin, std::optional<double> m1_guess) {
    const auto& observed = bin.observed();
    if (observed.size() < 2) {
        throw InsufficientDataError("need at least two received samples, got " + std::to_string(observed.size()));
    }
    const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
    const double m1 = m1_guess ? *m1_guess : mb_shape(observed);
    if (!(m1 > 0.0) || !std::isfinite(m1)) {
        throw DomainError("init_heuristic: signal shape guess must be positive");
    }
    MixtureParams init;
    init.alpha1 = 0.5;
    init.comp1 = {m1, mean / m1};
    init.comp2 = {1.0, mean * db_to_linear(3.0)};
    return init;
}

}  // namespace semcmg
