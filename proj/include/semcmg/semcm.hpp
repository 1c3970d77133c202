#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "semcmg/error.hpp"
#include "semcmg/gamma.hpp"
#include "semcmg/model.hpp"
#include "semcmg/rng.hpp"

namespace semcmg {

/// How component labels are kept consistent across iterations.
enum class LabelOrder {
    /// Swap the components whenever the swapped pair is closer (in log-shape
    /// and log-mean) to the initial parameters. Default.
    anchor_to_init,
    /// Component 1 always carries the larger shape.
    shape_descending,
    none,
};

struct SemConfig {
    std::size_t iterations = 50;
    /// Number of final iterates averaged into the reported estimate.
    std::size_t burn_window = 10;
    /// alpha1 is clamped to [alpha_floor, 1 - alpha_floor] after each M-step.
    double alpha_floor = 0.02;
    std::uint64_t seed = 0;
    DigammaMode digamma_mode = DigammaMode::exact;
    LabelOrder label_order = LabelOrder::anchor_to_init;
    /// Extra S-step draws allowed per iteration when a component comes out empty.
    std::size_t max_redraws = 10;

    void validate() const;
};

/// Result of one S-step. Labels are true for component 1.
struct Assignment {
    std::vector<bool> observed_first;
    std::vector<bool> censored_first;
    /// Imputed powers for the censored samples, aligned with censored_first.
    std::vector<double> imputed;
};

struct ImputationCounts {
    std::size_t comp1 = 0;
    std::size_t comp2 = 0;
};

struct SemTrace {
    std::vector<MixtureParams> iterates;
    std::vector<ImputationCounts> imputations;
    /// Burn-window average of the final iterates.
    MixtureParams final;
    /// Number of S-step redraws triggered by empty components.
    std::size_t redraws = 0;

    const MixtureParams& last() const { return iterates.back(); }
};

/// Raised when a run cannot continue; keeps whatever was computed so far.
class DegenerateFitError : public NumericalError {
  public:
    DegenerateFitError(const std::string& what, SemTrace partial)
        : NumericalError(what), partial_(std::move(partial)) {}

    const SemTrace& partial_trace() const noexcept { return partial_; }

  private:
    SemTrace partial_;
};

/// Posterior probability that a received sample x came from component 1.
double e_step_observed(double x, const MixtureParams& phi);

/// Posterior probability that a censored sample came from component 1.
double e_step_censored(double c_lin, const MixtureParams& phi);

Assignment s_step(const CensoredBin& bin, const MixtureParams& phi, Rng& rng);

/// Sufficient statistics of the samples assigned to one component.
struct ComponentSums {
    double count = 0.0;
    double sum = 0.0;
    double sum_log = 0.0;

    void add(double y) {
        count += 1.0;
        sum += y;
        sum_log += std::log(y);
    }
};

/// Per-component sums for a completed sample: {component 1, component 2}.
std::pair<ComponentSums, ComponentSums> component_sums(const CensoredBin& bin, const Assignment& assignment);

/// Shape/scale update for one component: omega = (weighted mean) / m_prev,
/// then m solves digamma(m) = mean ln(y / omega).
GammaParams update_component(const ComponentSums& sums, double m_prev, DigammaMode mode);

/// Fraction of the completed sample assigned to component 1, before clamping.
double raw_alpha1(const CensoredBin& bin, const Assignment& assignment);

MixtureParams m_step(const CensoredBin& bin, const Assignment& assignment, std::pair<double, double> m_prev,
                     const SemConfig& config);

/// Applies config.label_order to a freshly updated iterate.
MixtureParams order_labels(const MixtureParams& next, const MixtureParams& anchor, LabelOrder order);

/// Component-wise mean of the last `window` iterates.
MixtureParams burn_average(std::span<const MixtureParams> iterates, std::size_t window);

SemTrace run_semcm(const CensoredBin& bin, const MixtureParams& init, const SemConfig& config, Rng& rng);

/// Same as above with a generator seeded from config.seed.
SemTrace run_semcm(const CensoredBin& bin, const MixtureParams& init, const SemConfig& config);

/// Starting point built from the received samples: alpha1 = 1/2, the
/// interference component starts Rayleigh-like (m = 1) and 3 dB above the
/// sample mean, the signal component gets the moment-based shape (or the
/// caller's guess) at the sample mean.
MixtureParams init_heuristic(const CensoredBin& bin, std::optional<double> m1_guess = std::nullopt);

}  // namespace semcmg
