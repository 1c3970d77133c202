#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "semcmg/gamma.hpp"

namespace semcmg {

/// dBm -> mW.
double db_to_linear(double dbm);
/// mW -> dBm; throws DomainError for non-positive power.
double linear_to_db(double mw);

/// Two-component Gamma mixture. Component 1 is the signal, component 2 the
/// interference; alpha2 is implied as 1 - alpha1.
struct MixtureParams {
    double alpha1 = 0.5;
    GammaParams comp1;
    GammaParams comp2;

    double alpha2() const noexcept { return 1.0 - alpha1; }
    double alpha(int component) const { return component == 1 ? alpha1 : alpha2(); }
    const GammaParams& component(int component) const { return component == 1 ? comp1 : comp2; }

    bool valid() const noexcept;
    /// Same mixture with the component labels exchanged.
    MixtureParams swapped() const noexcept { return {1.0 - alpha1, comp2, comp1}; }

    friend bool operator==(const MixtureParams&, const MixtureParams&) = default;
};

void validate(const MixtureParams& p);

/// 10 log10(m_i * omega_i) for component 1 or 2.
double mixture_mean_db(const MixtureParams& p, int component);

/// Samples from one distance bin. Received powers are stored in mW and are
/// all strictly above the censoring threshold; everything else is only
/// known through the count r1 = n_total - observed.size().
class CensoredBin {
  public:
    CensoredBin(double ld, std::vector<double> observed, std::size_t n_total, double c_db);

    double ld() const noexcept { return ld_; }
    const std::vector<double>& observed() const noexcept { return observed_; }
    std::size_t n_total() const noexcept { return n_total_; }
    std::size_t r1() const noexcept { return n_total_ - observed_.size(); }
    double c_db() const noexcept { return c_db_; }
    double c_lin() const noexcept { return c_lin_; }
    double loss_fraction() const noexcept;

    /// Copy with every power (and the threshold) multiplied by factor.
    CensoredBin scaled(double factor) const;

  private:
    double ld_;
    std::vector<double> observed_;
    std::size_t n_total_;
    double c_db_;
    double c_lin_;
};

struct BinEstimate {
    double ld = 0.0;
    MixtureParams params;
    double mean1_db = 0.0;
    double mean2_db = 0.0;
    double loss_fraction = 0.0;
};

BinEstimate make_bin_estimate(double ld, const MixtureParams& params, double loss_fraction);

/// Straight line PL = a - b * ld in dB.
struct PathLossLine {
    double a = 0.0;
    double b = 0.0;

    double at(double ld) const noexcept { return a - b * ld; }
};

namespace status {
inline constexpr const char* ok = "ok";
inline constexpr const char* insufficient_data = "insufficient-data";
inline constexpr const char* degenerate_fit = "degenerate-fit";
inline constexpr const char* numerical_failure = "numerical-failure";
}  // namespace status

/// One row of the estimates CSV. Failed bins keep ld and loss_fraction and
/// carry NaN parameters.
struct EstimateRow {
    BinEstimate estimate;
    std::string status = status::ok;
};

inline constexpr const char* kEstimateHeader = "ld,alpha1,m1,omega1,m2,omega2,mean1_db,mean2_db,loss_fraction";

void write_estimates_csv(std::ostream& out, const std::vector<EstimateRow>& rows);
std::vector<EstimateRow> read_estimates_csv(std::istream& in);

}  // namespace semcmg
