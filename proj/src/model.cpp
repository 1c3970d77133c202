#include "semcmg/model.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "semcmg/csv.hpp"
#include "semcmg/error.hpp"

namespace semcmg {

double db_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

double linear_to_db(double mw) {
    if (!(mw > 0.0)) {
        throw DomainError("linear_to_db: power must be positive");
    }
    return 10.0 * std::log10(mw);
}

bool MixtureParams::valid() const noexcept {
    return alpha1 >= 0.0 && alpha1 <= 1.0 && comp1.valid() && comp2.valid();
}

void validate(const MixtureParams& p) {
    if (!(p.alpha1 >= 0.0 && p.alpha1 <= 1.0)) {
        throw DomainError("mixing weight must lie in [0, 1]");
    }
    validate(p.comp1);
    validate(p.comp2);
}

double mixture_mean_db(const MixtureParams& p, int component) {
    return linear_to_db(p.component(component).mean());
}

CensoredBin::CensoredBin(double ld, std::vector<double> observed, std::size_t n_total, double c_db)
    : ld_(ld), observed_(std::move(observed)), n_total_(n_total), c_db_(c_db), c_lin_(db_to_linear(c_db)) {
    if (observed_.size() > n_total_) {
        throw DomainError("censored bin: more observed samples than transmitted packets");
    }
    for (const double x : observed_) {
        if (!(x > c_lin_) || !std::isfinite(x)) {
            throw DomainError("censored bin: observed sample " + std::to_string(x) +
                              " mW is not above the censoring threshold");
        }
    }
}

double CensoredBin::loss_fraction() const noexcept {
    return n_total_ == 0 ? 0.0 : static_cast<double>(r1()) / static_cast<double>(n_total_);
}

CensoredBin CensoredBin::scaled(double factor) const {
    CensoredBin out = *this;
    for (double& x : out.observed_) x *= factor;
    out.c_lin_ *= factor;
    out.c_db_ = linear_to_db(out.c_lin_);
    return out;
}

BinEstimate make_bin_estimate(double ld, const MixtureParams& params, double loss_fraction) {
    BinEstimate est;
    est.ld = ld;
    est.params = params;
    est.loss_fraction = loss_fraction;
    const bool ok = params.valid();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    est.mean1_db = ok ? mixture_mean_db(params, 1) : nan;
    est.mean2_db = ok ? mixture_mean_db(params, 2) : nan;
    return est;
}

void write_estimates_csv(std::ostream& out, const std::vector<EstimateRow>& rows) {
    out << kEstimateHeader << ",status\n";
    for (const auto& row : rows) {
        const auto& e = row.estimate;
        const auto& p = e.params;
        out << csv::format(e.ld) << ',' << csv::format(p.alpha1) << ',' << csv::format(p.comp1.m) << ','
            << csv::format(p.comp1.omega) << ',' << csv::format(p.comp2.m) << ',' << csv::format(p.comp2.omega) << ','
            << csv::format(e.mean1_db) << ',' << csv::format(e.mean2_db) << ',' << csv::format(e.loss_fraction) << ','
            << row.status << '\n';
    }
}

std::vector<EstimateRow> read_estimates_csv(std::istream& in) {
    std::vector<EstimateRow> rows;
    std::vector<ParseIssue> issues;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool has_status = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::is_skippable(line)) continue;
        const std::string_view view = csv::trim(line);
        if (!header_seen) {
            const std::string_view expected = kEstimateHeader;
            if (view == expected) {
                has_status = false;
            } else if (view == std::string(expected) + ",status") {
                has_status = true;
            } else {
                throw ParseError({{line_no, "expected header '" + std::string(expected) + "[,status]'"}});
            }
            header_seen = true;
            continue;
        }
        const auto fields = csv::split(view);
        const std::size_t expected_fields = has_status ? 10 : 9;
        if (fields.size() != expected_fields) {
            issues.push_back({line_no, "expected " + std::to_string(expected_fields) + " fields"});
            continue;
        }
        double values[9];
        bool good = true;
        for (std::size_t i = 0; i < 9; ++i) {
            const auto v = csv::parse_double(fields[i]);
            if (!v) {
                issues.push_back({line_no, "non-numeric field " + std::to_string(i + 1)});
                good = false;
                break;
            }
            values[i] = *v;
        }
        if (!good) continue;
        EstimateRow row;
        row.estimate.ld = values[0];
        row.estimate.params = {values[1], {values[2], values[3]}, {values[4], values[5]}};
        row.estimate.mean1_db = values[6];
        row.estimate.mean2_db = values[7];
        row.estimate.loss_fraction = values[8];
        if (has_status) row.status = std::string(fields[9]);
        rows.push_back(std::move(row));
    }
    if (!header_seen) {
        issues.insert(issues.begin(), {0, "missing header"});
    }
    if (!issues.empty()) throw ParseError(std::move(issues));
    return rows;
}

}  // namespace semcmg
