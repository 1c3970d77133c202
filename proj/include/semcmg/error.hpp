#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace semcmg {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Base for failures that arise while estimating from data, as opposed to
/// caller mistakes.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A component has (numerically) no probability mass below the censoring
/// threshold, so it cannot have produced a censored sample.
class TruncationUnderflowError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Both mixture components assign zero density (or zero censored mass).
class DegenerateLikelihoodError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// An S-step left one component with no samples.
class EmptyComponentError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Closed-form estimator hit a singular input (e.g. constant samples).
class DegenerateEstimateError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Least-squares design matrix is rank deficient.
class RankDeficientError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class InsufficientDataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ParseIssue {
    std::size_t line;
    std::string message;
};

/// Input text could not be parsed; carries every offending line.
class ParseError : public std::runtime_error {
  public:
    explicit ParseError(std::vector<ParseIssue> issues)
        : std::runtime_error(format(issues)), issues_(std::move(issues)) {}

    const std::vector<ParseIssue>& issues() const noexcept { return issues_; }

  private:
    static std::string format(const std::vector<ParseIssue>& issues) {
        std::string out = "parse error";
        for (const auto& issue : issues) {
            out += "\n  line " + std::to_string(issue.line) + ": " + issue.message;
        }
        return out;
    }

    std::vector<ParseIssue> issues_;
};

}  // namespace semcmg
