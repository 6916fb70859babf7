#ifndef QMS_ERRORS_HPP
#define QMS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qms {

// Error taxonomy shared by the library and the CLI exit-code mapping:
//   validation errors -> exit 2, numerical/convergence errors -> exit 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad inputs: out-of-range parameters, mismatched sizes, coincident points.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Structurally ill-formed protocol scripts / config files. Carries the
// offending step (or field) index when known.
class ValidationError : public Error {
public:
    ValidationError(const std::string& msg, int index = -1)
        : Error(msg), index_(index) {}
    int index() const { return index_; }

private:
    int index_;
};

// Linear algebra gave up: singular system, failed eigendecomposition,
// energy bookkeeping violated beyond tolerance. `estimate` holds the
// diagnostic that tripped the failure (condition number, overshoot, ...).
class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& msg, double estimate = 0.0)
        : Error(msg), estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

// An iterative/truncated computation did not reach its tolerance. The
// estimate is the achieved self-convergence figure so callers can decide
// whether to retry with a larger budget.
class ConvergenceFailure : public Error {
public:
    explicit ConvergenceFailure(const std::string& msg, double estimate)
        : Error(msg), estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

// Exact pole hit in a closed-form expression (zero denominator).
class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& msg) : Error(msg) {}
};

}  // namespace qms

#endif
