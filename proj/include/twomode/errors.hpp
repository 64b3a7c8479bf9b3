#ifndef TWOMODE_ERRORS_HPP
#define TWOMODE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace twomode {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid circuit parameters, charge configs, grids, configs.
struct InvalidParameterError : Error {
    using Error::Error;
};

// Two eigenstates claimed the same |mn> label, or the labels are
// ambiguous (degenerate modes) where an unambiguous assignment is required.
struct LabelingError : Error {
    using Error::Error;
};

// Coarse-grid sweep found a level extremum away from the cos*cos extremal
// points; the Eq.-4-type dispersion model does not apply.
struct ModelViolationError : Error {
    using Error::Error;
};

// A (df1, df2) pair that no charge configuration can produce for the given
// dispersion. Carries the violated bound.
struct InfeasibleSplittingError : Error {
    InfeasibleSplittingError(const std::string& msg, double bound_value, double bound_limit)
        : Error(msg), value(bound_value), limit(bound_limit) {}
    double value;
    double limit;
};

struct AliasingError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

struct IntegrationError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct OutOfBoundsError : Error {
    using Error::Error;
};

}  // namespace twomode

#endif
