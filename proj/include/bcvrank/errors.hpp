#ifndef BCVRANK_ERRORS_HPP
#define BCVRANK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bcvrank {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed input.
struct InvalidInputError : Error {
    using Error::Error;
};

/// Rank argument outside the feasible range.
struct InvalidRankError : Error {
    using Error::Error;
};

/// A factor of a factored matrix is numerically rank deficient.
struct DegenerateFactorizationError : Error {
    using Error::Error;
};

/// A variable has zero sample variance (constant row).
struct DegenerateVarianceError : Error {
    using Error::Error;
};

/// A variance estimate collapsed to (numerical) zero during alternation.
struct VarianceCollapseError : Error {
    VarianceCollapseError(const std::string& msg, int step_, long row_)
        : Error(msg), step(step_), row(row_) {}
    int step;
    long row;
};

/// A fitted signal matrix has numerical rank below the requested rank.
struct DegenerateFitError : Error {
    using Error::Error;
};

/// Every candidate rank was ruled out by the variance guard.
struct NoFeasibleRankError : Error {
    using Error::Error;
};

/// Assembled factor-strength ladder is not strictly decreasing across categories.
struct StrengthCollisionError : Error {
    using Error::Error;
};

/// Malformed CSV input; coordinates are 1-based.
struct CsvParseError : Error {
    CsvParseError(const std::string& msg, long row_, long col_)
        : Error(msg), row(row_), col(col_) {}
    long row;
    long col;
};

}  // namespace bcvrank

#endif  // BCVRANK_ERRORS_HPP
