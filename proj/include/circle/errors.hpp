#pragma once

#include <stdexcept>
#include <string>

namespace circle {

/// Malformed input document or a violated precondition on user data.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A configured work or memory budget would be exceeded.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A quadrature could not reach the requested tolerance.
struct ToleranceUnachieved : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A convergence hypothesis needed for a tail bound does not hold.
struct HypothesisUnmet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace circle
