#pragma once

#include <stdexcept>
#include <string>

namespace hetnet {

/// Invalid parameters, malformed configuration, unknown preset ids.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A quadrature that failed to reach its tolerance, or a conditioning event
/// with zero probability.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hetnet
