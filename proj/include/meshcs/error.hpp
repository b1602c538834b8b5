#pragma once

#include <stdexcept>

namespace meshcs {

/// A precondition on caller-supplied data or configuration was violated.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Reading or writing a file failed.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A geometric query fell outside the meshed domain.
struct DomainError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

}  // namespace meshcs
