#pragma once

#include <stdexcept>

namespace monosum {

/// Malformed input files or flags (CLI exit code 1).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A mathematical precondition failed, e.g. singular B0 (CLI exit code 2).
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The requested direction is singular or blocked by a Borel-plane pole
/// (CLI exit code 3).
struct SingularDirectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numeric iteration failed to converge (CLI exit code 4).
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace monosum
