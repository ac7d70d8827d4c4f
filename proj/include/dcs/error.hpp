#pragma once

#include <stdexcept>
#include <string>

namespace dcs {

/// Base for every error raised by the library. The CLI maps each subclass
/// to its own exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input or a violated data invariant (bad probability, label out
/// of range, ragged row, duplicate id, invalid configuration value).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The solver or oracle cannot run on the given input (e.g. fewer than two
/// classes present while COBias is enabled, search space over the limit).
class SolverError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace dcs
