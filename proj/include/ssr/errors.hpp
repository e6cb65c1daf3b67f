#pragma once

#include <stdexcept>
#include <string>

namespace ssr {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value. CLI exit code 2.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A requested computation exceeds the configured enumeration budget. CLI exit code 3.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written. CLI exit code 4.
class IoError : public Error {
public:
    using Error::Error;
};

/// A matrix that must have full column rank does not, at the active tolerance.
/// In decoding this maps to the rank-failure event of the candidate subset.
class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

} // namespace ssr
