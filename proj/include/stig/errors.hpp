#pragma once

#include <stdexcept>
#include <string>

namespace stig {

/// Bad configuration: invalid parameter values, malformed config documents,
/// inconsistent option combinations.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad input data: malformed CSV, series violating invariants, corpora too
/// small for the requested protocol.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stig
