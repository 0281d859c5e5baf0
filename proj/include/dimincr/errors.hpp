#pragma once

#include <stdexcept>
#include <string>

namespace dimincr {

// Configuration rejected before any computation started.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Node-set construction (e.g. rank-1 lattice search) gave up below its cap.
class ConstructionFailure : public std::runtime_error {
  public:
    explicit ConstructionFailure(const std::string& what) : std::runtime_error(what) {}
};

// A set was asked to materialize more members than the configured limit.
class EnumerationLimitError : public std::runtime_error {
  public:
    explicit EnumerationLimitError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dimincr
