#pragma once

#include <stdexcept>
#include <string>

namespace gridest {

/// Simulation left the model's validity region (|omega| below the guard).
class FrequencyCollapseError : public std::runtime_error {
public:
    explicit FrequencyCollapseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid parameters, scenario, or estimator configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File / CSV I/O failures (malformed rows carry the line number in the message).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Estimation-stage failures (non-uniform stream spacing, singular recovery).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gridest
