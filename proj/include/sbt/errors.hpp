#pragma once

#include <stdexcept>
#include <string>

namespace sbt {

/// Invalid configuration or parameters supplied by the caller.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A scenario input outside its declared bounds. `field()` names the offender.
class BoundsError : public ConfigError {
public:
    BoundsError(std::string field, const std::string& what)
        : ConfigError(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Failure raised while evaluating a candidate on a system under test.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A trace too short for the temporal extent of a requirement.
class HorizonError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation requested for an objective dimension it does not support.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace sbt
