#pragma once

#include <stdexcept>
#include <string>

namespace orchard {

/// Root of every exception the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document (decomposer output, config, fixture, log line).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Out-of-range argument to an operation.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Unusable configuration: missing pricing row, empty backend pool, bad thresholds.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace orchard
