#pragma once

#include <stdexcept>
#include <string>

namespace nlir {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on a physical quantity or argument was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed text input (coefficient files, line lists, map headers, CSV).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration. `key_path` names the offending key, e.g. "detector.pixel_pitch_um".
class ConfigError : public Error {
public:
    ConfigError(std::string key_path, const std::string& message)
        : Error(key_path + ": " + message), key_path_(std::move(key_path)) {}

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

/// Two data sets that must agree (axes, configuration) do not.
class IncompatibleDataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace nlir
