#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavesplit {

/// Failure categories raised by the library. The CLI maps ConfigError to exit
/// status 2 and every other code to 3.
enum class ErrorCode {
    InvalidArgument,
    GridMismatch,
    SingularFactorization,
    NotHyperbolic,
    DegenerateB,
    DegenerateEigenbasis,
    WrongRegime,
    NonPositiveBC,
    SingularPi,
    CflViolation,
    OdeStepFailure,
    NotPureMode,
    NonPhysicalMedium,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Pointwise hyperbolicity failure; carries the first offending grid index.
class NotHyperbolicAt : public Error {
public:
    NotHyperbolicAt(std::size_t index, const std::string& message)
        : Error(ErrorCode::NotHyperbolic, message), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Configuration failure; `path` names the offending field, e.g. "evolution.output_times".
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message)
        : Error(ErrorCode::ConfigError, path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace wavesplit
