#pragma once

#include <stdexcept>
#include <string>

namespace kconv {

/// Failure category; the CLI maps it onto its exit code.
enum class ErrorKind {
    Config,    // invalid input, violated precondition, resource guard
    Numeric,   // an internal numerical contract did not hold
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

}  // namespace kconv
