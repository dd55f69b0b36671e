#pragma once

#include <stdexcept>
#include <string>

namespace octovisc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularPoint : public Error {
public:
    using Error::Error;
};

class ZeroForm : public Error {
public:
    using Error::Error;
};

class ConeViolation : public Error {
public:
    ConeViolation(const std::string& what, std::size_t violations)
        : Error(what), violations_(violations) {}
    [[nodiscard]] std::size_t violations() const noexcept { return violations_; }

private:
    std::size_t violations_;
};

class EmptyTable : public Error {
public:
    using Error::Error;
};

class NotHyperbolic : public Error {
public:
    using Error::Error;
};

class SearchFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace octovisc
