#ifndef PINKEY_ERRORS_HPP
#define PINKEY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pinkey {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientKeyMaterial : public Error {
public:
    using Error::Error;
};

/// An exhaustive oracle or enumerator was asked to exceed its size guard.
class InstanceTooLarge : public Error {
public:
    using Error::Error;
};

class GraphDisconnected : public Error {
public:
    using Error::Error;
};

class NotAStar : public Error {
public:
    using Error::Error;
};

class UnknownBasisLabel : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Carries the offending field so callers can report where a scenario went wrong.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A runtime self-check failed: a leak, a replay failure or a broken bound.
/// Never expected; signals a bug.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

} // namespace pinkey

#endif
