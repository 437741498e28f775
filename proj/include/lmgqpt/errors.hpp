#pragma once

#include <stdexcept>
#include <string>

namespace lmgqpt {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An eigensolver or a post-solve sanity check failed.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A time integration drifted outside its conservation bounds.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// A fit was given fewer usable points than it needs.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// A fit was given values outside the domain of the transform (log of <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw PreconditionError(message);
}

}  // namespace detail
}  // namespace lmgqpt
