#pragma once

#include <stdexcept>
#include <string>

namespace actprompt {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller passed a value outside an operation's precondition.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A constructed value would violate a type invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Reading or writing an episode file failed.
class PersistenceError : public Error {
public:
    using Error::Error;
};

}  // namespace actprompt
