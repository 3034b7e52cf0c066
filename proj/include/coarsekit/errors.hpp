#pragma once

#include <stdexcept>
#include <string>

namespace coarsekit {

/// Base of every error raised by the library. `exit_code()` is the status the
/// command-line tool reports for it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
    virtual const char* kind() const noexcept { return "error"; }
};

/// Input that does not match a schema or is structurally broken.
class MalformedInput : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
    const char* kind() const noexcept override { return "malformed_input"; }
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
    const char* kind() const noexcept override { return "precondition"; }
};

/// A construction was attempted and failed after its bounded retries.
class ConstructionFailure : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
    const char* kind() const noexcept override { return "construction_failure"; }
};

/// Input exceeds a hard size cap of an exponential or exhaustive routine.
class CapacityError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
    const char* kind() const noexcept override { return "capacity"; }
};

namespace detail {

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw PreconditionError(what);
}

}  // namespace detail

}  // namespace coarsekit
