#pragma once

#include <stdexcept>
#include <string>

namespace fslab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Validation and precondition failures (bad parameters, broken invariants,
/// data that fails a domain rule).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Missing files, malformed file content, unusable external input.
class IoError : public Error {
public:
    using Error::Error;
};

/// Transport-level failure talking to a remote service. Retriable.
class BackendError : public Error {
public:
    using Error::Error;
};

/// HTTP 429 from a remote service, carrying the advertised wait.
class RateLimitError : public BackendError {
public:
    RateLimitError(const std::string& what, int retry_after_seconds)
        : BackendError(what), retry_after_seconds_(retry_after_seconds) {}

    int retry_after_seconds() const { return retry_after_seconds_; }

private:
    int retry_after_seconds_;
};

}  // namespace fslab
