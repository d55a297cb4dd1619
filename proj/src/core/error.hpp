#pragma once

#include <stdexcept>
#include <string>

namespace cq {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data (bad record, bad JSON line, invalid sha, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// Violated operation precondition (bad argument ranges, empty input, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Remote endpoint unreachable or returned an unexpected status.
class NetworkError : public Error {
public:
    using Error::Error;
};

/// Repository does not exist on the forge.
class UnknownRepoError : public NetworkError {
public:
    using NetworkError::NetworkError;
};

/// Authentication or authorization failure.
class AuthError : public NetworkError {
public:
    using NetworkError::NetworkError;
};

/// Model file carries an unsupported schema version.
class VersionError : public Error {
public:
    using Error::Error;
};

/// Model file payload is damaged or truncated.
class CorruptError : public Error {
public:
    using Error::Error;
};

} // namespace cq
