#pragma once

#include <stdexcept>
#include <string>

namespace segvec {

// Failure classes surfaced to callers. Precondition violations on in-memory
// arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

// File contents do not follow the expected format.
class FormatError : public Error {
public:
    using Error::Error;
};

// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace segvec
