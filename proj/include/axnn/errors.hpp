#pragma once

#include <stdexcept>
#include <string>

namespace axnn {

// Base class for all library errors. The CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad usage, bad config values, inconsistent network state. Exit code 1.
struct ConfigError : Error {
    using Error::Error;
};

// Malformed input data: error-map files, IDX files, checkpoints. Exit code 2.
struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(what) {}
    FormatError(const std::string& what, long long byte_offset)
        : Error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    long long offset = -1;
};

// Numerical failure during training (NaN/Inf loss). Exit code 3.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace axnn
