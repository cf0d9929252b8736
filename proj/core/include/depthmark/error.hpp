#pragma once

#include <stdexcept>
#include <string>

namespace depthmark {

// File system / OS level failures (open, read, write).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition or malformed in-process input (dimension
// mismatch, bad configuration value, inconsistent landmark sets).
class InvalidArgument : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure: rank-deficient system with no regularization,
// non-positive-definite solve, diverged factorization.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// What exactly is wrong with a serialized artifact. Kept as one enum so
// callers (and tests) can distinguish failure modes without string
// matching.
enum class FormatFault {
    BadMagic,
    BadHeader,
    Truncated,
    ZeroDims,
    BadCrc,
    UnsupportedVersion,
    WrongKind,
    UnknownChunk,
    BadDims,
    BadValue,
};

class FormatError : public std::runtime_error {
public:
    FormatError(FormatFault fault, const std::string& msg)
        : std::runtime_error(msg), fault(fault) {}

    FormatFault fault;
};

inline const char* to_string(FormatFault f) {
    switch (f) {
        case FormatFault::BadMagic: return "bad magic";
        case FormatFault::BadHeader: return "bad header";
        case FormatFault::Truncated: return "truncated";
        case FormatFault::ZeroDims: return "zero dimensions";
        case FormatFault::BadCrc: return "checksum mismatch";
        case FormatFault::UnsupportedVersion: return "unsupported version";
        case FormatFault::WrongKind: return "wrong model kind";
        case FormatFault::UnknownChunk: return "unknown chunk";
        case FormatFault::BadDims: return "inconsistent dimensions";
        case FormatFault::BadValue: return "bad value";
    }
    return "unknown";
}

}  // namespace depthmark
