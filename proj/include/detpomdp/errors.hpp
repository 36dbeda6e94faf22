#pragma once

#include <stdexcept>
#include <string>

namespace detpomdp {

// Base class for all library errors so callers can catch in one place.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed model document (syntax or schema).
struct ParseError : Error {
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line),
          column(column) {}
    explicit ParseError(const std::string& msg) : Error(msg), line(0), column(0) {}
    int line;
    int column;
};

// Model fails validation, or an operation received an invalid model/belief.
struct ModelError : Error {
    using Error::Error;
};

// A configured resource cap (belief count, closure size, oracle size) was hit.
struct CapExceeded : Error {
    CapExceeded(const std::string& what_cap, unsigned long long cap)
        : Error(what_cap + " cap exceeded (cap = " + std::to_string(cap) + ")"),
          cap(cap) {}
    unsigned long long cap;
};

// Exact arithmetic left the supported 64-bit range. Never silent.
struct ArithmeticOverflow : Error {
    using Error::Error;
};

// A caller violated an operation contract (e.g. minimizing at the cemetery).
struct ContractViolation : Error {
    using Error::Error;
};

// Invariant the library itself guarantees was broken; indicates a bug.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace detpomdp
