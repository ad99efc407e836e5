#pragma once

#include <stdexcept>
#include <string>

namespace flowbench {

/// Violated precondition or malformed in-memory input.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed on-disk data (bad magic, truncation, non-finite payload).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Valid data used against the protocol (missing flows, bad split, leakage).
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace flowbench
