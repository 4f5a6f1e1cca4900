#pragma once

#include <stdexcept>
#include <string>

namespace sievecraft {

// Input outside the mathematical domain of an operation (exit code 2 in the CLI).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A computation that would exceed a memory, size or time budget (exit code 3).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested feature outside the supported range, e.g. factoring above degree 8.
class UnsupportedError : public DomainError {
public:
    using DomainError::DomainError;
};

class ParseError : public DomainError {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : DomainError(msg + " at position " + std::to_string(pos)), position_(pos) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// Form text that parses but is not homogeneous.
class ShapeError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace sievecraft
