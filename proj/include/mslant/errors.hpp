#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mslant {

// p or q outside the positive integers, or a similar numeric domain violation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed input: non-square matrices, non-SPD metrics, dimension mismatches.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An operator failed the algebraic identity it was declared to satisfy.
class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Evaluation hit a point outside the domain of some subexpression.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& message, std::string subexpression)
        : std::runtime_error(message + " in '" + subexpression + "'"),
          subexpression_(std::move(subexpression)) {}

    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

// The immersion is not an immersion at this chart point.
class DegeneratePointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario-level inconsistency (unknown names, wrong branch, bad dimensions).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mslant
