#pragma once

#include <stdexcept>
#include <string>

namespace qcbm {

// Bad argument values: non-unitary matrices, size mismatches, empty inputs.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Qubit or parameter index outside its valid range, or duplicated targets.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Register size outside the supported range.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Malformed input file. Carries the 1-based line number when known.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Numerical procedure failed to converge or lost accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qcbm
