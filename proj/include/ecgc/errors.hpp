#pragma once

#include <stdexcept>
#include <string>

namespace ecgc {

/// Invalid arguments, violated preconditions, malformed domain objects.
/// CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Degenerate numerical input (rank-deficient fit, zero-mass cell that the
/// standard remedies cannot fix). CLI exit code 2.
class DegenerateInputError : public ValidationError {
public:
    explicit DegenerateInputError(const std::string& what) : ValidationError(what) {}
};

/// Divergence or non-finite values produced at runtime. CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Rate budget below the minimum achievable rate of a grid. CLI exit code 4.
class InfeasibleBudgetError : public std::runtime_error {
public:
    InfeasibleBudgetError(const std::string& what, double min_rate_bps)
        : std::runtime_error(what), min_achievable_rate_bps(min_rate_bps) {}
    double min_achievable_rate_bps;
};

/// File system and file format failures. CLI exit code 5.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file contents; message names the offending line/offset.
class ParseError : public IoError {
public:
    explicit ParseError(const std::string& what) : IoError(what) {}
};

/// Corrupted or truncated encoded stream.
class CorruptStreamError : public IoError {
public:
    explicit CorruptStreamError(const std::string& what) : IoError(what) {}
};

} // namespace ecgc
