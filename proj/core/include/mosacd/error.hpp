#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mosacd {

/// Bad arguments: unknown node ids, overlapping sets, out-of-range parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation was applied to an edge in the wrong state (absent, already directed).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Orientation would close a directed or semi-directed cycle.
class CycleError : public std::runtime_error {
public:
    CycleError(const std::string& what, std::vector<int> path)
        : std::runtime_error(what), path_(std::move(path)) {}

    /// Node ids along the offending path, from the head of the new arrow back to its tail.
    const std::vector<int>& path() const noexcept { return path_; }

private:
    std::vector<int> path_;
};

/// Orientation rules disagree on an edge (inconsistent input).
class ConflictError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input files: BIF syntax, CSV shape, JSON schema.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0, int column = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                                            std::to_string(column) + ")"
                                      : what),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// The G^2 test has no degrees of freedom left (constant column, empty strata).
class DegenerateTestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A prompt template references a placeholder that has no value.
class TemplateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Expert backend failed after retries.
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal invariant was violated; always a bug.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace mosacd
