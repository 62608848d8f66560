#pragma once

#include <stdexcept>
#include <string>

namespace gridstudies {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments outside an operation's contract.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Linear system could not be factored. `node()` names the offending node
/// when it can be identified, otherwise -1.
class SingularNetwork : public Error {
public:
    SingularNetwork(const std::string& what, int node = -1)
        : Error(what), node_(node) {}
    int node() const noexcept { return node_; }

private:
    int node_;
};

/// Iterative method stopped without meeting its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number (0 if unknown).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace gridstudies
