#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixcert {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed edge list or construction descriptor. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A precondition on arguments (empty set, bad range, parameters out of range).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The graph is not of the kind an operation requires (e.g. non-regular input to the walk).
class GraphKindError : public Error {
public:
    using Error::Error;
};

/// Exact enumeration was requested on an instance too large for it.
class TooLarge : public Error {
public:
    using Error::Error;
};

/// A generator gave up after exhausting its retry budget.
class GenerationError : public Error {
public:
    GenerationError(const std::string& what, std::size_t attempts)
        : Error(what + " (" + std::to_string(attempts) + " attempts)"), attempts_(attempts) {}
    std::size_t attempts() const noexcept { return attempts_; }

private:
    std::size_t attempts_;
};

/// The well-mixing hypothesis of a theorem-backed procedure is not met on the input.
class HypothesisError : public Error {
public:
    HypothesisError(const std::string& what, std::size_t actual, double required)
        : Error(what + ": " + std::to_string(actual) + " well-mixing vertices, need at least " +
                std::to_string(required)),
          actual_(actual), required_(required) {}
    std::size_t actual_count() const noexcept { return actual_; }
    double required_count() const noexcept { return required_; }

private:
    std::size_t actual_;
    double required_;
};

}  // namespace mixcert
