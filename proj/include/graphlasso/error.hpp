#pragma once

#include <stdexcept>
#include <string>

namespace graphlasso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (dimensions, ranges, flags).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The l1/l2 ratio and the subgradient of the l2 norm are undefined at zero.
class ZeroVectorError : public Error {
public:
    using Error::Error;
};

/// The symmetric eigensolver failed or produced an invalid spectrum.
class SpectralError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace graphlasso
