#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stokeslab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid mesh data: bad indices, inverted elements, malformed files.
class MeshError : public Error {
public:
    using Error::Error;
};

/// Mesh file syntax error; carries the 1-based line number.
class ParseError : public MeshError {
public:
    ParseError(std::size_t line, const std::string& what)
        : MeshError("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A factorization met a pivot below its singularity threshold.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration or request (unknown names, missing tags, bad sizes).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace stokeslab
