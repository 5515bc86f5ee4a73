#pragma once

#include <stdexcept>
#include <string>

namespace faup {

// Base for every error raised by the toolkit. The CLI maps all of these to
// exit code 2 (data/model error).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inner eye corners coincide (or scale collapses), so no similarity frame exists.
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Malformed text or binary input. `offset` is the byte (or line, for line
// oriented formats) where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnsupportedTransitionError : public Error {
public:
    using Error::Error;
};

class ModelFormatError : public Error {
public:
    using Error::Error;
};

class ChecksumError : public ModelFormatError {
public:
    using ModelFormatError::ModelFormatError;
};

class UnsupportedVersionError : public ModelFormatError {
public:
    using ModelFormatError::ModelFormatError;
};

}  // namespace faup
