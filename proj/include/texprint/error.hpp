#pragma once

#include <stdexcept>
#include <string>

namespace texprint {

// Base class for every error raised by the engine. Callers that only care
// about "did it work" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input bytes (OBJ/STL/SVG/JSON documents).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input is well-formed but violates an operation's precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A numerical or geometric procedure could not produce a valid result.
class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace texprint
