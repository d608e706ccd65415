#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vsaxmc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dimension was zero or two operands disagree on dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An argument violates a documented precondition (empty set, id out of range, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Inversion hit a spectral bin too close to zero.
class SingularSpectrumError : public Error {
 public:
  SingularSpectrumError(std::size_t bin, double magnitude)
      : Error("near-singular spectrum: bin " + std::to_string(bin) + " has magnitude " +
              std::to_string(magnitude)),
        bin_(bin) {}

  std::size_t bin() const noexcept { return bin_; }

 private:
  std::size_t bin_;
};

// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Binary file with a bad magic, version or truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace vsaxmc
