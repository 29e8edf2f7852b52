#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cstar {

// Base class for every error raised by the library. The CLI maps the
// concrete types onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A log-radius lies outside the representable window, or an intermediate
// real part overflowed.
class HorizonExceeded : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& reason)
      : Error("parse error at " + std::to_string(position) + ": " + reason),
        position_(position),
        reason_(reason) {}

  std::size_t position() const { return position_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

class ThresholdNotFound : public Error {
 public:
  using Error::Error;
};

class NotExpanding : public Error {
 public:
  using Error::Error;
};

class ChainViolation : public Error {
 public:
  ChainViolation(int level, const std::string& what)
      : Error("chain violation at level " + std::to_string(level) + ": " + what), level_(level) {}
  int level() const { return level_; }

 private:
  int level_;
};

class InequalityViolation : public Error {
 public:
  InequalityViolation(int index, const std::string& what)
      : Error("inequality violation at index " + std::to_string(index) + ": " + what),
        index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

class NoCellSurvives : public Error {
 public:
  using Error::Error;
};

class Unrealizable : public Error {
 public:
  using Error::Error;
};

class OracleInconclusive : public Error {
 public:
  using Error::Error;
};

class PixelCapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace cstar
