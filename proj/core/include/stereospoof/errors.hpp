#pragma once

#include <stdexcept>
#include <string>

namespace stereospoof {

// Base for all library errors so callers can catch the family at once.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric argument outside its documented domain (non-positive depth, bad step, ...).
struct DomainError : Error {
  using Error::Error;
};

// Triangulation asked for a non-positive disparity (point at or beyond infinity).
struct DisparityError : Error {
  using Error::Error;
};

// Projection of a point with z <= 0.
struct BehindCameraError : Error {
  using Error::Error;
};

// A configuration struct violates its invariants (block bigger than image, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Image/map dimensions disagree between operands.
struct GeometryError : Error {
  using Error::Error;
};

// Reading or writing a file failed.
struct IoError : Error {
  using Error::Error;
};

// Injection schedule violates its invariants (overlapping events per sector).
struct ScheduleError : Error {
  using Error::Error;
};

// Scenario text could not be parsed; carries a 1-based line number.
struct ParseError : Error {
  int line = 0;
  ParseError(int line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

}  // namespace stereospoof
