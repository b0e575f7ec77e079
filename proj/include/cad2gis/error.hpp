#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cad2gis {

// Base class for every failure the pipeline reports as a hard error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input at a known line (DXF group pairs, CSV rows).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input is readable but lacks required structure (no ENTITIES section, binary DXF).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Profile or configuration value violates its schema.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Transform estimation failed (too few pairs, degenerate configuration).
class EstimationError : public Error {
 public:
  using Error::Error;
};

// Geometry operation called on invalid input (degenerate arc, double georeferencing).
class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace cad2gis
