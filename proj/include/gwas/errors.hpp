#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gwas {

// Base for all library errors. Each subclass maps to a distinct CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (wrong magic bytes, unparsable columns).
class FormatError : public Error {
 public:
  using Error::Error;
};

// File size inconsistent with the declared dimensions.
class SizeError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class EmptyResultError : public Error {
 public:
  using Error::Error;
};

// Phenotype lacks cases or controls.
class DegenerateResponseError : public Error {
 public:
  using Error::Error;
};

// Design matrix column `column` is a linear combination of the earlier ones.
class RankError : public Error {
 public:
  RankError(std::size_t column, const std::string& what) : Error(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string constraint, const std::string& what)
      : Error(what), constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

}  // namespace gwas
