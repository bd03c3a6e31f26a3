#pragma once

#include <stdexcept>
#include <string>

namespace deformatics {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                       : what),
        line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DerivativeOrderOverflow : public Error {
 public:
  using Error::Error;
};

class DegenerateInnerProduct : public Error {
 public:
  using Error::Error;
};

class KillingCheckFailed : public Error {
 public:
  using Error::Error;
};

class SingularY : public Error {
 public:
  SingularY(const std::string& what, double det) : Error(what), det_(det) {}
  double det() const { return det_; }

 private:
  double det_;
};

}  // namespace deformatics

namespace deformatics {

/// Bounded-degree multiplier search found no decomposition; distinct from a verified failure.
class MultiplierSearchInconclusive : public Error {
 public:
  using Error::Error;
};

class PrerequisiteViolated : public Error {
 public:
  using Error::Error;
};

}  // namespace deformatics
