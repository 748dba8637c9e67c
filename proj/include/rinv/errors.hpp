#pragma once

#include <stdexcept>
#include <string>

namespace rinv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible or out-of-range matrix dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// |det M1| fell below the singularity threshold.
class CatastropheError : public Error {
 public:
  CatastropheError(const std::string& what, double det_m1) : Error(what), det_m1_(det_m1) {}
  double det_m1() const { return det_m1_; }

 private:
  double det_m1_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rinv
