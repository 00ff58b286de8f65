#pragma once

#include <stdexcept>
#include <string>

namespace catft {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int required_dim)
      : Error(what), required_dim_(required_dim) {}
  int required_dim() const { return required_dim_; }

 private:
  int required_dim_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Numerical degeneracy: vanishing codeword norms, zero outcome densities,
// singular recovery normalizers.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace catft
