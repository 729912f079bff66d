#pragma once

#include <stdexcept>
#include <string>

namespace scmimo {

// Precondition violated by the caller (bad sizes, non-finite inputs, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a special function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Eigenvalue spectrum with ties or non-positive entries; every
// Vandermonde ratio is 0/0 there.
class DegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// G^H G is numerically singular for a zero-forcing receiver.
class SingularChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Monte-Carlo run or extended-precision evaluation could not complete.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& message)
      : std::runtime_error(key_path.empty() ? message : key_path + ": " + message),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scmimo
