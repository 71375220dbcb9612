#pragma once

#include <stdexcept>
#include <string>

namespace oipm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A barrier term was evaluated outside the interior of its domain.
class DomainViolation : public Error {
 public:
  DomainViolation(int term_index, const std::string& what)
      : Error(what), term_index_(term_index) {}
  /// Index of the offending term in its aggregate, or -1 for a bare term.
  int term_index() const noexcept { return term_index_; }

 private:
  int term_index_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SingularHessian : public Error {
 public:
  using Error::Error;
};

class SingularKkt : public Error {
 public:
  SingularKkt(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class InfeasibleStart : public Error {
 public:
  using Error::Error;
};

class NonConvergent : public Error {
 public:
  using Error::Error;
};

class DriftTooLarge : public Error {
 public:
  using Error::Error;
};

class MissingOracle : public Error {
 public:
  using Error::Error;
};

class DisconnectedNetwork : public Error {
 public:
  using Error::Error;
};

class PersistentInfeasibility : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace oipm
