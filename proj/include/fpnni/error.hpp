#pragma once

#include <stdexcept>
#include <string>

namespace fpnni {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// An iterative routine ran out of budget. `residual()` is the last value seen.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class PoleError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

/// State became NaN/Inf during integration.
class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class AnchorUnresolved : public Error {
 public:
  using Error::Error;
};

}  // namespace fpnni
