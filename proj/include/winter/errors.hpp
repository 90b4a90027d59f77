#pragma once

#include <stdexcept>
#include <string>

namespace winter {

/// Categories double as the CLI exit codes.
enum class ErrorKind : int {
  Domain = 1,
  Solver = 2,
  Quadrature = 3,
  LinearAlgebra = 4,
  Search = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, int mode) : Error(ErrorKind::Solver, what), mode_(mode) {}
  /// Mode index n of the pole that failed, 0 when not tied to a mode.
  int mode() const noexcept { return mode_; }

 private:
  int mode_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(ErrorKind::Quadrature, what), achieved_(achieved) {}
  double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class LinearAlgebraError : public Error {
 public:
  LinearAlgebraError(const std::string& what, double condition)
      : Error(ErrorKind::LinearAlgebra, what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class SearchError : public Error {
 public:
  explicit SearchError(const std::string& what) : Error(ErrorKind::Search, what) {}
};

}  // namespace winter
