#pragma once

#include <stdexcept>
#include <string>

namespace symjet {

// Base class for all library errors. Subcommands map these to exit code 2
// (input problems) or 1 (check failures); the library itself never aborts.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class FiberMismatch : public Error {
public:
  using Error::Error;
};

class BasePointMismatch : public Error {
public:
  using Error::Error;
};

class ChainMismatch : public Error {
public:
  using Error::Error;
};

class SingularJet : public Error {
public:
  using Error::Error;
};

class FaceMismatch : public Error {
public:
  using Error::Error;
};

class PreconditionFailed : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class NonSmoothPoint : public Error {
public:
  using Error::Error;
};

class StencilOutOfDomain : public Error {
public:
  using Error::Error;
};

class SyntaxError : public Error {
public:
  SyntaxError(const std::string& what, int column)
      : Error(what + " (column " + std::to_string(column) + ")"), column_(column) {}
  int column() const { return column_; }

private:
  int column_;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class DegenerateMetric : public Error {
public:
  using Error::Error;
};

class BadScalar : public Error {
public:
  using Error::Error;
};

class TorsionNotZero : public Error {
public:
  using Error::Error;
};

class LeftDomain : public Error {
public:
  LeftDomain(const std::string& what, double t_exit)
      : Error(what + " (t_exit=" + std::to_string(t_exit) + ")"), t_exit_(t_exit) {}
  double t_exit() const { return t_exit_; }

private:
  double t_exit_;
};

class NoConvergence : public Error {
public:
  NoConvergence(const std::string& what, int iterations)
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  int iterations() const { return iterations_; }

private:
  int iterations_;
};

class SingularFrame : public Error {
public:
  using Error::Error;
};

}  // namespace symjet
