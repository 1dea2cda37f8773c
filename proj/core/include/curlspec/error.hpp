#pragma once

#include <stdexcept>
#include <string>

namespace curlspec {

// Base of everything the library throws. Callers that only care about
// "did it work" catch this; the CLI maps it to exit code 2.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidSpecError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

class DegenerateElementError : public Error {
public:
  using Error::Error;
};

class NoFreeDofsError : public Error {
public:
  NoFreeDofsError() : Error("no free dofs: mesh too coarse for the requested operator") {}
};

class NotConvexError : public Error {
public:
  NotConvexError() : Error("BForm requires convex domain") {}
};

// Mass matrix (or another matrix required to be SPD) failed to factorize.
class NotPositiveDefiniteError : public Error {
public:
  using Error::Error;
};

class SingularShiftError : public Error {
public:
  SingularShiftError(double sigma, double suggested)
      : Error("shift " + std::to_string(sigma) +
              " is (numerically) an eigenvalue of the pencil; retry with sigma = " +
              std::to_string(suggested)),
        sigma_(sigma), suggested_(suggested) {}

  double sigma() const noexcept { return sigma_; }
  double suggested_shift() const noexcept { return suggested_; }

private:
  double sigma_;
  double suggested_;
};

class InsufficientSpectrumError : public Error {
public:
  using Error::Error;
};

}  // namespace curlspec
