#pragma once

#include <stdexcept>
#include <string>

namespace stardgt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or malformed input (CLI exit code 1).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-convergence, rank trouble, and similar (exit code 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotInvertible : public InputError {
 public:
  using InputError::InputError;
};

class AdmissibilityError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyResult : public InputError {
 public:
  using InputError::InputError;
};

class InvalidLattice : public InputError {
 public:
  using InputError::InputError;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class ModeMismatch : public InputError {
 public:
  using InputError::InputError;
};

class NonRealInput : public InputError {
 public:
  using InputError::InputError;
};

class TooLarge : public InputError {
 public:
  using InputError::InputError;
};

class ZeroSignal : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedFormat : public InputError {
 public:
  using InputError::InputError;
};

class CorruptHeader : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotOrderThree : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotConverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace stardgt
