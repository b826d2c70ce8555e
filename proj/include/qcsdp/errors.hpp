#pragma once

#include <stdexcept>
#include <string>

namespace qcsdp {

// Base of every error the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input, violated precondition, size cap exceeded (exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

class SizeError : public InputError {
 public:
  using InputError::InputError;
};

// Interior-point failure or infeasibility detected (exit code 3).
class SolverError : public Error {
 public:
  using Error::Error;
};

// A strict-mode verification did not hold (exit code 4).
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcsdp
