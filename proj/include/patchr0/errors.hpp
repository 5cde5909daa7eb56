#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace patchr0 {

// Base of every error raised by the library. Callers that only need a
// message can catch this; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input violated a documented precondition (dimension mismatch,
// non-cooperative matrix, failed hypothesis check, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// One of the modelling hypotheses failed: "H1" (conservative cooperative
// connectivity), "H2" (sign structure of F and V) or "H3" (stable removal
// dynamics).
class HypothesisError : public PreconditionError {
 public:
  HypothesisError(std::string hypothesis, const std::string& message)
      : PreconditionError(hypothesis + ": " + message), hypothesis_(std::move(hypothesis)) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

// A numerical routine failed: non-convergence, overflow, singular solve.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A result that theory guarantees was not obtained. Signals a bug or an
// input that slipped past validation.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace patchr0
