#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

namespace adapt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// plan_logic
class MalformedExpression : public Error {
 public:
  using Error::Error;
};

// planner
class PlanParseFailure : public Error {
 public:
  using Error::Error;
};

/// The planner handed back the task itself as its only step.
class DegeneratePlan : public PlanParseFailure {
 public:
  using PlanParseFailure::PlanParseFailure;
};

// llm_backend
class BackendError : public Error {
 public:
  using Error::Error;
};

class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

class RateLimited : public BackendError {
 public:
  RateLimited(const std::string& what,
              std::optional<std::chrono::milliseconds> retry_after)
      : BackendError(what), retry_after_(retry_after) {}

  std::optional<std::chrono::milliseconds> retry_after() const {
    return retry_after_;
  }

 private:
  std::optional<std::chrono::milliseconds> retry_after_;
};

class MalformedServerResponse : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Raised before a call is issued once the episode call ceiling is reached.
class BudgetExhausted : public BackendError {
 public:
  using BackendError::BackendError;
};

class UnknownGoalForm : public BackendError {
 public:
  using BackendError::BackendError;
};

class NoRecipeKnown : public BackendError {
 public:
  using BackendError::BackendError;
};

// controller
class UnknownPolicy : public Error {
 public:
  using Error::Error;
};

// textcraft
class UnresolvedTagReference : public Error {
 public:
  using Error::Error;
};

class NoDerivation : public Error {
 public:
  using Error::Error;
};

class NoSolution : public Error {
 public:
  using Error::Error;
};

// harness
class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

}  // namespace adapt
