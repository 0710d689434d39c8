#pragma once

#include <stdexcept>
#include <string>

namespace majorize {

struct EmptySequence : std::runtime_error {
  explicit EmptySequence(const std::string& m) : std::runtime_error(m) {}
};

struct ClassMismatch : std::runtime_error {
  explicit ClassMismatch(const std::string& m) : std::runtime_error(m) {}
};

struct PairingDiverges : std::runtime_error {
  explicit PairingDiverges(const std::string& m) : std::runtime_error(m) {}
};

struct MalformedFamily : std::runtime_error {
  explicit MalformedFamily(const std::string& m) : std::runtime_error(m) {}
};

struct PreconditionFailed : std::runtime_error {
  explicit PreconditionFailed(const std::string& m) : std::runtime_error(m) {}
};

struct NotDoublyStochastic : std::runtime_error {
  explicit NotDoublyStochastic(const std::string& m) : std::runtime_error(m) {}
};

struct CompletionImpossible : std::runtime_error {
  explicit CompletionImpossible(const std::string& m) : std::runtime_error(m) {}
};

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& m) : std::runtime_error(m) {}
};

struct Infeasible : std::runtime_error {
  explicit Infeasible(const std::string& m) : std::runtime_error(m) {}
};

struct NotApplicable : std::runtime_error {
  explicit NotApplicable(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace majorize
