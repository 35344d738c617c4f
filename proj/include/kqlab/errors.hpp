#pragma once

#include <stdexcept>
#include <string>

namespace kqlab {

// Input fails a structural precondition (malformed probability, non-POVM
// element list, bad serialized file, ...). CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string condition, const std::string& message)
      : std::runtime_error(message), condition_(std::move(condition)) {}

  // Name of the first violated condition, e.g. "psd" or "completeness".
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

// A computation cannot proceed because the machine budget leaves a required
// quantity undefined (infinite complexity). Never silently clipped or zeroed;
// CLI maps this to exit code 3.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration request exceeds the configured enumeration cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kqlab
