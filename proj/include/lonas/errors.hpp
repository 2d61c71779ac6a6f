#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lonas {

/// Malformed or inconsistent caller input (bad flags, mismatched dimensions).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input whose statistics make a computation undefined, e.g. a zero-variance
/// target column in R².
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A file that does not follow its declared format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fitness table that does not cover the whole architecture space.
class CompletenessError : public std::runtime_error {
 public:
  CompletenessError(const std::string& what, std::vector<std::string> missing)
      : std::runtime_error(what), missing_(std::move(missing)) {}

  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

/// Data the dataset ingestion step cannot use (missing values, unknown levels).
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a value that cannot serve as a fitness.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph construction hit a violated precondition (bad basin map, tied optima).
class GraphError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lonas
