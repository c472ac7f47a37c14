#pragma once

#include <stdexcept>
#include <string>

namespace hpod {

// Every library failure derives from Error. The category decides the CLI exit
// code: usage errors exit 1, data errors exit 2, anything else exits 3.
enum class ErrorCategory { Usage, Data, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Input violates a structural invariant (empty character, empty stroke).
class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

/// Vector or matrix has the wrong size for the requested operation.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

/// Scalar argument outside its admissible range.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

class VersionError : public Error {
 public:
  explicit VersionError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

/// Checksum mismatch or a model missing one of its pairwise machines.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

/// Caller combined otherwise-valid inputs incorrectly, e.g. fed DFT features
/// to an HPOD model.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what)
      : Error(ErrorCategory::Usage, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

}  // namespace hpod
