#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qusd {

// Base error carrying a stable machine-readable kind string alongside the
// human-readable message. The CLI maps kinds onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct DimensionMismatchError : Error {
  explicit DimensionMismatchError(const std::string& m) : Error("dimension_mismatch", m) {}
};

struct NotHermitianError : Error {
  explicit NotHermitianError(const std::string& m) : Error("not_hermitian", m) {}
};

struct NotPsdError : Error {
  explicit NotPsdError(const std::string& m) : Error("not_psd", m) {}
};

struct BadPriorsError : Error {
  explicit BadPriorsError(const std::string& m) : Error("bad_priors", m) {}
};

struct DegenerateEnsembleError : Error {
  explicit DegenerateEnsembleError(const std::string& m) : Error("degenerate_ensemble", m) {}
};

struct SingularGramError : Error {
  explicit SingularGramError(const std::string& m) : Error("singular_gram", m) {}
};

struct UnsupportedDimensionError : Error {
  explicit UnsupportedDimensionError(const std::string& m) : Error("unsupported_dimension", m) {}
};

struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& m) : Error("infeasible", m) {}
};

struct ConditionNotMetError : Error {
  explicit ConditionNotMetError(const std::string& m) : Error("condition_not_met", m) {}
};

struct ReconstructionError : Error {
  explicit ReconstructionError(const std::string& m) : Error("reconstruction_failure", m) {}
};

struct IndexError : Error {
  explicit IndexError(const std::string& m) : Error("index_error", m) {}
};

struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(const std::string& m) : Error("invalid_argument", m) {}
};

// Raised when a result contradicts an invariant the protocol family
// guarantees (e.g. closed-form separability holds but PPT fails).
struct InconsistencyError : Error {
  explicit InconsistencyError(const std::string& m) : Error("internal_inconsistency", m) {}
};

}  // namespace qusd
