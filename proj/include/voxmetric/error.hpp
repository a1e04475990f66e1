#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace voxmetric {

enum class ErrorKind {
  InvalidArgument,
  UnsupportedDatatype,
  UnsupportedDimensionality,
  UnsupportedFeature,
  MalformedFile,
  MissingArtifact,
  WriteError,
  GeometryMismatch,
  EmptyInput,
  EmptySeeds,
  EmptyMask,
  EmptyForeground,
  DegenerateStats,
  DegenerateData,
  DomainError,
  UndefinedMetric,
  SpecInfeasible,
  ManifestError,
  InvalidFoldCount,
  EvaluationFailed,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// All library failures are reported as Error; kind() is the stable contract,
/// what() carries a human-readable context string.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace voxmetric
