#pragma once

#include <stdexcept>
#include <string>

namespace detline {

enum class ErrorCode {
  InvalidIncidence,
  DanglingFace,
  NotPseudoManifold,
  NonOrientable,
  ModeMismatch,
  NotClosedManifold,
  NotFlat,
  Singular,
  BoundaryMismatch,
  IllConditioned,
  BadHomologyBasis,
  ContextMismatch,
  NotAMorphism,
  NotASubdivision,
  EvenDimension,
  OddDimension,
  ZeroFrame,
  NotUnimodular,
  NotPositiveDefinite,
  DualMismatch,
  TrivialHolonomy,
  NotAcyclic,
  UnsupportedBackend,
  NoGeometricDual,
  ParseError,
  Usage,
};

constexpr const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidIncidence: return "InvalidIncidence";
    case ErrorCode::DanglingFace: return "DanglingFace";
    case ErrorCode::NotPseudoManifold: return "NotPseudoManifold";
    case ErrorCode::NonOrientable: return "NonOrientable";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::NotClosedManifold: return "NotClosedManifold";
    case ErrorCode::NotFlat: return "NotFlat";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::BadHomologyBasis: return "BadHomologyBasis";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::NotAMorphism: return "NotAMorphism";
    case ErrorCode::NotASubdivision: return "NotASubdivision";
    case ErrorCode::EvenDimension: return "EvenDimension";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::ZeroFrame: return "ZeroFrame";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DualMismatch: return "DualMismatch";
    case ErrorCode::TrivialHolonomy: return "TrivialHolonomy";
    case ErrorCode::NotAcyclic: return "NotAcyclic";
    case ErrorCode::UnsupportedBackend: return "UnsupportedBackend";
    case ErrorCode::NoGeometricDual: return "NoGeometricDual";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

// Validation errors are input defects (exit status 2 in the CLI); the rest are
// computation failures (exit status 1).
constexpr bool is_validation_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidIncidence:
    case ErrorCode::DanglingFace:
    case ErrorCode::NotPseudoManifold:
    case ErrorCode::NonOrientable:
    case ErrorCode::NotClosedManifold:
    case ErrorCode::NotFlat:
    case ErrorCode::Singular:
    case ErrorCode::BoundaryMismatch:
    case ErrorCode::ParseError:
    case ErrorCode::Usage:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace detline
