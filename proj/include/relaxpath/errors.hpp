#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relaxpath {

enum class Errc {
  DimensionMismatch,
  NonPositivePrior,
  NegativeObserved,
  NotNormalized,
  InvalidNu,
  NoConvergence,
  InfeasiblePoint,
  ZeroPrimal,
  EmptyInterior,
  IllegalTransition,
  IterationCapExceeded,
  NonUniformPrior,
  IncompatibleTracker,
  InvalidInstance,
  DegenerateInstance,
  ZeroProbability,
  InconsistentChain,
  InvalidArgument,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonPositivePrior: return "NonPositivePrior";
    case Errc::NegativeObserved: return "NegativeObserved";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::InvalidNu: return "InvalidNu";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::InfeasiblePoint: return "InfeasiblePoint";
    case Errc::ZeroPrimal: return "ZeroPrimal";
    case Errc::EmptyInterior: return "EmptyInterior";
    case Errc::IllegalTransition: return "IllegalTransition";
    case Errc::IterationCapExceeded: return "IterationCapExceeded";
    case Errc::NonUniformPrior: return "NonUniformPrior";
    case Errc::IncompatibleTracker: return "IncompatibleTracker";
    case Errc::InvalidInstance: return "InvalidInstance";
    case Errc::DegenerateInstance: return "DegenerateInstance";
    case Errc::ZeroProbability: return "ZeroProbability";
    case Errc::InconsistentChain: return "InconsistentChain";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace relaxpath
