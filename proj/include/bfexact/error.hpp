#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bfexact {

enum class ErrorKind {
  InvalidDesign,
  DomainError,
  NoConverge,
  ToleranceNotMet,
  OutOfRegime,
  FitIllConditioned,
  RegimeDiscontinuity,
  OutOfGrid,
  ExtrapolationRefused,
  NoCrossing,
};

inline constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidDesign: return "InvalidDesign";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NoConverge: return "NoConverge";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::OutOfRegime: return "OutOfRegime";
    case ErrorKind::FitIllConditioned: return "FitIllConditioned";
    case ErrorKind::RegimeDiscontinuity: return "RegimeDiscontinuity";
    case ErrorKind::OutOfGrid: return "OutOfGrid";
    case ErrorKind::ExtrapolationRefused: return "ExtrapolationRefused";
    case ErrorKind::NoCrossing: return "NoCrossing";
  }
  return "Unknown";
}

/// Every failure raised by the library carries the kind and the module that
/// raised it, so callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string_view where, const std::string& what)
      : std::runtime_error(std::string(where) + ": " + std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Validation errors are the caller's fault; everything else is numerical.
  bool is_validation() const noexcept {
    return kind_ == ErrorKind::InvalidDesign || kind_ == ErrorKind::DomainError ||
           kind_ == ErrorKind::OutOfGrid || kind_ == ErrorKind::ExtrapolationRefused;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string_view where, const std::string& what) {
  throw Error(kind, where, what);
}

}  // namespace bfexact
