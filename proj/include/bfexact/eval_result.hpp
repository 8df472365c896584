#pragma once

#include <cstddef>
#include <string_view>

namespace bfexact {

enum class Method {
  ResidueSeries,
  Hypergeometric,
  StudentTCollapse,
  TailSeries,
  Saddlepoint,
  BulkQuadrature,
  Oracle,
};

inline constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::ResidueSeries: return "ResidueSeries";
    case Method::Hypergeometric: return "Hypergeometric";
    case Method::StudentTCollapse: return "StudentTCollapse";
    case Method::TailSeries: return "TailSeries";
    case Method::Saddlepoint: return "Saddlepoint";
    case Method::BulkQuadrature: return "BulkQuadrature";
    case Method::Oracle: return "Oracle";
  }
  return "Unknown";
}

/// A computed value together with how it was obtained and how far it can be
/// trusted. `rigorous_bound` is false when `error_bound` is only an estimate.
struct EvalResult {
  double value = 0.0;
  Method method = Method::Hypergeometric;
  std::size_t terms_used = 0;
  double error_bound = 0.0;
  bool rigorous_bound = false;
  /// Set when an evaluator had to leave its preferred path (e.g. the residue
  /// series hitting its cancellation guard).
  bool fell_back = false;
};

}  // namespace bfexact
