#pragma once

#include <stdexcept>
#include <string>

namespace corrlab {

// Failure conditions that correspond to a violated model assumption or a
// broken operation contract.  Precondition bugs (bad arguments) throw
// std::invalid_argument instead.
enum class Errc {
  profile_too_rough,
  area_bound_violated,
  sigma_ball_violated,
  incompatible_domains,
  quality_failure,
  support_violated,
  flux_norm_exceeded,
  fluxes_proportional,
  lower_bound_violated,
  early_time_mismatch,
  impedance_out_of_range,
  singular_system,
  non_finite_value,
  window_off_grid,
  incompatible_traces,
  denominator_too_small,
  ball_not_interior,
  geometry_violation,
  empty_intersection,
  insufficient_points,
  degenerate_fit,
  no_matched_pairs,
  config_parse_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::profile_too_rough: return "ProfileTooRough";
    case Errc::area_bound_violated: return "AreaBoundViolated";
    case Errc::sigma_ball_violated: return "SigmaBallViolated";
    case Errc::incompatible_domains: return "IncompatibleDomains";
    case Errc::quality_failure: return "QualityFailure";
    case Errc::support_violated: return "SupportViolated";
    case Errc::flux_norm_exceeded: return "FluxNormExceeded";
    case Errc::fluxes_proportional: return "FluxesProportional";
    case Errc::lower_bound_violated: return "LowerBoundViolated";
    case Errc::early_time_mismatch: return "EarlyTimeMismatch";
    case Errc::impedance_out_of_range: return "ImpedanceOutOfRange";
    case Errc::singular_system: return "SingularSystem";
    case Errc::non_finite_value: return "NonFiniteValue";
    case Errc::window_off_grid: return "WindowOffGrid";
    case Errc::incompatible_traces: return "IncompatibleTraces";
    case Errc::denominator_too_small: return "DenominatorTooSmall";
    case Errc::ball_not_interior: return "BallNotInterior";
    case Errc::geometry_violation: return "GeometryViolation";
    case Errc::empty_intersection: return "EmptyIntersection";
    case Errc::insufficient_points: return "InsufficientPoints";
    case Errc::degenerate_fit: return "DegenerateFit";
    case Errc::no_matched_pairs: return "NoMatchedPairs";
    case Errc::config_parse_error: return "ConfigParseError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace corrlab
