// Feasibility of several traffic classes sharing one schedule. Class h is
// routed with h-hop spraying at phase length L_h.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "orns/certifier.hpp"

namespace orns {

/// Slack on the "<= 1" feasibility comparisons.
inline constexpr double kFeasibilityTolerance = 1e-9;

struct FixedRateCheck {
  bool feasible = false;
  double sum = 0.0;
  /// 1 - sum.
  double slack = 0.0;
};

/// sum_h 2h r_h / (1 - eps) <= 1. Throws std::invalid_argument if some r_h
/// lies outside [0, (1 - eps) / (2h)].
FixedRateCheck check_fixed_rates(double eps, const std::map<std::uint32_t, double>& rates);

/// Piecewise-constant rate: points (t, r) sorted by t; the rate is r from t
/// until the next point and 0 before the first.
struct RateSeries {
  std::vector<std::pair<std::uint64_t, double>> points;

  double at(std::uint64_t t) const;
};

using TimeVaryingRates = std::map<std::uint32_t, RateSeries>;

struct TimeVaryingCheck {
  bool feasible = true;
  std::optional<std::uint64_t> first_violation;
  double max_value = 0.0;
  std::uint64_t argmax = 0;
};

/// Evaluates sum_h sum_{t in [t*-2hL_h+1, t*]} r_{h,t} / ((1-eps) L_h) <= 1
/// for every t* in [0, horizon). Times before 0 carry rate 0.
TimeVaryingCheck check_time_varying(double eps, const LambdaMap& lambdas,
                                    const TimeVaryingRates& rates, std::uint64_t horizon);

/// Each class at its fixed rate from time 0 on.
TimeVaryingRates constant_rates(const std::map<std::uint32_t, double>& rates);

/// Two-class handoff at t_star: class 1 sends (1-eps)/2 before t_star and
/// nothing after; class 2 starts at (1-eps) L2/(2 L1) and steps up by that
/// amount every 4 L2 timesteps, capped at (1-eps)/4.
TimeVaryingRates handoff_rates(double eps, std::uint64_t lambda1, std::uint64_t lambda2,
                               std::uint64_t t_star);

/// Parses `h,rate` lines. A header line starting with "h" and '#' comments
/// are skipped.
std::map<std::uint32_t, double> parse_fixed_rates(std::string_view text);
/// Parses `h,t,rate` lines into per-class series.
TimeVaryingRates parse_time_varying_rates(std::string_view text);

}  // namespace orns
