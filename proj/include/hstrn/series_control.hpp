#pragma once

#include <cstdint>

namespace hstrn {

/// Truncation and budget knobs shared by every series evaluation path.
struct SeriesControl {
  /// Truncation of the infinite shadowing-index sums (theta_1 / theta_2).
  int t1_max = 20;
  /// Adaptive extension ceiling for the single-link series when the tail
  /// at t1_max is still above tol.
  int t1_hard_max = 60;
  /// Enumeration budget for one multinomial power expansion.
  std::uint64_t comp_cap = 2'000'000;
  /// Tail tolerance for adaptively truncated series.
  double tol = 1e-10;
  /// Cap for the exponential-series index used by the closed-form metrics.
  int exp_series_cap = 80;
  /// A closed-form metric whose combined tail estimate exceeds this raises
  /// truncation_error instead of returning a value.
  double metric_tail_tol = 1e-6;
};

}  // namespace hstrn
