#pragma once

#include <functional>

#include "hstrn/errors.hpp"

namespace hstrn::quadrature {

struct QuadResult {
  double value;
  double error_estimate;
  long evaluations;
};

using Fn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod 15(7) on [a, b].
QuadResult integrate(const Fn& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 1e-14);

/// Adaptive integral over [a, inf) using the algebraic map
/// x = a + scale*u/(1-u). `scale` conditions the map; any positive value
/// is correct.
QuadResult integrate_semi_infinite(const Fn& f, double a, double rel_tol = 1e-10,
                                   double abs_tol = 1e-14, double scale = 1.0);

/// log of integral_0^inf x^r e^{-A x - B x^(alpha/2)} g(x) dx for r > -1,
/// A >= 0, B >= 0 (not both zero), g > 0 and slowly varying (pass nullptr
/// for g == 1). Peak-normalized so very large r stays representable.
double log_power_exp_integral(double r, double A, double B, double alpha,
                              const Fn* extra = nullptr, double rel_tol = 1e-10);

}  // namespace hstrn::quadrature
