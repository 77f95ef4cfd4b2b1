#include "hstrn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hstrn::quadrature {

namespace {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEval {
  double integral;
  double error;
};

PanelEval gk15(const Fn& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  evals += 15;
  double kron = kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kron += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

void adapt(const Fn& f, double a, double b, double tol, int depth,
           double& total, double& err_total, long& evals) {
  const PanelEval p = gk15(f, a, b, evals);
  if (p.error <= tol || depth >= 48 || b - a < 1e-15 * (std::abs(a) + 1.0)) {
    total += p.integral;
    err_total += p.error;
    return;
  }
  const double mid = 0.5 * (a + b);
  adapt(f, a, mid, 0.5 * tol, depth + 1, total, err_total, evals);
  adapt(f, mid, b, 0.5 * tol, depth + 1, total, err_total, evals);
}

}  // namespace

QuadResult integrate(const Fn& f, double a, double b, double rel_tol,
                     double abs_tol) {
  long evals = 0;
  const PanelEval first = gk15(f, a, b, evals);
  double target = std::max(abs_tol, rel_tol * std::abs(first.integral));
  if (first.error <= target) return {first.integral, first.error, evals};
  double total = 0.0, err = 0.0;
  const double mid = 0.5 * (a + b);
  adapt(f, a, mid, 0.5 * target, 1, total, err, evals);
  adapt(f, mid, b, 0.5 * target, 1, total, err, evals);
  // one refinement pass when the first estimate was a bad tolerance anchor
  if (std::abs(total) > 0.0 && err > rel_tol * std::abs(total) && err > abs_tol) {
    target = std::max(abs_tol, rel_tol * std::abs(total));
    total = 0.0;
    err = 0.0;
    adapt(f, a, mid, 0.5 * target, 1, total, err, evals);
    adapt(f, mid, b, 0.5 * target, 1, total, err, evals);
  }
  return {total, err, evals};
}

QuadResult integrate_semi_infinite(const Fn& f, double a, double rel_tol,
                                   double abs_tol, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  auto g = [&](double u) -> double {
    if (u >= 1.0) return 0.0;
    const double inv = 1.0 / (1.0 - u);
    const double x = a + scale * u * inv;
    const double v = f(x);
    if (!std::isfinite(v)) return 0.0;
    return v * scale * inv * inv;
  };
  return integrate(g, 0.0, 1.0, rel_tol, abs_tol);
}

double log_power_exp_integral(double r, double A, double B, double alpha,
                              const Fn* extra, double rel_tol) {
  if (!(r > -1.0)) throw std::domain_error("log_power_exp_integral: need r > -1");
  if (A < 0.0 || B < 0.0 || (A == 0.0 && B == 0.0))
    throw std::domain_error("log_power_exp_integral: need A,B >= 0, not both 0");
  const double half = 0.5 * alpha;

  auto log_kernel = [&](double x) -> double {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return r * std::log(x) - A * x - B * std::pow(x, half);
  };

  // peak of the log-kernel; for r <= 0 the integrand is monotone decreasing
  double x_peak = 0.0;
  if (r > 0.0) {
    double lo = 1e-12, hi = 1.0;
    auto deriv = [&](double x) { return r / x - A - B * half * std::pow(x, half - 1.0); };
    while (deriv(hi) > 0.0 && hi < 1e18) hi *= 2.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (deriv(mid) > 0.0 ? lo : hi) = mid;
    }
    x_peak = 0.5 * (lo + hi);
  } else {
    x_peak = (A > 0.0) ? 1.0 / A : std::pow(1.0 / B, 1.0 / half);
  }
  const double log_peak = (r == 0.0 && x_peak == 0.0) ? 0.0 : log_kernel(x_peak);

  auto normalized = [&](double x) -> double {
    const double lk = log_kernel(x) - log_peak;
    if (lk < -745.0) return 0.0;
    double v = std::exp(lk);
    if (extra) v *= (*extra)(x);
    return v;
  };
  const QuadResult q =
      integrate_semi_infinite(normalized, 0.0, rel_tol, 1e-300, std::max(x_peak, 1e-6));
  if (!(q.value > 0.0))
    throw numerical_error("log_power_exp_integral: non-positive integral");
  return log_peak + std::log(q.value);
}

}  // namespace hstrn::quadrature
