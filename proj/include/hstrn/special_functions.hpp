#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hstrn/errors.hpp"

namespace hstrn::sf {

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Psi function and its first derivative, x > 0.
double digamma(double x);
double trigamma(double x);

/// Solves trigamma(m) = y for m > 0 (y > 0). Bisection on [1e-3, 1e4]
/// followed by Newton polish.
double inverse_trigamma(double y);

/// Rising factorial (a)_n, computed as an iterative product.
double pochhammer(double a, int n);

/// Kummer confluent hypergeometric 1F1(a; b; x) by ascending series.
/// Throws numerical_error if the series does not meet tol within max_terms.
double kummer_1f1(double a, double b, double x, double tol = 1e-14,
                  int max_terms = 800);

/// Upper incomplete gamma Gamma(a, x), a > 0, x >= 0. Integer a uses the
/// finite-sum form Gamma(n,x) = (n-1)! e^-x sum x^k/k!; otherwise the
/// regularized series/continued-fraction route.
double upper_incomplete_gamma(double a, double x);

/// Finite-sum form for integer order n >= 1.
double upper_incomplete_gamma_integer(int n, double x);

/// Regularized Q(a,x) = Gamma(a,x)/Gamma(a) via power series (x < a+1)
/// or Lentz continued fraction. Never takes the integer shortcut.
double regularized_gamma_q(double a, double x);

/// log of Q(a,x); usable far into the underflow range of Q itself.
double log_regularized_gamma_q(double a, double x);

// ---------------------------------------------------------------------------
// Compositions (weak integer compositions of `total` into `num_parts` parts)
// ---------------------------------------------------------------------------

struct Composition {
  std::vector<int> parts;
  int total() const;
};

/// C(total+num_parts-1, num_parts-1), saturating at uint64 max.
std::uint64_t composition_count(int num_parts, int total);

/// Visits every composition in ascending lexicographic order.
/// Throws resource_error up front when the count exceeds `cap`.
void for_each_composition(int num_parts, int total, std::uint64_t cap,
                          const std::function<void(const std::vector<int>&)>& visit);

/// Materialized variant for small cases / tests.
std::vector<Composition> enumerate_compositions(int num_parts, int total,
                                                std::uint64_t cap = 1u << 20);

// ---------------------------------------------------------------------------
// Meijer G
// ---------------------------------------------------------------------------

struct MeijerGSpec {
  int m = 0, n = 0, p = 0, q = 0;
  std::vector<double> a;  // size p
  std::vector<double> b;  // size q
  double z = 0.0;         // > 0
};

/// Signals that no vertical contour separates the two pole families;
/// callers fall back to direct quadrature of the originating integral.
class pole_separation_error : public numerical_error {
  using numerical_error::numerical_error;
};

struct SignedLog {
  double log_abs;  // -inf when the value is 0
  int sign;        // -1, 0, +1
  double value() const;
};

/// Numerical Mellin-Barnes evaluation on a vertical contour with
/// trapezoidal summation and adaptive refinement. Restricted to real
/// parameters and z > 0.
SignedLog meijer_g_ln(const MeijerGSpec& spec, double rel_tol = 1e-11);
double meijer_g(const MeijerGSpec& spec, double rel_tol = 1e-11);

/// The list b/k, (b+1)/k, ..., (b+k-1)/k.
std::vector<double> delta_params(int k, double b);

}  // namespace hstrn::sf
