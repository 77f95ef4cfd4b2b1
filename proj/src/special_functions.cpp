#include "hstrn/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace hstrn::sf {

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;
}

double ln_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("ln_gamma: x must be > 0");
  return std::lgamma(x);
}

// Asymptotic tails use the Bernoulli expansion after shifting the argument
// past 8; good to ~1e-14 absolute there.
double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: x must be > 0");
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  double series = std::log(x) - 0.5 * inv;
  series -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return acc + series;
}

double trigamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("trigamma: x must be > 0");
  double acc = 0.0;
  while (x < 8.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  double series = inv * (1.0 + 0.5 * inv);
  series += inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0)))));
  return acc + series;
}

namespace {
double tetragamma(double x) {
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 2.0 / (x * x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  double series = -inv2 * (1.0 + inv);
  series -= inv2 * inv2 * (0.5 - inv2 * (1.0 / 6.0 - inv2 * (0.3 - inv2 * (5.0 / 6.0))));
  return acc + series;
}
}  // namespace

double inverse_trigamma(double y) {
  if (!(y > 0.0)) throw std::domain_error("inverse_trigamma: y must be > 0");
  double lo = 1e-3, hi = 1e4;
  if (trigamma(lo) < y || trigamma(hi) > y)
    throw std::domain_error("inverse_trigamma: y outside bracket range");
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (trigamma(mid) > y ? lo : hi) = mid;
  }
  double m = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double f = trigamma(m) - y;
    const double step = f / tetragamma(m);
    m -= step;
    if (m <= lo || m >= hi) m = 0.5 * (lo + hi);
    if (std::abs(step) < 1e-10 * std::max(1.0, std::abs(m))) break;
  }
  return m;
}

double pochhammer(double a, int n) {
  if (n < 0) throw std::domain_error("pochhammer: n must be >= 0");
  double prod = 1.0;
  for (int k = 0; k < n; ++k) prod *= a + k;
  return prod;
}

double kummer_1f1(double a, double b, double x, double tol, int max_terms) {
  if (b <= 0.0 && b == std::floor(b))
    throw std::domain_error("kummer_1f1: b must not be a non-positive integer");
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < max_terms; ++n) {
    term *= (a + n) * x / ((b + n) * (n + 1));
    sum += term;
    if (std::abs(term) <= tol * std::abs(sum) && n > 2) return sum;
  }
  throw numerical_error("kummer_1f1: series did not converge");
}

double upper_incomplete_gamma_integer(int n, double x) {
  if (n < 1) throw std::domain_error("upper_incomplete_gamma_integer: n >= 1");
  if (x < 0.0) throw std::domain_error("upper_incomplete_gamma_integer: x >= 0");
  // Gamma(n,x) = (n-1)! e^-x sum_{k<n} x^k/k!
  double pk = std::exp(-x);  // x^k e^-x / k! at k=0
  double q = pk;
  for (int k = 1; k < n; ++k) {
    pk *= x / k;
    q += pk;
  }
  return q * std::exp(ln_gamma(n));
}

namespace {

// Regularized lower P(a,x) by series, valid/efficient for x < a+1.
double gamma_p_series(double a, double x) {
  if (x <= 0.0) return 0.0;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper Q(a,x) by Lentz continued fraction, for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("regularized_gamma_q: a must be > 0");
  if (x < 0.0) throw std::domain_error("regularized_gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double log_regularized_gamma_q(double a, double x) {
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::log1p(-gamma_p_series(a, x));
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::log(h) - x + a * std::log(x) - std::lgamma(a);
}

double upper_incomplete_gamma(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("upper_incomplete_gamma: a must be > 0");
  if (x < 0.0) throw std::domain_error("upper_incomplete_gamma: x must be >= 0");
  const double r = std::round(a);
  if (std::abs(a - r) < 1e-12 && r >= 1.0 && r <= 1e6)
    return upper_incomplete_gamma_integer(static_cast<int>(r), x);
  return regularized_gamma_q(a, x) * std::exp(std::lgamma(a));
}

// ---------------------------------------------------------------------------
// Compositions
// ---------------------------------------------------------------------------

int Composition::total() const {
  return std::accumulate(parts.begin(), parts.end(), 0);
}

std::uint64_t composition_count(int num_parts, int total) {
  if (num_parts < 1) throw std::domain_error("composition_count: num_parts >= 1");
  if (total < 0) throw std::domain_error("composition_count: total >= 0");
  // C(total + num_parts - 1, num_parts - 1), saturating
  const std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  long double acc = 1.0L;
  std::uint64_t n = static_cast<std::uint64_t>(total) + num_parts - 1;
  std::uint64_t k = std::min<std::uint64_t>(num_parts - 1, total);
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (acc > static_cast<long double>(kMax) / 2) return kMax;
  }
  return static_cast<std::uint64_t>(acc + 0.5L);
}

void for_each_composition(int num_parts, int total, std::uint64_t cap,
                          const std::function<void(const std::vector<int>&)>& visit) {
  const std::uint64_t count = composition_count(num_parts, total);
  if (count > cap)
    throw resource_error("for_each_composition: count " + std::to_string(count) +
                         " exceeds cap " + std::to_string(cap));
  std::vector<int> parts(num_parts, 0);
  parts[num_parts - 1] = total;
  for (;;) {
    visit(parts);
    // lexicographic successor: bump the rightmost position that has
    // remaining mass to its right, dump the remainder at the end
    int j = num_parts - 2;
    int suffix = (j >= 0) ? parts[num_parts - 1] : 0;
    while (j >= 0 && suffix == 0) {
      --j;
      if (j >= 0) suffix += parts[j + 1];
    }
    if (j < 0) break;
    parts[j] += 1;
    int rem = suffix - 1;
    for (int i = j + 1; i < num_parts; ++i) parts[i] = 0;
    parts[num_parts - 1] = rem;
  }
}

std::vector<Composition> enumerate_compositions(int num_parts, int total,
                                                std::uint64_t cap) {
  std::vector<Composition> out;
  for_each_composition(num_parts, total, cap,
                       [&](const std::vector<int>& parts) { out.push_back({parts}); });
  return out;
}

// ---------------------------------------------------------------------------
// Meijer G via Mellin-Barnes contour
// ---------------------------------------------------------------------------

namespace {

using cplx = std::complex<double>;

// Lanczos g=7, n=9 (Godfrey coefficients).
const double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

cplx log_sin_pi(cplx z);

cplx clog_gamma(cplx z) {
  if (z.real() < 0.5) {
    // reflection; any 2*pi*i branch offsets cancel once sums are exponentiated
    return std::log(cplx(kPi)) - log_sin_pi(z) - clog_gamma(1.0 - z);
  }
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + 7.5;
  return 0.918938533204672741780329736406 + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx log_sin_pi(cplx z) {
  if (std::abs(z.imag()) < 12.0) return std::log(std::sin(kPi * z));
  if (z.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
  // Im z large and positive: sin(pi z) = e^{-i pi z}(e^{2 i pi z}-1)/(2i)
  const cplx i_unit(0.0, 1.0);
  const cplx small = std::exp(2.0 * kPi * i_unit * z);  // magnitude e^{-2 pi Im z}
  return -i_unit * kPi * z + i_unit * kPi - std::log(cplx(0.0, 2.0)) +
         std::log(1.0 - small);
}

struct ContourSetup {
  double c0;
  double decay;  // exponential decay rate of |integrand| in |t|
};

ContourSetup contour_for(const MeijerGSpec& s) {
  double left = -std::numeric_limits<double>::infinity();
  double right = std::numeric_limits<double>::infinity();
  for (int j = 0; j < s.n; ++j) left = std::max(left, s.a[j] - 1.0);
  for (int j = 0; j < s.m; ++j) right = std::min(right, s.b[j]);
  if (!(left < right))
    throw pole_separation_error("meijer_g: no vertical contour separates the pole families");
  const double delta = s.m + s.n - 0.5 * (s.p + s.q);
  if (!(delta > 0.0))
    throw numerical_error("meijer_g: contour integral does not decay (delta <= 0)");
  double c0;
  if (std::isinf(left))
    c0 = std::isinf(right) ? 0.0 : right - 0.5;
  else if (std::isinf(right))
    c0 = left + 0.5;
  else
    c0 = 0.5 * (left + right);
  return {c0, delta * kPi};
}

}  // namespace

std::vector<double> delta_params(int k, double b) {
  std::vector<double> out(k);
  for (int i = 0; i < k; ++i) out[i] = (b + i) / k;
  return out;
}

double SignedLog::value() const { return sign * std::exp(log_abs); }

SignedLog meijer_g_ln(const MeijerGSpec& spec, double rel_tol) {
  if (spec.m < 0 || spec.n < 0 || spec.m > spec.q || spec.n > spec.p)
    throw std::domain_error("meijer_g: invalid orders");
  if (static_cast<int>(spec.a.size()) != spec.p || static_cast<int>(spec.b.size()) != spec.q)
    throw std::domain_error("meijer_g: parameter list sizes must match p, q");
  if (!(spec.z > 0.0)) throw std::domain_error("meijer_g: z must be > 0");

  const ContourSetup contour = contour_for(spec);
  const double log_z = std::log(spec.z);

  auto log_integrand = [&](double t) -> cplx {
    const cplx s(contour.c0, t);
    cplx acc = s * log_z;
    for (int j = 0; j < spec.m; ++j) acc += clog_gamma(spec.b[j] - s);
    for (int j = 0; j < spec.n; ++j) acc += clog_gamma(1.0 - spec.a[j] + s);
    for (int j = spec.m; j < spec.q; ++j) acc -= clog_gamma(1.0 - spec.b[j] + s);
    for (int j = spec.n; j < spec.p; ++j) acc -= clog_gamma(spec.a[j] - s);
    return acc;
  };

  // factor out the t=0 magnitude so huge-parameter cases stay in range
  const cplx log_f0 = log_integrand(0.0);
  const double scale = log_f0.real();

  auto trap = [&](double h) -> double {
    double sum = 0.5 * std::exp(log_integrand(0.0) - scale).real();
    double tail_mag = std::abs(sum);
    const double t_max = std::max(60.0, 220.0 / contour.decay);
    for (int k = 1;; ++k) {
      const double t = k * h;
      const cplx term = std::exp(log_integrand(t) - scale);
      sum += term.real();
      tail_mag = std::abs(term);
      if (t > 12.0 && tail_mag < 1e-18 * (std::abs(sum) + 1e-30)) break;
      if (t > t_max) break;
    }
    return 2.0 * sum * h / (2.0 * kPi);
  };

  double h = 0.5;
  double prev = trap(h);
  double cur = prev;
  for (int iter = 0; iter < 10; ++iter) {
    h *= 0.5;
    cur = trap(h);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + 1e-300) break;
    prev = cur;
  }
  if (cur == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
  return {scale + std::log(std::abs(cur)), cur > 0.0 ? 1 : -1};
}

double meijer_g(const MeijerGSpec& spec, double rel_tol) {
  return meijer_g_ln(spec, rel_tol).value();
}

}  // namespace hstrn::sf
