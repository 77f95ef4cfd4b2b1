#include "hstrn/channels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hstrn/errors.hpp"
#include "hstrn/special_functions.hpp"

namespace hstrn::channels {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_sr(const SRParams& p) {
  if (!(p.p_s > 0.0) || !(p.m_s > 0.0) || !(p.xi_s >= 0.0) || !(p.rho_s > 0.0))
    throw std::domain_error("SRParams: need p_s>0, m_s>0, xi_s>=0, rho_s>0");
}

void check_am(const AlphaMuParams& p) {
  if (!(p.alpha > 0.0) || !(p.mu > 0.0) || !(p.rho > 0.0))
    throw std::domain_error("AlphaMuParams: need alpha>0, mu>0, rho>0");
}
}  // namespace

SRCoefficients SRCoefficients::from(const SRParams& p) {
  check_sr(p);
  SRCoefficients c;
  const double mp2 = 2.0 * p.p_s;
  c.chi_s = 1.0 / (mp2 * p.rho_s);
  c.lambda_s = std::pow(mp2 * p.m_s / (mp2 * p.m_s + p.xi_s), p.m_s) * c.chi_s;
  c.gamma_s = p.xi_s / (mp2 * (mp2 * p.m_s + p.xi_s));
  c.los_ratio = p.xi_s / (mp2 * p.m_s + p.xi_s);
  return c;
}

std::vector<double> SRCoefficients::psi_series(int terms, const SRParams& p) const {
  std::vector<double> psi(terms);
  double v = lambda_s;
  const double x = gamma_s / p.rho_s;
  for (int t = 0; t < terms; ++t) {
    psi[t] = v;
    const double tt = t + 1.0;
    v *= x * (p.m_s + t) / (tt * tt);
  }
  return psi;
}

AlphaMuCoefficients AlphaMuCoefficients::from(const AlphaMuParams& p) {
  check_am(p);
  AlphaMuCoefficients c;
  c.psi1 = p.mu * std::pow(p.rho, -0.5 * p.alpha);
  c.z2 = 0.5 * p.alpha * p.mu - 1.0;
  c.z1 = 0.5 * p.alpha *
         std::exp(p.mu * std::log(p.mu) - sf::ln_gamma(p.mu) -
                  0.5 * p.alpha * p.mu * std::log(p.rho));
  return c;
}

std::pair<double, double> loo_to_sr(const LooParams& loo, double p_s) {
  if (!(loo.d0 > 0.0)) throw std::domain_error("loo_to_sr: d0 must be > 0");
  if (!(p_s > 0.0)) throw std::domain_error("loo_to_sr: p_s must be > 0");
  const double m_s = sf::inverse_trigamma(4.0 * loo.d0);
  const double xi_s = m_s * std::exp(2.0 * loo.mu_loo - sf::digamma(m_s));
  return {m_s, xi_s};
}

const std::array<ShadowingCase, 4>& shadowing_table() {
  static const std::array<ShadowingCase, 4> table = {{
      {"heavy", -3.914, 0.806, 0.063, 0.739, 0.0009},
      {"average", -0.690, 0.230, 0.251, 5.21, 0.278},
      {"light", -0.115, 0.161, 0.126, 10.1, 0.835},
      {"very-light", 0.115, 0.115, 0.158, 19.4, 1.29},
  }};
  return table;
}

SRParams shadowing_preset(int case_index) {
  if (case_index < 1 || case_index > 4)
    throw std::domain_error("shadowing_preset: case must be 1..4");
  const ShadowingCase& row = shadowing_table()[case_index - 1];
  return {row.p_s, row.m_s, row.xi_s, 1.0};
}

double sr_pdf(double xi, const SRParams& p, SrPdfForm form, const SeriesControl& ctl) {
  if (xi < 0.0) return 0.0;
  const SRCoefficients c = SRCoefficients::from(p);
  if (form == SrPdfForm::exact) {
    return c.lambda_s * std::exp(-c.chi_s * xi) *
           sf::kummer_1f1(p.m_s, 1.0, c.gamma_s / p.rho_s * xi);
  }
  // truncated sum psi_t xi^t e^{-chi xi}, positive terms; extend past t1_max
  // while the tail estimate is above tol
  const double ex = std::exp(-c.chi_s * xi);
  const double x = c.gamma_s / p.rho_s * xi;
  double term = c.lambda_s;
  double sum = term;
  double tail = term;
  for (int t = 0; t < ctl.t1_hard_max; ++t) {
    term *= x * (p.m_s + t) / ((t + 1.0) * (t + 1.0));
    sum += term;
    const double ratio = (t + 1 < ctl.t1_max) ? 1.0 : term / (sum + 1e-300);
    tail = term;
    if (t + 1 >= ctl.t1_max && ratio < ctl.tol) return sum * ex;
  }
  if (tail > ctl.tol * sum)
    throw truncation_error("sr_pdf: series tail above tolerance at cap", tail / sum);
  return sum * ex;
}

double sr_ccdf(double xi, const SRParams& p, const SeriesControl& ctl) {
  if (xi <= 0.0) return 1.0;
  const SRCoefficients c = SRCoefficients::from(p);
  const double x = c.chi_s * xi;
  // coef_t = lambda_s los_ratio^t (m_s)_t / (t! chi_s); term = coef_t * Q_{t+1}(x)
  double coef = c.lambda_s / c.chi_s;
  double pk = std::exp(-x);  // x^k e^-x / k!
  double q = pk;             // regularized Q_{t+1}(x)
  double sum = 0.0;
  double last = 0.0;
  for (int t = 0;; ++t) {
    last = coef * q;
    sum += last;
    if (t + 1 >= ctl.t1_max && last < ctl.tol * (sum + 1e-300)) break;
    if (t + 1 >= ctl.t1_hard_max) {
      if (last > ctl.tol * sum)
        throw truncation_error("sr_ccdf: series tail above tolerance at cap", last / sum);
      break;
    }
    coef *= c.los_ratio * (p.m_s + t) / (t + 1.0);
    pk *= x / (t + 1.0);
    q += pk;
  }
  return std::min(sum, 1.0);
}

double sr_sample(const SRParams& p, rng::Stream& stream) {
  const double sigma = std::sqrt(p.p_s);
  const double re = sigma * stream.next_normal();
  const double im = sigma * stream.next_normal();
  const double a = std::sqrt(stream.next_gamma(p.m_s, p.xi_s / p.m_s));
  const double phi = kTwoPi * stream.next_double();
  const double x = re + a * std::cos(phi);
  const double y = im + a * std::sin(phi);
  return p.rho_s * (x * x + y * y);
}

double alphamu_pdf(double xi, const AlphaMuParams& p) {
  if (xi < 0.0) return 0.0;
  const AlphaMuCoefficients c = AlphaMuCoefficients::from(p);
  if (xi == 0.0) {
    if (c.z2 > 0.0) return 0.0;
    if (c.z2 == 0.0) return c.z1;
    return std::numeric_limits<double>::infinity();
  }
  const double lg = std::log(c.z1) + c.z2 * std::log(xi) - c.psi1 * std::pow(xi, 0.5 * p.alpha);
  return std::exp(lg);
}

double alphamu_ccdf(double xi, const AlphaMuParams& p) {
  if (xi <= 0.0) return 1.0;
  const AlphaMuCoefficients c = AlphaMuCoefficients::from(p);
  return sf::regularized_gamma_q(p.mu, c.psi1 * std::pow(xi, 0.5 * p.alpha));
}

double alphamu_sample(const AlphaMuParams& p, rng::Stream& stream) {
  check_am(p);
  const double g = stream.next_gamma(p.mu, std::pow(p.rho, 0.5 * p.alpha) / p.mu);
  return std::pow(g, 2.0 / p.alpha);
}

double alphamu_mean(const AlphaMuParams& p) {
  check_am(p);
  return std::exp(sf::ln_gamma(p.mu + 2.0 / p.alpha) - sf::ln_gamma(p.mu) -
                  2.0 / p.alpha * std::log(p.mu)) *
         p.rho;
}

double sr_mean(const SRParams& p) {
  check_sr(p);
  return p.rho_s * (2.0 * p.p_s + p.xi_s);
}

}  // namespace hstrn::channels
