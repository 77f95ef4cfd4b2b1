#pragma once

#include <array>
#include <utility>
#include <vector>

#include "hstrn/random.hpp"
#include "hstrn/series_control.hpp"

namespace hstrn::channels {

/// Loo model parameters (mean and variance of the log-normal LOS term).
struct LooParams {
  double mu_loo;
  double d0;
};

/// Shadowed-Rician link. p_s is the half multipath power (multipath power
/// is 2*p_s), m_s the Nakagami shadowing severity, xi_s the average LOS
/// power, rho_s the average SNR. All linear.
struct SRParams {
  double p_s;
  double m_s;
  double xi_s;
  double rho_s;
};

/// Constants derived from SRParams that every series needs.
struct SRCoefficients {
  double chi_s;      // 1 / (2 p_s rho_s)
  double lambda_s;   // (2 p_s m_s / (2 p_s m_s + xi_s))^m_s * chi_s
  double gamma_s;    // xi_s / (2 p_s (2 p_s m_s + xi_s))
  double los_ratio;  // gamma_s / (rho_s chi_s) = xi_s / (2 p_s m_s + xi_s), < 1

  static SRCoefficients from(const SRParams& p);

  /// Series weights psi(theta) = lambda_s gamma_s^t (m_s)_t / ((t!)^2 rho_s^t)
  /// for t = 0..terms-1, built by ratio recurrence.
  std::vector<double> psi_series(int terms, const SRParams& p) const;
};

/// alpha-mu link: alpha nonlinearity, mu clustering, rho average SNR.
struct AlphaMuParams {
  double alpha;
  double mu;
  double rho;
};

struct AlphaMuCoefficients {
  double z1;    // alpha mu^mu rho^(-alpha mu/2) / (2 Gamma(mu))
  double psi1;  // mu rho^(-alpha/2)
  double z2;    // alpha mu / 2 - 1

  static AlphaMuCoefficients from(const AlphaMuParams& p);
};

/// Solves the Loo relations for (m_s, xi_s). p_s has no Loo counterpart and
/// is supplied by the caller.
std::pair<double, double> loo_to_sr(const LooParams& loo, double p_s);

struct ShadowingCase {
  const char* name;
  double mu_loo;
  double sqrt_d0;
  double p_s;
  double m_s;
  double xi_s;
};

/// The four canonical shadowing presets (heavy ... very light).
const std::array<ShadowingCase, 4>& shadowing_table();

/// Preset row as SRParams; rho_s defaults to 1 (0 dB) until the caller sets it.
SRParams shadowing_preset(int case_index);

enum class SrPdfForm { exact, series };

double sr_pdf(double xi, const SRParams& p, SrPdfForm form, const SeriesControl& ctl);
double sr_ccdf(double xi, const SRParams& p, const SeriesControl& ctl);

/// Draws an instantaneous SNR: rho_s * |z + a e^{i phi}|^2 with z complex
/// Gaussian (per-component variance p_s), a^2 ~ Gamma(m_s, xi_s/m_s),
/// phi uniform.
double sr_sample(const SRParams& p, rng::Stream& stream);

double alphamu_pdf(double xi, const AlphaMuParams& p);
double alphamu_ccdf(double xi, const AlphaMuParams& p);

/// xi = G^{2/alpha} with G ~ Gamma(mu, rho^{alpha/2}/mu); exact for the
/// alpha-mu SNR law.
double alphamu_sample(const AlphaMuParams& p, rng::Stream& stream);

/// Mean SNR of the alpha-mu law (useful as an integration scale).
double alphamu_mean(const AlphaMuParams& p);

/// Mean SNR of the shadowed-Rician law: rho_s (2 p_s + xi_s).
double sr_mean(const SRParams& p);

}  // namespace hstrn::channels
