#pragma once

#include <optional>

#include "hstrn/order_stats.hpp"
#include "hstrn/series_control.hpp"

namespace hstrn::metrics {

enum class Method { closed_form, quadrature, monte_carlo };

struct MetricResult {
  double value = 0.0;
  Method method = Method::quadrature;
  long terms_used = 0;
  double tail_estimate = 0.0;
  std::optional<double> std_error;
  double raw_value = 0.0;  // before the [0,1] clamp (SOPM/PNSMC)
};

struct SecrecyConfig {
  orderstats::LinkPair user_link;
  orderstats::LinkPair eve_link;
  orderstats::Topology topo;
  double phi_c = 0.5;  // target secrecy rate, bits/s/Hz
};

/// Secrecy outage probability of the multicast scheme.
/// `path` must be closed_form or quadrature; Monte-Carlo estimates come
/// from mc::simulate.
MetricResult sopm(const SecrecyConfig& cfg, const SeriesControl& ctl, Method path);

/// Ergodic secrecy multicast capacity (raw difference, may be negative).
MetricResult esmc(const SecrecyConfig& cfg, const SeriesControl& ctl, Method path);

/// Probability of non-zero secrecy capacity: 1 - sopm at phi_c = 0.
MetricResult pnsmc(const SecrecyConfig& cfg, const SeriesControl& ctl, Method path);

/// Clamp-at-zero view of an ESMC value.
double esmc_nonnegative(const MetricResult& r);

/// Direct double-integral form of the non-zero-capacity probability,
/// for cross-checking pnsmc.
double pnsmc_direct_quadrature(const SecrecyConfig& cfg, const SeriesControl& ctl);

// -- verification hooks -------------------------------------------------------
// log of integral_0^inf x^r e^{-A x} e^{-B x^{alpha/2}} dx

double elementary_exp_integral_ln(double r, double A, double B, int alpha);
double elementary_exp_integral_meijer_ln(double r, double A, double B, int alpha);

// log of integral_0^inf ln(1+x) x^c e^{-B x^{alpha/2}} dx

double log_capacity_integral_ln(double c, double B, int alpha);
double log_capacity_integral_meijer_ln(double c, double B, int alpha);

}  // namespace hstrn::metrics
