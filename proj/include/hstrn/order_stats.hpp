#pragma once

#include <cstdint>
#include <vector>

#include "hstrn/channels.hpp"
#include "hstrn/series_control.hpp"

namespace hstrn::orderstats {

struct Topology {
  int relays = 1;  // N
  int users = 1;   // P
  int eves = 1;    // Q
};

enum class LinkRole { user, eavesdropper };

/// One satellite->relay->terminal cascade.
struct LinkPair {
  channels::SRParams sr;
  channels::AlphaMuParams hop2;
  LinkRole role = LinkRole::user;
};

enum class EvalPath { numeric, series };

// -- numeric (power-form) path ----------------------------------------------

/// CDF of a single dual-hop SNR: 1 - CCDF_sr(xi) * CCDF_hop2(xi).
double dualhop_cdf(double xi, const LinkPair& link, const SeriesControl& ctl);

/// Density of the dual-hop SNR: pdf_sr*ccdf_hop2 + ccdf_sr*pdf_hop2.
double dualhop_pdf(double xi, const LinkPair& link, const SeriesControl& ctl);

double bestrelay_cdf(double xi, const LinkPair& link, int n_relays,
                     const SeriesControl& ctl);
double bestrelay_pdf(double xi, const LinkPair& link, int n_relays,
                     const SeriesControl& ctl);

double multicast_min_pdf(double xi, const LinkPair& link, const Topology& topo,
                         const SeriesControl& ctl, EvalPath path = EvalPath::numeric);
double multicast_min_cdf(double xi, const LinkPair& link, const Topology& topo,
                         const SeriesControl& ctl);

double eaves_max_pdf(double xi, const LinkPair& link, const Topology& topo,
                     const SeriesControl& ctl, EvalPath path = EvalPath::numeric);
double eaves_max_cdf(double xi, const LinkPair& link, const Topology& topo,
                     const SeriesControl& ctl);

/// Characteristic SNR scale of the ordered channel; used to condition
/// semi-infinite quadrature.
double snr_scale(const LinkPair& link);

// -- expanded-series path ----------------------------------------------------

/// Polynomial on the half-integer exponent lattice: coefficient c[i]
/// multiplies xi^{(min_exp2+i)/2}.
struct LatticePoly {
  int min_exp2 = 0;
  std::vector<double> coef;

  double eval(double xi) const;
  bool empty() const { return coef.empty(); }
  static LatticePoly convolve(const LatticePoly& u, const LatticePoly& v);
  void add_term(int exp2, double c);
  void scale(double s);
};

/// Fully expanded series representation of an ordered-channel density:
///
///   f(xi) = sum_d exp(-(1+d)(chi xi + psi1 xi^{alpha/2})) * density[d](xi)
///
/// with d running to N*order-1. Built once per parameter set by expanding
/// the CCDF-product power via multinomial enumeration; requires integer
/// alpha and mu. Construction is deterministic.
class SeriesTables {
 public:
  /// order: number of users (min statistics) or eavesdroppers (max statistics).
  static SeriesTables build(const LinkPair& link, int n_relays, int order,
                            const SeriesControl& ctl);

  double pdf(double xi) const;

  int max_index() const { return static_cast<int>(density_.size()) - 1; }
  const LatticePoly& density(int d) const { return density_[d]; }
  double decay_rate(int d) const { return (1.0 + d) * chi_; }
  double power_rate(int d) const { return (1.0 + d) * psi1_; }
  double chi() const { return chi_; }
  double psi1() const { return psi1_; }
  int alpha() const { return alpha_; }
  double tail_estimate() const { return tail_estimate_; }
  std::uint64_t enumerated_terms() const { return enumerated_terms_; }

 private:
  double chi_ = 0.0;
  double psi1_ = 0.0;
  int alpha_ = 2;
  std::vector<LatticePoly> density_;
  double tail_estimate_ = 0.0;
  std::uint64_t enumerated_terms_ = 0;
};

}  // namespace hstrn::orderstats
