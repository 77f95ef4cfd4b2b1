#include "hstrn/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hstrn/errors.hpp"
#include "hstrn/special_functions.hpp"

namespace hstrn::orderstats {

namespace {

void check_topology(const Topology& t) {
  if (t.relays < 1 || t.users < 1 || t.eves < 1)
    throw std::domain_error("Topology: relays, users, eves must all be >= 1");
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(sf::ln_gamma(n + 1.0) - sf::ln_gamma(k + 1.0) -
                  sf::ln_gamma(n - k + 1.0));
}

int required_integer(double x, const char* what) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 || r < 1.0)
    throw std::domain_error(std::string("series path requires positive integer ") + what);
  return static_cast<int>(r);
}

}  // namespace

// ---------------------------------------------------------------------------
// numeric path
// ---------------------------------------------------------------------------

double dualhop_cdf(double xi, const LinkPair& link, const SeriesControl& ctl) {
  if (xi <= 0.0) return 0.0;
  const double c = channels::sr_ccdf(xi, link.sr, ctl) *
                   channels::alphamu_ccdf(xi, link.hop2);
  return std::clamp(1.0 - c, 0.0, 1.0);
}

double dualhop_pdf(double xi, const LinkPair& link, const SeriesControl& ctl) {
  if (xi < 0.0) return 0.0;
  return channels::sr_pdf(xi, link.sr, channels::SrPdfForm::series, ctl) *
             channels::alphamu_ccdf(xi, link.hop2) +
         channels::sr_ccdf(xi, link.sr, ctl) * channels::alphamu_pdf(xi, link.hop2);
}

double bestrelay_cdf(double xi, const LinkPair& link, int n_relays,
                     const SeriesControl& ctl) {
  if (n_relays < 1) throw std::domain_error("bestrelay_cdf: n_relays >= 1");
  return std::pow(dualhop_cdf(xi, link, ctl), n_relays);
}

double bestrelay_pdf(double xi, const LinkPair& link, int n_relays,
                     const SeriesControl& ctl) {
  if (n_relays < 1) throw std::domain_error("bestrelay_pdf: n_relays >= 1");
  const double f = dualhop_cdf(xi, link, ctl);
  return n_relays * std::pow(f, n_relays - 1) * dualhop_pdf(xi, link, ctl);
}

double multicast_min_cdf(double xi, const LinkPair& link, const Topology& topo,
                         const SeriesControl& ctl) {
  check_topology(topo);
  const double fdb = bestrelay_cdf(xi, link, topo.relays, ctl);
  return 1.0 - std::pow(1.0 - fdb, topo.users);
}

double eaves_max_cdf(double xi, const LinkPair& link, const Topology& topo,
                     const SeriesControl& ctl) {
  check_topology(topo);
  return std::pow(dualhop_cdf(xi, link, ctl), topo.relays * topo.eves);
}

double multicast_min_pdf(double xi, const LinkPair& link, const Topology& topo,
                         const SeriesControl& ctl, EvalPath path) {
  check_topology(topo);
  if (path == EvalPath::series) {
    const auto tables = SeriesTables::build(link, topo.relays, topo.users, ctl);
    return tables.pdf(xi);
  }
  const double f = dualhop_cdf(xi, link, ctl);
  const int n = topo.relays;
  const double fdb = std::pow(f, n);
  return topo.users * std::pow(1.0 - fdb, topo.users - 1) * n *
         std::pow(f, n - 1) * dualhop_pdf(xi, link, ctl);
}

double eaves_max_pdf(double xi, const LinkPair& link, const Topology& topo,
                     const SeriesControl& ctl, EvalPath path) {
  check_topology(topo);
  if (path == EvalPath::series) {
    const auto tables = SeriesTables::build(link, topo.relays, topo.eves, ctl);
    return tables.pdf(xi);
  }
  const double f = dualhop_cdf(xi, link, ctl);
  const int nq = topo.relays * topo.eves;
  return nq * std::pow(f, nq - 1) * dualhop_pdf(xi, link, ctl);
}

double snr_scale(const LinkPair& link) {
  return std::min(channels::sr_mean(link.sr), channels::alphamu_mean(link.hop2));
}

// ---------------------------------------------------------------------------
// lattice polynomials
// ---------------------------------------------------------------------------

void LatticePoly::add_term(int exp2, double c) {
  if (coef.empty()) {
    min_exp2 = exp2;
    coef.assign(1, c);
    return;
  }
  if (exp2 < min_exp2) {
    coef.insert(coef.begin(), min_exp2 - exp2, 0.0);
    min_exp2 = exp2;
  }
  const std::size_t idx = static_cast<std::size_t>(exp2 - min_exp2);
  if (idx >= coef.size()) coef.resize(idx + 1, 0.0);
  coef[idx] += c;
}

void LatticePoly::scale(double s) {
  for (double& c : coef) c *= s;
}

double LatticePoly::eval(double xi) const {
  if (coef.empty()) return 0.0;
  const double v = std::sqrt(xi);
  double acc = 0.0;
  for (std::size_t i = coef.size(); i-- > 0;) acc = acc * v + coef[i];
  if (min_exp2 == 0) return acc;
  return acc * std::pow(v, min_exp2);
}

LatticePoly LatticePoly::convolve(const LatticePoly& u, const LatticePoly& v) {
  LatticePoly out;
  if (u.coef.empty() || v.coef.empty()) return out;
  out.min_exp2 = u.min_exp2 + v.min_exp2;
  out.coef.assign(u.coef.size() + v.coef.size() - 1, 0.0);
  for (std::size_t i = 0; i < u.coef.size(); ++i) {
    if (u.coef[i] == 0.0) continue;
    for (std::size_t j = 0; j < v.coef.size(); ++j)
      out.coef[i + j] += u.coef[i] * v.coef[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// expanded-series tables
// ---------------------------------------------------------------------------

namespace {

struct DeltaTerm {
  int exp2;     // 2 * exponent
  double coef;  // > 0
};

// Multinomial power (sum_j delta_j)^d accumulated over all weak
// compositions of d across the delta terms. Depth-first over the support
// keeps the per-composition cost O(1).
void accumulate_power(const std::vector<DeltaTerm>& delta, int first, int remaining,
                      double coef_acc, int exp2_acc, LatticePoly& out,
                      std::uint64_t& visited) {
  if (remaining == 0) {
    out.add_term(exp2_acc, coef_acc);
    ++visited;
    return;
  }
  for (int j = first; j < static_cast<int>(delta.size()); ++j) {
    double c = coef_acc;
    int e = exp2_acc;
    for (int t = 1; t <= remaining; ++t) {
      c *= delta[j].coef / t;
      e += delta[j].exp2;
      accumulate_power(delta, j + 1, remaining - t, c, e, out, visited);
    }
  }
}

}  // namespace

SeriesTables SeriesTables::build(const LinkPair& link, int n_relays, int order,
                                 const SeriesControl& ctl) {
  if (n_relays < 1 || order < 1)
    throw std::domain_error("SeriesTables: n_relays and order must be >= 1");
  const int alpha = required_integer(link.hop2.alpha, "alpha");
  const int mu = required_integer(link.hop2.mu, "mu");

  const auto src = channels::SRCoefficients::from(link.sr);
  const auto amc = channels::AlphaMuCoefficients::from(link.hop2);
  const int T = ctl.t1_max;

  SeriesTables tab;
  tab.chi_ = src.chi_s;
  tab.psi1_ = amc.psi1;
  tab.alpha_ = alpha;

  // lam4fact[t] = psi_s(t) chi^{-t-1} t! / Gamma(mu)
  std::vector<double> lam4fact(T + 1);
  {
    double v = src.lambda_s / (src.chi_s * std::tgamma(static_cast<double>(mu)));
    for (int t = 0; t <= T; ++t) {
      lam4fact[t] = v;
      v *= src.los_ratio * (link.sr.m_s + t) / (t + 1.0);
    }
  }
  {
    double mass = 0.0;
    for (int t = 0; t < T; ++t) mass += lam4fact[t];
    tab.tail_estimate_ = lam4fact[T] / (mass + 1e-300);
  }

  // psi_s(t) = lam4fact[t] * Gamma(mu) * chi / (t! / ... ) -- rebuilt directly
  const auto psi = src.psi_series(T, link.sr);

  // density bracket: the expanded single dual-hop pdf
  //   sum_t [ am-side: lam4fact[t]*lam5*chi^k/k! * xi^{z2+k}, k<=t
  //           sr-side: psi[t] * xi^{t + alpha*j/2} * psi1^j/j!, j<mu ]
  const double lam5 = 0.5 * alpha * std::pow(amc.psi1, mu);
  const int z2x2 = alpha * mu - 2;  // 2*z2
  LatticePoly bracket;
  for (int t = 0; t < T; ++t) {
    double w = lam4fact[t] * lam5;
    for (int k = 0; k <= t; ++k) {
      bracket.add_term(z2x2 + 2 * k, w);
      w *= src.chi_s / (k + 1.0);
    }
    double w2 = psi[t];
    for (int j = 0; j < mu; ++j) {
      bracket.add_term(2 * t + alpha * j, w2);
      w2 *= amc.psi1 / (j + 1.0);
    }
  }

  // delta family for the CCDF-product expansion
  std::vector<DeltaTerm> delta;
  delta.reserve(static_cast<std::size_t>(T) * (T + 1) / 2 * mu);
  const double mu_fact = std::tgamma(static_cast<double>(mu));
  for (int t = 0; t < T; ++t) {
    double base = lam4fact[t] * mu_fact;
    for (int k = 0; k <= t; ++k) {
      double w = base;
      for (int j = 0; j < mu; ++j) {
        delta.push_back({2 * k + alpha * j, w});
        w *= amc.psi1 / (j + 1.0);
      }
      base *= src.chi_s / (k + 1.0);
    }
  }

  const int d_max = n_relays * order - 1;
  std::vector<LatticePoly> power_polys(d_max + 1);
  power_polys[0].add_term(0, 1.0);
  const int K = static_cast<int>(delta.size());
  for (int d = 1; d <= d_max; ++d) {
    const std::uint64_t count = sf::composition_count(K, d);
    if (count > ctl.comp_cap)
      throw resource_error("SeriesTables: composition count " + std::to_string(count) +
                           " exceeds cap " + std::to_string(ctl.comp_cap));
    double d_fact = 1.0;
    for (int i = 2; i <= d; ++i) d_fact *= i;
    accumulate_power(delta, 0, d, d_fact, 0, power_polys[d], tab.enumerated_terms_);
  }

  tab.density_.resize(d_max + 1);
  for (int d = 0; d <= d_max; ++d) {
    double w = 0.0;
    for (int th3 = 0; th3 < order; ++th3) {
      const int top = n_relays * (th3 + 1) - 1;
      if (d > top) continue;
      w += binomial(order - 1, th3) * ((th3 % 2) ? -1.0 : 1.0) * binomial(top, d) *
           ((d % 2) ? -1.0 : 1.0);
    }
    w *= static_cast<double>(order) * n_relays;
    tab.density_[d] = LatticePoly::convolve(power_polys[d], bracket);
    tab.density_[d].scale(w);
  }
  return tab;
}

double SeriesTables::pdf(double xi) const {
  if (xi < 0.0) return 0.0;
  const double pow_term = std::pow(xi, 0.5 * alpha_);
  double acc = 0.0;
  for (std::size_t d = 0; d < density_.size(); ++d) {
    const double e = std::exp(-(1.0 + d) * (chi_ * xi + psi1_ * pow_term));
    acc += e * density_[d].eval(xi);
  }
  return acc;
}

}  // namespace hstrn::orderstats
