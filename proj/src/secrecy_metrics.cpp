#include "hstrn/secrecy_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "hstrn/errors.hpp"
#include "hstrn/quadrature.hpp"
#include "hstrn/special_functions.hpp"

namespace hstrn::metrics {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530941723212145818;
constexpr double kOuterRel = 1e-8;
constexpr double kInnerRel = 1e-9;
constexpr double kBoundsTol = 1e-6;

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Sign-aware accumulator over log-magnitude terms; rescales to the largest
// magnitude seen so far.
struct SignedAccum {
  double max_log = kNegInf;
  double scaled = 0.0;

  void add(double log_abs, double sign) {
    if (sign == 0.0 || log_abs == kNegInf) return;
    if (log_abs > max_log) {
      scaled = scaled * std::exp(max_log - log_abs) + sign;
      max_log = log_abs;
    } else {
      scaled += sign * std::exp(log_abs - max_log);
    }
  }
  bool zero() const { return max_log == kNegInf || scaled == 0.0; }
  double value() const { return zero() ? 0.0 : scaled * std::exp(max_log); }
  double log_abs() const { return zero() ? kNegInf : max_log + std::log(std::abs(scaled)); }
  double sign() const { return scaled > 0.0 ? 1.0 : (scaled < 0.0 ? -1.0 : 0.0); }
};

double ln_binomial(int n, int k) {
  return sf::ln_gamma(n + 1.0) - sf::ln_gamma(k + 1.0) - sf::ln_gamma(n - k + 1.0);
}

// ---------------------------------------------------------------------------
// quadrature path
// ---------------------------------------------------------------------------

MetricResult sopm_quadrature(const SecrecyConfig& cfg, const SeriesControl& ctl) {
  const double phi1 = std::exp2(cfg.phi_c) - 1.0;
  const double phi2 = std::exp2(cfg.phi_c);
  const double user_scale = orderstats::snr_scale(cfg.user_link);
  const double eve_scale = orderstats::snr_scale(cfg.eve_link);

  auto inner = [&](double w) -> double {
    auto f = [&](double x) {
      return orderstats::multicast_min_pdf(x, cfg.user_link, cfg.topo, ctl);
    };
    const auto q = quadrature::integrate_semi_infinite(f, w, kInnerRel, 1e-13, user_scale);
    return q.value;
  };
  long evals = 0;
  auto outer_f = [&](double y) -> double {
    const double fmax = orderstats::eaves_max_pdf(y, cfg.eve_link, cfg.topo, ctl);
    ++evals;
    if (fmax == 0.0) return 0.0;
    return fmax * inner(phi1 + phi2 * y);
  };
  const auto q = quadrature::integrate_semi_infinite(outer_f, 0.0, kOuterRel, 1e-14, eve_scale);
  const double raw = 1.0 - q.value;
  if (raw < -kBoundsTol || raw > 1.0 + kBoundsTol)
    throw numerical_error("sopm: quadrature value outside [0,1] tolerance band");
  MetricResult r;
  r.value = std::clamp(raw, 0.0, 1.0);
  r.raw_value = raw;
  r.method = Method::quadrature;
  r.terms_used = evals;
  r.tail_estimate = q.error_estimate;
  return r;
}

MetricResult esmc_quadrature(const SecrecyConfig& cfg, const SeriesControl& ctl) {
  auto capacity_term = [&](const orderstats::LinkPair& link, bool is_user) {
    auto f = [&](double x) {
      const double pdf = is_user
          ? orderstats::multicast_min_pdf(x, link, cfg.topo, ctl)
          : orderstats::eaves_max_pdf(x, link, cfg.topo, ctl);
      return pdf == 0.0 ? 0.0 : std::log2(1.0 + x) * pdf;
    };
    return quadrature::integrate_semi_infinite(f, 0.0, kOuterRel, 1e-14,
                                               orderstats::snr_scale(link));
  };
  const auto u1 = capacity_term(cfg.user_link, true);
  const auto u2 = capacity_term(cfg.eve_link, false);
  MetricResult r;
  r.value = u1.value - u2.value;
  r.raw_value = r.value;
  r.method = Method::quadrature;
  r.terms_used = u1.evaluations + u2.evaluations;
  r.tail_estimate = u1.error_estimate + u2.error_estimate;
  return r;
}

// ---------------------------------------------------------------------------
// closed-form path
// ---------------------------------------------------------------------------

// Eve-side coefficient view: density polys of the max-order-statistics
// series, indexed by the power-sum index d (decay (1+d)chi etc).
struct SideTables {
  orderstats::SeriesTables tables;
  int alpha;
};

SideTables build_side(const orderstats::LinkPair& link, int n_relays, int order,
                      const SeriesControl& ctl) {
  SideTables s{orderstats::SeriesTables::build(link, n_relays, order, ctl), 0};
  s.alpha = s.tables.alpha();
  return s;
}

// Cache of log integral_0^inf y^r e^{-A y - B y^{alpha/2}} dy keyed by the
// doubled exponent and the (d_user, d_eve) pair that fixes (A, B).
struct ExpIntegralCache {
  std::unordered_map<std::uint64_t, double> map;

  double get(int r2, int du, int de, double A, double B, int alpha) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(r2)) << 20) |
        (static_cast<std::uint64_t>(du) << 10) | static_cast<std::uint64_t>(de);
    auto it = map.find(key);
    if (it != map.end()) return it->second;
    const double v = quadrature::log_power_exp_integral(0.5 * r2, A, B, alpha,
                                                        nullptr, 1e-10);
    map.emplace(key, v);
    return v;
  }
};

// Stop index for an alternating layer-magnitude sequence: sum while the
// relative layer drops below tol; on persistent growth stop at the smallest
// layer (asymptotic truncation). Returns {n_terms, relative_tail}.
struct SeriesStop {
  int n_terms;
  double tail;
};

SeriesStop plan_series_stop(const std::vector<double>& layer_log, double tol) {
  double sum_log = kNegInf;
  double best_rel = std::numeric_limits<double>::infinity();
  int best_n = 0;
  int grow = 0;
  for (std::size_t k = 0; k < layer_log.size(); ++k) {
    sum_log = logaddexp(sum_log, layer_log[k]);
    const double rel = std::exp(layer_log[k] - sum_log);
    if (rel < best_rel) {
      best_rel = rel;
      best_n = static_cast<int>(k) + 1;
    }
    if (rel < tol) return {static_cast<int>(k) + 1, rel};
    if (k > 0 && layer_log[k] > layer_log[k - 1]) {
      if (++grow >= 3) break;
    } else {
      grow = 0;
    }
  }
  return {best_n, best_rel};
}

struct UserExpansion {
  // B[d][k]: coefficient of e^{-lam14(d) phi2 y} y^k, signed-log form
  std::vector<std::vector<SignedAccum>> b;
  // terms whose tail exponent is not an integer; handled by quadrature
  struct NonIntTerm {
    double r5;
    double log_coef;
    double sign;
  };
  std::vector<std::vector<NonIntTerm>> nonint;  // per d
  double tail = 0.0;
  long terms = 0;
};

UserExpansion expand_user_side(const SideTables& user, double phi1, double phi2,
                               const SeriesControl& ctl) {
  UserExpansion out;
  const int d_max = user.tables.max_index();
  out.b.resize(d_max + 1);
  out.nonint.resize(d_max + 1);
  const int alpha = user.alpha;

  for (int d = 0; d <= d_max; ++d) {
    const double lam14 = user.tables.decay_rate(d);
    const double lam15 = user.tables.power_rate(d);
    const double log_lam14 = std::log(lam14);
    const double log_lam15 = std::log(lam15);
    const auto& poly = user.tables.density(d);
    for (std::size_t i = 0; i < poly.coef.size(); ++i) {
      const double dcoef = poly.coef[i];
      if (dcoef == 0.0) continue;
      const int rho2 = poly.min_exp2 + static_cast<int>(i);
      const double log_d = std::log(std::abs(dcoef));
      const double sign_d = dcoef > 0.0 ? 1.0 : -1.0;

      // layer magnitudes of the exponential-series index
      std::vector<double> layer(ctl.exp_series_cap);
      for (int t14 = 0; t14 < ctl.exp_series_cap; ++t14) {
        const double r5 = 0.5 * (rho2 + alpha * t14);
        layer[t14] = t14 * log_lam15 - sf::ln_gamma(t14 + 1.0) +
                     sf::ln_gamma(r5 + 1.0) - (r5 + 1.0) * log_lam14;
      }
      const SeriesStop stop = plan_series_stop(layer, 1e-12);
      out.tail = std::max(out.tail, stop.tail);
      out.terms = std::max<long>(out.terms, stop.n_terms);

      for (int t14 = 0; t14 < stop.n_terms; ++t14) {
        const int r5x2 = rho2 + alpha * t14;
        const double r5 = 0.5 * r5x2;
        const double ct_log = log_d + t14 * log_lam15 - sf::ln_gamma(t14 + 1.0);
        const double ct_sign = (t14 % 2 ? -1.0 : 1.0) * sign_d;
        if (r5x2 % 2 != 0) {
          out.nonint[d].push_back({r5, ct_log, ct_sign});
          continue;
        }
        const int n5 = r5x2 / 2;
        const double base =
            ct_log + sf::ln_gamma(n5 + 1.0) - lam14 * phi1 - (n5 + 1.0) * log_lam14;
        auto& row = out.b[d];
        if (row.size() < static_cast<std::size_t>(n5 + 1)) row.resize(n5 + 1);
        if (phi1 == 0.0) {
          // only theta17 == theta15 survives
          for (int t15 = 0; t15 <= n5; ++t15) {
            const double lg = base + t15 * (log_lam14 + std::log(phi2)) -
                              sf::ln_gamma(t15 + 1.0);
            row[t15].add(lg, ct_sign);
          }
          continue;
        }
        const double log_phi1 = std::log(phi1);
        const double log_phi2 = std::log(phi2);
        for (int t15 = 0; t15 <= n5; ++t15) {
          const double t15_log = base + t15 * log_lam14 - sf::ln_gamma(t15 + 1.0);
          for (int t17 = 0; t17 <= t15; ++t17) {
            const double lg = t15_log + ln_binomial(t15, t17) +
                              (t15 - t17) * log_phi1 + t17 * log_phi2;
            row[t17].add(lg, ct_sign);
          }
        }
      }
    }
  }
  return out;
}

MetricResult sopm_closed(const SecrecyConfig& cfg, const SeriesControl& ctl) {
  const double phi1 = std::exp2(cfg.phi_c) - 1.0;
  const double phi2 = std::exp2(cfg.phi_c);
  const SideTables user = build_side(cfg.user_link, cfg.topo.relays, cfg.topo.users, ctl);
  const SideTables eve = build_side(cfg.eve_link, cfg.topo.relays, cfg.topo.eves, ctl);

  UserExpansion ux = expand_user_side(user, phi1, phi2, ctl);
  if (ux.tail > ctl.metric_tail_tol)
    throw truncation_error("sopm closed form: exponential-series tail above tolerance",
                           ux.tail);

  ExpIntegralCache cache;
  SignedAccum total;
  const int de_max = eve.tables.max_index();

  for (int du = 0; du < static_cast<int>(ux.b.size()); ++du) {
    const double lam14 = user.tables.decay_rate(du);
    for (int k = 0; k < static_cast<int>(ux.b[du].size()); ++k) {
      const SignedAccum& bc = ux.b[du][k];
      if (bc.zero()) continue;
      const double b_log = bc.log_abs();
      const double b_sign = bc.sign();
      for (int de = 0; de <= de_max; ++de) {
        const double r9 = lam14 * phi2 + eve.tables.decay_rate(de);
        const double h14 = eve.tables.power_rate(de);
        const auto& poly = eve.tables.density(de);
        for (std::size_t j = 0; j < poly.coef.size(); ++j) {
          const double ccoef = poly.coef[j];
          if (ccoef == 0.0) continue;
          const int m2 = poly.min_exp2 + static_cast<int>(j);
          const double log_i = cache.get(2 * k + m2, du, de, r9, h14, eve.alpha);
          total.add(b_log + std::log(std::abs(ccoef)) + log_i,
                    b_sign * (ccoef > 0.0 ? 1.0 : -1.0));
        }
      }
    }
  }

  // terms with non-integer tail exponent: integrate against the eve side
  for (int du = 0; du < static_cast<int>(ux.nonint.size()); ++du) {
    if (ux.nonint[du].empty()) continue;
    const double lam14 = user.tables.decay_rate(du);
    const double log_lam14 = std::log(lam14);
    const auto& terms = ux.nonint[du];
    for (int de = 0; de <= de_max; ++de) {
      const double h13 = eve.tables.decay_rate(de);
      const double h14 = eve.tables.power_rate(de);
      const auto& poly = eve.tables.density(de);
      auto integrand = [&](double y) -> double {
        const double w = phi1 + phi2 * y;
        double user_part = 0.0;
        for (const auto& t : terms) {
          const double a = t.r5 + 1.0;
          const double lq = sf::log_regularized_gamma_q(a, lam14 * w);
          user_part += t.sign * std::exp(t.log_coef + sf::ln_gamma(a) + lq - a * log_lam14);
        }
        if (user_part == 0.0) return 0.0;
        const double eve_part =
            poly.eval(y) * std::exp(-h13 * y - h14 * std::pow(y, 0.5 * eve.alpha));
        return user_part * eve_part;
      };
      const auto q = quadrature::integrate_semi_infinite(
          integrand, 0.0, 1e-9, 1e-15, orderstats::snr_scale(cfg.eve_link));
      if (q.value != 0.0)
        total.add(std::log(std::abs(q.value)), q.value > 0.0 ? 1.0 : -1.0);
    }
  }

  const double raw = 1.0 - total.value();
  if (raw < -kBoundsTol || raw > 1.0 + kBoundsTol)
    throw numerical_error("sopm closed form: value outside [0,1] tolerance band");
  MetricResult r;
  r.value = std::clamp(raw, 0.0, 1.0);
  r.raw_value = raw;
  r.method = Method::closed_form;
  r.terms_used = ux.terms;
  r.tail_estimate = std::max(ux.tail, std::max(user.tables.tail_estimate(),
                                               eve.tables.tail_estimate()));
  return r;
}

// One capacity leg of the closed form: sum over the density poly and the
// plain-exponential series index of J integrals.
struct CapacityLeg {
  double value;
  double tail;
  long terms;
};

CapacityLeg capacity_leg_closed(const SideTables& side, const SeriesControl& ctl) {
  const int d_max = side.tables.max_index();
  std::unordered_map<std::uint64_t, double> j_cache;
  auto log_j = [&](int c2, int d, double b) -> double {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c2)) << 10) |
        static_cast<std::uint64_t>(d);
    auto it = j_cache.find(key);
    if (it != j_cache.end()) return it->second;
    const double v = log_capacity_integral_ln(0.5 * c2, b, side.alpha);
    j_cache.emplace(key, v);
    return v;
  };

  SignedAccum acc;
  double tail = 0.0;
  long terms = 0;
  for (int d = 0; d <= d_max; ++d) {
    const double lam14 = side.tables.decay_rate(d);
    const double lam15 = side.tables.power_rate(d);
    const double log_lam14 = std::log(lam14);
    const auto& poly = side.tables.density(d);
    for (std::size_t i = 0; i < poly.coef.size(); ++i) {
      const double dcoef = poly.coef[i];
      if (dcoef == 0.0) continue;
      const int rho2 = poly.min_exp2 + static_cast<int>(i);
      std::vector<double> layer(ctl.exp_series_cap);
      for (int s = 0; s < ctl.exp_series_cap; ++s)
        layer[s] = s * log_lam14 - sf::ln_gamma(s + 1.0) + log_j(rho2 + 2 * s, d, lam15);
      const SeriesStop stop = plan_series_stop(layer, 1e-12);
      tail = std::max(tail, stop.tail);
      terms = std::max<long>(terms, stop.n_terms);
      const double log_d = std::log(std::abs(dcoef));
      const double sign_d = dcoef > 0.0 ? 1.0 : -1.0;
      for (int s = 0; s < stop.n_terms; ++s)
        acc.add(log_d + layer[s] - std::log(kLn2), (s % 2 ? -1.0 : 1.0) * sign_d);
    }
  }
  return {acc.value(), tail, terms};
}

MetricResult esmc_closed(const SecrecyConfig& cfg, const SeriesControl& ctl) {
  const SideTables user = build_side(cfg.user_link, cfg.topo.relays, cfg.topo.users, ctl);
  const SideTables eve = build_side(cfg.eve_link, cfg.topo.relays, cfg.topo.eves, ctl);
  const CapacityLeg leg1 = capacity_leg_closed(user, ctl);
  const CapacityLeg leg2 = capacity_leg_closed(eve, ctl);
  const double tail = std::max(leg1.tail, leg2.tail);
  if (tail > ctl.metric_tail_tol)
    throw truncation_error("esmc closed form: exponential-series tail above tolerance",
                           tail);
  MetricResult r;
  r.value = leg1.value - leg2.value;
  r.raw_value = r.value;
  r.method = Method::closed_form;
  r.terms_used = std::max(leg1.terms, leg2.terms);
  r.tail_estimate = tail;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

MetricResult sopm(const SecrecyConfig& cfg, const SeriesControl& ctl, Method path) {
  if (cfg.phi_c < 0.0) throw std::domain_error("sopm: phi_c must be >= 0");
  switch (path) {
    case Method::quadrature:
      return sopm_quadrature(cfg, ctl);
    case Method::closed_form:
      return sopm_closed(cfg, ctl);
    default:
      throw std::invalid_argument("sopm: Monte-Carlo estimates come from mc::simulate");
  }
}

MetricResult esmc(const SecrecyConfig& cfg, const SeriesControl& ctl, Method path) {
  switch (path) {
    case Method::quadrature:
      return esmc_quadrature(cfg, ctl);
    case Method::closed_form:
      return esmc_closed(cfg, ctl);
    default:
      throw std::invalid_argument("esmc: Monte-Carlo estimates come from mc::simulate");
  }
}

MetricResult pnsmc(const SecrecyConfig& cfg, const SeriesControl& ctl, Method path) {
  SecrecyConfig zero_rate = cfg;
  zero_rate.phi_c = 0.0;
  MetricResult outage = sopm(zero_rate, ctl, path);
  MetricResult r = outage;
  r.value = 1.0 - outage.value;
  r.raw_value = 1.0 - outage.raw_value;
  return r;
}

double esmc_nonnegative(const MetricResult& r) { return std::max(0.0, r.value); }

double pnsmc_direct_quadrature(const SecrecyConfig& cfg, const SeriesControl& ctl) {
  auto f = [&](double x) {
    const double fmin = orderstats::multicast_min_pdf(x, cfg.user_link, cfg.topo, ctl);
    if (fmin == 0.0) return 0.0;
    return fmin * orderstats::eaves_max_cdf(x, cfg.eve_link, cfg.topo, ctl);
  };
  const auto q = quadrature::integrate_semi_infinite(
      f, 0.0, kOuterRel, 1e-14, orderstats::snr_scale(cfg.user_link));
  return std::clamp(q.value, 0.0, 1.0);
}

double elementary_exp_integral_ln(double r, double A, double B, int alpha) {
  return quadrature::log_power_exp_integral(r, A, B, alpha, nullptr, 1e-11);
}

double elementary_exp_integral_meijer_ln(double r, double A, double B, int alpha) {
  sf::MeijerGSpec spec;
  spec.m = 2;
  spec.n = alpha;
  spec.p = alpha;
  spec.q = 2;
  spec.a = sf::delta_params(alpha, -r);
  spec.b = sf::delta_params(2, 0.0);
  spec.z = B * B * std::pow(alpha, alpha) / (4.0 * std::pow(A, alpha));
  const sf::SignedLog g = sf::meijer_g_ln(spec);
  if (g.sign <= 0) throw numerical_error("elementary_exp_integral_meijer_ln: non-positive G");
  const double log_pref = 0.5 * std::log(2.0) + (0.5 + r) * std::log(alpha) -
                          (r + 1.0) * std::log(A) -
                          0.5 * alpha * std::log(2.0 * M_PI);
  return log_pref + g.log_abs;
}

double log_capacity_integral_ln(double c, double B, int alpha) {
  quadrature::Fn extra = [](double x) { return std::log1p(x); };
  return quadrature::log_power_exp_integral(c, 0.0, B, alpha, &extra, 1e-11);
}

double log_capacity_integral_meijer_ln(double c, double B, int alpha) {
  sf::MeijerGSpec spec;
  spec.m = 2 * (1 + alpha);
  spec.n = alpha;
  spec.p = 2 * alpha;
  spec.q = 2 * (1 + alpha);
  spec.a = sf::delta_params(alpha, -c - 1.0);
  const auto a2 = sf::delta_params(alpha, -c);
  spec.a.insert(spec.a.end(), a2.begin(), a2.end());
  spec.b = sf::delta_params(2, 0.0);
  const auto b2 = sf::delta_params(alpha, -c - 1.0);
  spec.b.insert(spec.b.end(), b2.begin(), b2.end());
  spec.b.insert(spec.b.end(), b2.begin(), b2.end());
  spec.z = 0.25 * B * B;
  const sf::SignedLog g = sf::meijer_g_ln(spec);
  if (g.sign <= 0) throw numerical_error("log_capacity_integral_meijer_ln: non-positive G");
  const double log_pref = 0.5 * std::log(2.0) - std::log(static_cast<double>(alpha)) -
                          (alpha - 0.5) * std::log(2.0 * M_PI);
  return log_pref + g.log_abs;
}

}  // namespace hstrn::metrics
