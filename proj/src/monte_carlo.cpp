#include "hstrn/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "hstrn/channels.hpp"

namespace hstrn::mc {

namespace {

// Trials are grouped into fixed-size blocks; block partials are combined in
// block order, so the reduction is independent of the worker layout.
constexpr std::uint64_t kBlock = 8192;

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct BlockPartial {
  std::uint64_t outage = 0;    // C_s < phi_c
  std::uint64_t positive = 0;  // C_s > 0
  Kahan cs;
  Kahan cs_sq;
};

double trial_secrecy_capacity(const metrics::SecrecyConfig& cfg, SimMode mode,
                              rng::Stream& stream) {
  const auto& topo = cfg.topo;
  if (mode == SimMode::paper_independent) {
    double zeta_min = std::numeric_limits<double>::infinity();
    for (int b = 0; b < topo.users; ++b) {
      double best = 0.0;
      for (int r = 0; r < topo.relays; ++r) {
        const double hop1 = channels::sr_sample(cfg.user_link.sr, stream);
        const double hop2 = channels::alphamu_sample(cfg.user_link.hop2, stream);
        best = std::max(best, std::min(hop1, hop2));
      }
      zeta_min = std::min(zeta_min, best);
    }
    double zeta_max = 0.0;
    for (int e = 0; e < topo.eves; ++e) {
      double best = 0.0;
      for (int r = 0; r < topo.relays; ++r) {
        const double hop1 = channels::sr_sample(cfg.eve_link.sr, stream);
        const double hop2 = channels::alphamu_sample(cfg.eve_link.hop2, stream);
        best = std::max(best, std::min(hop1, hop2));
      }
      zeta_max = std::max(zeta_max, best);
    }
    return std::log2(1.0 + zeta_min) - std::log2(1.0 + zeta_max);
  }

  // shared uplink: one first-hop draw per relay, one relay for everyone,
  // chosen to maximize the weakest user's dual-hop SNR
  std::vector<double> hop1(topo.relays);
  for (int r = 0; r < topo.relays; ++r)
    hop1[r] = channels::sr_sample(cfg.user_link.sr, stream);
  double zeta_min = -1.0;
  int best_relay = 0;
  for (int r = 0; r < topo.relays; ++r) {
    double weakest = std::numeric_limits<double>::infinity();
    for (int b = 0; b < topo.users; ++b) {
      const double hop2 = channels::alphamu_sample(cfg.user_link.hop2, stream);
      weakest = std::min(weakest, std::min(hop1[r], hop2));
    }
    if (weakest > zeta_min) {
      zeta_min = weakest;
      best_relay = r;
    }
  }
  double zeta_max = 0.0;
  for (int e = 0; e < topo.eves; ++e) {
    const double hop2 = channels::alphamu_sample(cfg.eve_link.hop2, stream);
    zeta_max = std::max(zeta_max, std::min(hop1[best_relay], hop2));
  }
  return std::log2(1.0 + zeta_min) - std::log2(1.0 + zeta_max);
}

void run_block(const SimPlan& plan, std::uint64_t first, std::uint64_t last,
               BlockPartial& out) {
  for (std::uint64_t trial = first; trial < last; ++trial) {
    rng::Stream stream(plan.seed, trial);
    const double cs = trial_secrecy_capacity(plan.cfg, plan.mode, stream);
    if (cs < plan.cfg.phi_c) ++out.outage;
    if (cs > 0.0) ++out.positive;
    out.cs.add(cs);
    out.cs_sq.add(cs * cs);
  }
}

}  // namespace

SimEstimate simulate(const SimPlan& plan) {
  if (plan.n_trials < 1) throw std::domain_error("simulate: n_trials >= 1");
  const int workers = std::max(1, plan.workers);
  const std::uint64_t n_blocks = (plan.n_trials + kBlock - 1) / kBlock;
  std::vector<BlockPartial> blocks(n_blocks);

  std::atomic<std::uint64_t> next{0};
  auto worker_fn = [&]() {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      const std::uint64_t first = b * kBlock;
      const std::uint64_t last = std::min(first + kBlock, plan.n_trials);
      run_block(plan, first, last, blocks[b]);
    }
  };
  if (workers == 1) {
    worker_fn();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
    for (auto& t : pool) t.join();
  }

  std::uint64_t outage = 0, positive = 0;
  Kahan cs, cs_sq;
  for (const auto& b : blocks) {
    outage += b.outage;
    positive += b.positive;
    cs.add(b.cs.sum);
    cs_sq.add(b.cs_sq.sum);
  }
  const double n = static_cast<double>(plan.n_trials);
  SimEstimate est;
  est.n_trials = plan.n_trials;
  est.sopm = static_cast<double>(outage) / n;
  est.pnsmc = static_cast<double>(positive) / n;
  est.esmc = cs.sum / n;
  est.se_sopm = std::sqrt(std::max(0.0, est.sopm * (1.0 - est.sopm) / n));
  est.se_pnsmc = std::sqrt(std::max(0.0, est.pnsmc * (1.0 - est.pnsmc) / n));
  const double var = std::max(0.0, (cs_sq.sum - cs.sum * cs.sum / n) / std::max(1.0, n - 1.0));
  est.se_esmc = std::sqrt(var / n);
  return est;
}

std::vector<double> empirical_cdf(const std::function<double(rng::Stream&)>& sampler,
                                  std::uint64_t n, std::uint64_t seed,
                                  const std::vector<double>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::domain_error("empirical_cdf: grid must be ascending");
  std::vector<std::uint64_t> counts(grid.size(), 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    rng::Stream stream(seed, i);
    const double x = sampler(stream);
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    for (std::size_t j = it - grid.begin(); j < grid.size(); ++j) ++counts[j];
  }
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    out[j] = static_cast<double>(counts[j]) / static_cast<double>(n);
  return out;
}

}  // namespace hstrn::mc
