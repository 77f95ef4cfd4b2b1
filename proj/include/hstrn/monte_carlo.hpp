#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hstrn/random.hpp"
#include "hstrn/secrecy_metrics.hpp"

namespace hstrn::mc {

enum class SimMode {
  /// Every user/eavesdropper draws its own first-hop SNRs, matching the
  /// independence assumed by the analytical order statistics.
  paper_independent,
  /// One first-hop draw per relay shared by everyone; the relay serving
  /// the weakest user serves all terminals. Reported for model-discrepancy
  /// studies only.
  shared_uplink,
};

struct SimPlan {
  metrics::SecrecyConfig cfg;
  std::uint64_t n_trials = 1'000'000;
  std::uint64_t seed = 1;
  SimMode mode = SimMode::paper_independent;
  int workers = 1;
};

struct SimEstimate {
  double sopm = 0.0;
  double esmc = 0.0;
  double pnsmc = 0.0;
  double se_sopm = 0.0;
  double se_esmc = 0.0;
  double se_pnsmc = 0.0;
  std::uint64_t n_trials = 0;
};

/// Runs the trial loop. Deterministic for a fixed seed regardless of the
/// worker count: streams are keyed by trial index and reduction happens in
/// fixed block order.
SimEstimate simulate(const SimPlan& plan);

/// Fraction of n draws <= each grid point (grid must be ascending).
std::vector<double> empirical_cdf(const std::function<double(rng::Stream&)>& sampler,
                                  std::uint64_t n, std::uint64_t seed,
                                  const std::vector<double>& grid);

}  // namespace hstrn::mc
