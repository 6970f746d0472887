#pragma once

// Monte Carlo cross-check for the closed-form model. Replications are driven
// by per-replication counter-based streams, so results are byte-identical for
// any worker count.

#include <cstdint>
#include <optional>
#include <vector>

#include "lorasg/analytic.hpp"

namespace lorasg::montecarlo {

struct SimConfig {
  long replications = 10000;
  std::uint64_t seed = 42;
  // quantile of the fading law used to bound the sampling disk; arrivals
  // beyond it clear a threshold with probability < tail_epsilon
  double tail_epsilon = 1e-7;
  // when set, transmitters exist only inside this disk
  std::optional<double> disk_truncation_m;
  int workers = 0;  // 0 = hardware concurrency; LORASG_THREADS caps the result
};

struct SimEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;
  long replications = 0;
  long successes = 0;
};

void validate(const SimConfig& cfg);

// Worker count actually used: `requested` (or hardware concurrency when 0),
// capped by the LORASG_THREADS environment variable when present.
int resolve_workers(int requested);

// Radius beyond which a transmitter exceeds min_threshold_mw with probability
// below tail_epsilon.
double max_relevant_radius(const analytic::Scenario& scn, double min_threshold_mw,
                           double tail_epsilon);

// Samples transmitter positions and fading on the relevant disk and counts
// windows free of same-class arrivals.
SimEstimate simulate_class_spatial(const analytic::Scenario& scn, int index_n,
                                   const SimConfig& cfg);

// Samples received powers directly from the heavy-tail arrival intensity,
// never touching geometry; an independent route to the same probability.
SimEstimate simulate_class_power(const analytic::Scenario& scn, int index_n,
                                 const SimConfig& cfg);

struct PowerLawCell {
  double threshold_mw = 0.0;
  double expected_count = 0.0;
  double observed_mean = 0.0;
  double std_err = 0.0;  // of the observed mean
  double z = 0.0;
};

// Counts spatially sampled arrivals above each threshold over window_s and
// compares against the predicted arrival counts threshold by threshold.
std::vector<PowerLawCell> validate_power_law(const analytic::Scenario& scn,
                                             double window_s,
                                             const std::vector<double>& thresholds_mw,
                                             const SimConfig& cfg);

}  // namespace lorasg::montecarlo
