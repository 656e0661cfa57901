#pragma once

#include <cstdint>
#include <utility>

#include "core/inference.hpp"

namespace evk {

// Synthetic single-factor panel for calibrating the inference machinery:
//   r_it = daily_sd * (sqrt(rho) * f_t + sqrt(1-rho) * e_it) + delta_it
// with f and e iid standard normal, so every asset pair has correlation rho,
// and delta_it = delta on each event-window day of each event.
struct SimSpec {
  int n_assets = 4;
  int n_events = 8;
  int days_per_event = 320;  // calendar block reserved per event
  double rho = 0.9;          // cross-asset correlation, in [0,1)
  double daily_sd = 0.05;    // return volatility, > 0
  double delta = 0.0;        // per-day abnormal drift inside the window
  int trials = 500;
  std::uint64_t seed = 0;
  WindowConfig window{250, 120, 30, 0, 5};

  void validate() const;
};

// Builds one deterministic trial: a ReturnPanel plus its synthetic events
// (one per block, all in one category).  The block layout guarantees each
// event a full estimation window untouched by any other event's effect;
// days_per_event too small for that -> Infeasible.
std::pair<ReturnPanel, EventSet> simulate_panel(const SimSpec& spec,
                                                int trial_index);

struct CalibrationReport {
  int trials = 0;
  double naive_rejection_rate = 0.0;      // pooled one-sample t, |t| test
  double bootstrap_rejection_rate = 0.0;  // event-level block bootstrap p
  double bootstrap_ci_coverage = 0.0;     // CI contains the true mean effect
  double mean_estimate = 0.0;             // average bootstrap point estimate
  double se_mean_estimate = 0.0;          // Monte Carlo se of that average
  double true_mean_car = 0.0;             // delta * window length
  double alpha = 0.05;
  long long B = 1000;
  Weighting scheme = Weighting::ObservationWeighted;
};

// Runs `trials` independent simulated panels through the real CAR + testing
// pipeline and tallies how the naive pooled t-test and the event-level
// bootstrap behave.  trials < 200 -> InvalidArgument (the rates would be
// noise).  Trials run concurrently; aggregation is order-independent.
CalibrationReport coverage_study(const SimSpec& spec, double alpha,
                                 long long B, Weighting scheme,
                                 int threads = 1);

}  // namespace evk
