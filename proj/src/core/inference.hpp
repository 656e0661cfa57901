#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/models.hpp"

namespace evk {

// How multi-asset events enter group statistics: pool every (event, asset)
// CAR, or collapse each event to its own mean first so every event counts
// once regardless of how many assets traded through it.
enum class Weighting { ObservationWeighted, EventEqualWeighted };

std::string_view weighting_token(Weighting w);
Weighting weighting_from_token(std::string_view tok);  // throws InvalidArgument

// Per-event CAR vectors for one category, in (event date, id) order.
struct EventGroup {
  std::vector<std::string> event_ids;
  std::vector<std::vector<double>> cars;  // cars[e] = CARs of event e's assets
  std::vector<double> event_means;        // mean of cars[e]

  std::size_t n_events() const { return event_ids.size(); }
  std::size_t n_observations() const;
  double statistic(Weighting w) const;  // group mean under the scheme
};

EventGroup extract_group(const CarTable& table, Category category);

// (event id, mean CAR across its assets), ordered by (event date, id).
std::vector<std::pair<std::string, double>> event_level_means(
    const CarTable& table, Category category);

struct BootstrapResult {
  double estimate = 0.0;  // statistic on the original sample
  double se = 0.0;        // sd of the replication statistics (n-1)
  double ci_low = 0.0;    // percentile interval
  double ci_high = 0.0;
  double p_value = 0.0;   // two-sided sign-flip fraction, floored at 2/B
  long long replications = 0;
  double ci_level = 0.95;
  Weighting scheme = Weighting::ObservationWeighted;
  std::uint64_t seed = 0;
};

// Event-level block bootstrap: each replication redraws whole events with
// replacement, keeping every asset CAR of a drawn event together, then
// recomputes the scheme statistic.  Replication b always uses RNG substream
// (seed, b), so results are byte-identical for any thread count.
// Requires >= 2 events per group (InsufficientClusters) and B >= 1000.
BootstrapResult block_bootstrap_mean(const CarTable& table, Category category,
                                     Weighting scheme, long long B,
                                     std::uint64_t seed, double ci_level,
                                     int threads = 1);

// Same machinery for the difference (mean A - mean B); groups are redrawn
// independently within each replication.
BootstrapResult block_bootstrap_diff(const CarTable& table, Category cat_a,
                                     Category cat_b, Weighting scheme,
                                     long long B, std::uint64_t seed,
                                     double ci_level, int threads = 1);

struct PermutationResult {
  double observed_diff = 0.0;
  unsigned long long n_assignments = 0;  // enumerated or sampled
  double p_value = 0.0;
  bool exact = false;
};

// Two-sample permutation test on the difference of means.  Enumerates all
// C(nA+nB, nA) group assignments when that count is <= max_exact, otherwise
// samples max_exact assignments (the observed one included).  Two-sided with
// |diff| >= |observed| - 1e-12 counted as at least as extreme.
PermutationResult permutation_test(std::span<const double> group_a,
                                   std::span<const double> group_b,
                                   unsigned long long max_exact,
                                   std::uint64_t seed);

struct TTestResult {
  double diff = 0.0;
  double se = 0.0;
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Welch two-sample t with Welch-Satterthwaite degrees of freedom.  Needs at
// least two observations per group (InsufficientClusters).
TTestResult welch_t_test(std::span<const double> group_a,
                         std::span<const double> group_b,
                         double ci_level = 0.95);

// The few-cluster t-test: Welch applied to event-level means, so each event
// is one observation.
TTestResult cluster_mean_t_test(std::span<const double> means_a,
                                std::span<const double> means_b,
                                double ci_level = 0.95);

// Scales a t statistic computed from n cross-sectionally correlated units
// with mean pairwise correlation rho_bar.  Requires 1 + (n-1)*rho_bar > 0.
double adjust_t_for_correlation(double t, long long n, double rho_bar);

// Mean pairwise Pearson correlation of event-window abnormal returns across
// assets, aligning observations by (event, relative day).  Pairs with fewer
// than 3 aligned days are dropped; returns 0 when no pair qualifies.
double mean_cross_correlation(const ReturnPanel& panel, const EventSet& events,
                              const WindowConfig& w,
                              const ModelSelector& selector,
                              std::optional<double> cap);

}  // namespace evk
