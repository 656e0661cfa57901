#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/inference.hpp"

namespace evk {

// ---------------------------------------------------------------------------
// Placebo battery

struct PlaceboSpec {
  int n_events = 200;
  int exclusion_horizon = 30;  // min distance (days, exclusive) to any real event
  Date period_start = 0;
  Date period_end = 0;
  std::uint64_t seed = 0;
};

std::array<long long, 7> weekday_histogram(const EventSet& events);

// Largest-remainder apportionment of `total` across weekday weights; ties on
// the fractional part break toward the lower weekday index.
std::array<long long, 7> apportion_weekdays(
    const std::array<long long, 7>& weights, long long total);

// Draws pseudo-event dates inside [period_start, period_end], all farther
// than `exclusion_horizon` days from every real event, matching the weekday
// distribution of the real events via largest-remainder quotas, without
// replacement within each weekday.  Infeasible strata raise Infeasible and
// name the weekday.  Output events carry the Placebo category.
EventSet generate_placebos(const EventSet& real_events, const PlaceboSpec& spec);

// ---------------------------------------------------------------------------
// Leave-one-out

struct LooRow {
  std::string event_id;
  Date event_date = 0;
  double mean_without = 0.0;
  double pct_change = 0.0;  // (mean_without - baseline) / |baseline|
  bool sign_flip = false;
};

struct LooReport {
  Category category = Category::InfraNegative;
  Weighting scheme = Weighting::ObservationWeighted;
  double baseline = 0.0;
  std::vector<LooRow> rows;
};

// Recomputes the category's scheme mean with each event deleted in turn.
// Needs >= 2 events (InsufficientClusters).
LooReport leave_one_out(const CarTable& table, Category category,
                        Weighting scheme);

// ---------------------------------------------------------------------------
// Specification sweeps

struct SweepCell {
  double mean = 0.0;
  int n_events = 0;
  int n_observations = 0;
  bool sign_matches_baseline = true;
};

struct SweepSetting {
  std::string label;
  std::map<Category, SweepCell> groups;
  // Difference test between the two focal categories; absent when either
  // group is too small under this setting.
  std::optional<BootstrapResult> diff;
};

struct SweepReport {
  std::string axis;  // "window" or "cap"
  std::map<Category, double> baseline_means;
  std::vector<SweepSetting> settings;
};

struct SweepContext {
  const ReturnPanel* panel = nullptr;
  const EventSet* events = nullptr;
  WindowConfig window;
  ModelSelector selector;
  std::optional<double> cap;
  Weighting scheme = Weighting::ObservationWeighted;
  Category group_a = Category::InfraNegative;
  Category group_b = Category::RegNegative;
  long long B = 5000;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
  int threads = 1;
};

// Recomputes the full pipeline for each event window (tau1, tau2), same seed
// per setting.  Empty settings list -> InvalidArgument.
SweepReport sweep_windows(const SweepContext& ctx,
                          const std::vector<std::pair<int, int>>& windows);

// Same across winsorization caps (nullopt = uncapped).
SweepReport sweep_caps(const SweepContext& ctx,
                       const std::vector<std::optional<double>>& caps);

// ---------------------------------------------------------------------------
// Subsampling

struct SubsampleFilter {
  enum class Kind { ExogenousOnly, NonOverlapping, ExcludeIds } kind =
      Kind::ExogenousOnly;
  std::vector<std::string> exclude_ids;

  std::string name() const;
  // Parses "exogenous", "independent", or "exclude:id1;id2;...".
  static SubsampleFilter parse(const std::string& text);
  bool keeps(const Event& e) const;
};

struct SubsampleResult {
  std::string filter_name;
  int n_events_a = 0, n_events_b = 0;
  int n_obs_a = 0, n_obs_b = 0;
  double mean_a = 0.0, mean_b = 0.0;  // scheme means on the subsample
  BootstrapResult diff;
  PermutationResult permutation;
};

// Drops events failing the filter, then re-runs the A-vs-B comparison on the
// surviving CAR rows.  Insufficient clusters after filtering propagate with
// the filter named in the message.
SubsampleResult subsample_run(const CarTable& table, const EventSet& events,
                              const SubsampleFilter& filter, Category cat_a,
                              Category cat_b, Weighting scheme, long long B,
                              std::uint64_t seed, double ci_level,
                              unsigned long long permute_max_exact,
                              int threads = 1);

// ---------------------------------------------------------------------------
// Decomposition

enum class DecomposeBy { Asset, Category, Tag };

DecomposeBy decompose_by_from_token(std::string_view tok);
std::string_view decompose_by_token(DecomposeBy by);

struct DecompositionRow {
  Category category = Category::InfraNegative;
  std::map<std::string, double> cell_means;  // key = asset / tag / category
  std::map<std::string, int> cell_counts;
  double row_mean = 0.0;  // observation-weighted mean over the row's cells
  int row_count = 0;
  double spread = 0.0;  // max cell mean - min cell mean
};

struct Decomposition {
  DecomposeBy by = DecomposeBy::Asset;
  std::vector<DecompositionRow> rows;  // one per category present
};

// Cell means of CARs per (category x key).  Tag cells use an event's first
// tag, or "untagged".  Weighted recomposition of a row's cells must equal
// the row's pooled mean; callers rely on that identity.
Decomposition group_decompose(const CarTable& table, const EventSet& events,
                              DecomposeBy by);

}  // namespace evk
