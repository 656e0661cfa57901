#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/dates.hpp"
#include "core/panel.hpp"

namespace evk {

// Closed taxonomy.  Placebo is reserved for generated pseudo-events; it never
// appears in a hand-maintained registry but flows through the same analyses.
enum class Category {
  InfraNegative,
  InfraPositive,
  RegNegative,
  RegPositive,
  Excluded,
  Placebo,
};

// How an event earned its place in the sample: by construction (exogenous to
// prices), by the return-based screen, or both.
enum class Selection { Exogenous, Return, Both };

std::string_view category_token(Category c);
std::string_view selection_token(Selection s);
Category category_from_token(std::string_view tok);   // throws Validation
Selection selection_from_token(std::string_view tok); // throws Validation

struct Event {
  std::string id;
  Date date = 0;
  std::string name;
  Category category = Category::Excluded;
  Selection selection = Selection::Exogenous;
  std::optional<double> impact_usd;        // >= 0 where present
  std::optional<long long> affected_users; // >= 0 where present
  std::vector<std::string> overlap_ids;    // filled by detect_overlaps; sorted
  std::vector<std::string> tags;           // free-form, semicolon-separated in CSV
};

struct EventSet {
  std::vector<Event> events;  // sorted by (date, id)
  Date period_start = 0;      // envelope of event dates
  Date period_end = 0;

  const Event* find(std::string_view id) const;
  std::size_t size() const { return events.size(); }
};

// CSV with header `id,date,name,category,selection,impact_usd,affected_users,tags`.
// Unknown category/selection tokens -> Validation; duplicate ids -> Conflict;
// malformed rows -> Parse.  Empty impact/users fields mean "unknown".
EventSet load_events(const std::string& path);
std::string render_events(const EventSet& set);
void save_events(const EventSet& set, const std::string& path);

// Marks every pair of events whose dates are within `horizon_days` of each
// other (inclusive).  Symmetric, irreflexive; overlap_ids come out sorted.
EventSet detect_overlaps(EventSet set, int horizon_days);

// One audit row per event: which selection criteria it meets against the
// reference asset's return series.  Missing return data makes a criterion
// unmet and flags the row as incomplete rather than failing the audit.
struct EventAudit {
  std::string event_id;
  std::optional<double> same_day_return;   // reference return on day 0
  std::optional<double> three_day_return;  // compounded over days 0..+2
  bool met_same_day = false;
  bool met_three_day = false;
  bool met_impact = false;    // impact_usd > 1e8
  bool met_users = false;     // affected_users > 1e5
  bool qualifies = false;     // any criterion met
  bool complete = false;      // all return-based inputs were available
};

struct SelectionAudit {
  double threshold = 0.0;
  std::string reference_asset;
  std::vector<EventAudit> rows;  // same order as set.events
};

SelectionAudit audit_selection(const EventSet& set, const ReturnPanel& returns,
                               const std::string& reference_asset,
                               double threshold);

}  // namespace evk
