#include "core/events.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace evk {

namespace {

const std::vector<std::string> kEventHeader = {
    "id",         "date",           "name", "category",
    "selection",  "impact_usd",     "affected_users", "tags"};

constexpr double kImpactFloorUsd = 1e8;
constexpr long long kUsersFloor = 100000;

std::vector<std::string> split_tags(std::string_view field) {
  std::vector<std::string> tags;
  std::size_t start = 0;
  while (start <= field.size()) {
    std::size_t pos = field.find(';', start);
    std::string_view tok = pos == std::string_view::npos
                               ? field.substr(start)
                               : field.substr(start, pos - start);
    if (!tok.empty()) tags.emplace_back(tok);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return tags;
}

// Dollar impacts are whole numbers in practice; render them that way so a
// hand-written registry survives save(load(f)) byte-for-byte.
std::string format_impact(double v) {
  if (v == std::floor(v) && std::fabs(v) < 9.2e18)
    return std::to_string(static_cast<long long>(v));
  return format_double(v);
}

std::string join_tags(const std::vector<std::string>& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += ';';
    out += tags[i];
  }
  return out;
}

void finalize(EventSet& set) {
  std::sort(set.events.begin(), set.events.end(),
            [](const Event& a, const Event& b) {
              return std::tie(a.date, a.id) < std::tie(b.date, b.id);
            });
  if (!set.events.empty()) {
    set.period_start = set.events.front().date;
    set.period_end = set.events.front().date;
    for (const Event& e : set.events) {
      set.period_start = std::min(set.period_start, e.date);
      set.period_end = std::max(set.period_end, e.date);
    }
  }
}

}  // namespace

std::string_view category_token(Category c) {
  switch (c) {
    case Category::InfraNegative: return "Infra_Neg";
    case Category::InfraPositive: return "Infra_Pos";
    case Category::RegNegative: return "Reg_Neg";
    case Category::RegPositive: return "Reg_Pos";
    case Category::Excluded: return "Excluded";
    case Category::Placebo: return "Placebo";
  }
  fail(ErrorCode::Internal, "unreachable category");
}

std::string_view selection_token(Selection s) {
  switch (s) {
    case Selection::Exogenous: return "Exogenous";
    case Selection::Return: return "Return";
    case Selection::Both: return "Both";
  }
  fail(ErrorCode::Internal, "unreachable selection");
}

Category category_from_token(std::string_view tok) {
  for (Category c : {Category::InfraNegative, Category::InfraPositive,
                     Category::RegNegative, Category::RegPositive,
                     Category::Excluded, Category::Placebo})
    if (tok == category_token(c)) return c;
  fail(ErrorCode::Validation, "unknown category token '" + std::string(tok) + "'");
}

Selection selection_from_token(std::string_view tok) {
  for (Selection s : {Selection::Exogenous, Selection::Return, Selection::Both})
    if (tok == selection_token(s)) return s;
  fail(ErrorCode::Validation, "unknown selection token '" + std::string(tok) + "'");
}

const Event* EventSet::find(std::string_view id) const {
  for (const Event& e : events)
    if (e.id == id) return &e;
  return nullptr;
}

EventSet load_events(const std::string& path) {
  CsvReader reader(path);
  reader.expect_header(kEventHeader);

  EventSet set;
  std::map<std::string, long> seen;  // id -> line
  std::vector<std::string> f;
  while (reader.next_row(f)) {
    const std::string where = reader.context();
    Event e;
    e.id = f[0];
    if (e.id.empty()) fail(ErrorCode::Parse, where + ": empty event id");
    try {
      e.date = parse_date(f[1]);
    } catch (const Error& err) {
      fail(ErrorCode::Parse, where + ": " + err.what());
    }
    e.name = f[2];
    e.category = category_from_token(f[3]);
    e.selection = selection_from_token(f[4]);
    if (!f[5].empty()) {
      double v = parse_double_field(f[5], where);
      if (v < 0.0 || !std::isfinite(v))
        fail(ErrorCode::Validation, where + ": impact_usd must be >= 0");
      e.impact_usd = v;
    }
    if (!f[6].empty()) {
      long long v = parse_int_field(f[6], where);
      if (v < 0)
        fail(ErrorCode::Validation, where + ": affected_users must be >= 0");
      e.affected_users = v;
    }
    e.tags = split_tags(f[7]);
    auto [it, inserted] = seen.emplace(e.id, reader.line_number());
    if (!inserted)
      fail(ErrorCode::Conflict, where + ": duplicate event id '" + e.id +
                                    "' (first seen at line " +
                                    std::to_string(it->second) + ")");
    set.events.push_back(std::move(e));
  }
  finalize(set);
  return set;
}

std::string render_events(const EventSet& set) {
  CsvWriter w;
  w.row(kEventHeader);
  for (const Event& e : set.events) {
    w.row({e.id, format_date(e.date), e.name,
           std::string(category_token(e.category)),
           std::string(selection_token(e.selection)),
           e.impact_usd ? format_impact(*e.impact_usd) : std::string(),
           e.affected_users ? std::to_string(*e.affected_users) : std::string(),
           join_tags(e.tags)});
  }
  return w.str();
}

void save_events(const EventSet& set, const std::string& path) {
  write_file_atomic(path, render_events(set));
}

EventSet detect_overlaps(EventSet set, int horizon_days) {
  if (horizon_days < 0)
    fail(ErrorCode::InvalidArgument, "overlap horizon must be >= 0");
  for (Event& e : set.events) e.overlap_ids.clear();
  for (std::size_t i = 0; i < set.events.size(); ++i) {
    for (std::size_t j = i + 1; j < set.events.size(); ++j) {
      if (std::abs(set.events[i].date - set.events[j].date) <= horizon_days) {
        set.events[i].overlap_ids.push_back(set.events[j].id);
        set.events[j].overlap_ids.push_back(set.events[i].id);
      }
    }
  }
  for (Event& e : set.events)
    std::sort(e.overlap_ids.begin(), e.overlap_ids.end());
  return set;
}

SelectionAudit audit_selection(const EventSet& set, const ReturnPanel& returns,
                               const std::string& reference_asset,
                               double threshold) {
  if (!(threshold > 0.0))
    fail(ErrorCode::InvalidArgument, "selection threshold must be positive");
  auto asset = returns.asset_index(reference_asset);
  if (!asset)
    fail(ErrorCode::InvalidArgument,
         "reference asset '" + reference_asset + "' not present in the panel");

  SelectionAudit audit;
  audit.threshold = threshold;
  audit.reference_asset = reference_asset;
  audit.rows.reserve(set.events.size());
  for (const Event& e : set.events) {
    EventAudit row;
    row.event_id = e.id;
    auto ret_on = [&](Date d) -> Cell {
      auto t = returns.date_index(d);
      return t ? returns.ret(*asset, *t) : std::nullopt;
    };
    row.same_day_return = ret_on(e.date);
    // Compound gross return over days 0..+2; defined only when all three
    // daily returns exist.
    Cell r0 = row.same_day_return, r1 = ret_on(e.date + 1), r2 = ret_on(e.date + 2);
    if (r0 && r1 && r2)
      row.three_day_return = (1.0 + *r0) * (1.0 + *r1) * (1.0 + *r2) - 1.0;
    row.complete = row.same_day_return.has_value() &&
                   row.three_day_return.has_value();
    row.met_same_day =
        row.same_day_return && std::fabs(*row.same_day_return) > threshold;
    row.met_three_day =
        row.three_day_return && std::fabs(*row.three_day_return) > threshold;
    row.met_impact = e.impact_usd && *e.impact_usd > kImpactFloorUsd;
    row.met_users = e.affected_users && *e.affected_users > kUsersFloor;
    row.qualifies =
        row.met_same_day || row.met_three_day || row.met_impact || row.met_users;
    audit.rows.push_back(std::move(row));
  }
  return audit;
}

}  // namespace evk
