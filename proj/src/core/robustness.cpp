#include "core/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/rng.hpp"

namespace evk {

std::array<long long, 7> weekday_histogram(const EventSet& events) {
  std::array<long long, 7> h{};
  for (const Event& e : events.events) ++h[static_cast<std::size_t>(weekday(e.date))];
  return h;
}

std::array<long long, 7> apportion_weekdays(
    const std::array<long long, 7>& weights, long long total) {
  if (total < 0) fail(ErrorCode::InvalidArgument, "apportion: total must be >= 0");
  long long wsum = 0;
  for (long long w : weights) {
    if (w < 0) fail(ErrorCode::InvalidArgument, "apportion: negative weight");
    wsum += w;
  }
  if (wsum == 0)
    fail(ErrorCode::InvalidArgument, "apportion: all weekday weights are zero");

  std::array<long long, 7> out{};
  std::array<double, 7> remainder{};
  long long assigned = 0;
  for (std::size_t i = 0; i < 7; ++i) {
    const double quota = static_cast<double>(total) *
                         static_cast<double>(weights[i]) /
                         static_cast<double>(wsum);
    out[i] = static_cast<long long>(std::floor(quota));
    remainder[i] = quota - std::floor(quota);
    assigned += out[i];
  }
  std::array<std::size_t, 7> order{0, 1, 2, 3, 4, 5, 6};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a < b;  // ties toward the lower weekday index
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned)
    ++out[order[k % 7]];
  return out;
}

EventSet generate_placebos(const EventSet& real_events, const PlaceboSpec& spec) {
  if (spec.n_events <= 0)
    fail(ErrorCode::InvalidArgument, "placebo count must be positive");
  if (spec.exclusion_horizon < 0)
    fail(ErrorCode::InvalidArgument, "placebo exclusion horizon must be >= 0");
  if (spec.period_start > spec.period_end)
    fail(ErrorCode::InvalidArgument, "placebo period start exceeds end");
  if (real_events.events.empty())
    fail(ErrorCode::InvalidArgument,
         "placebo generation needs real events to match against");

  const auto target =
      apportion_weekdays(weekday_histogram(real_events), spec.n_events);

  // Eligible dates per weekday: inside the period and farther than the
  // horizon from every real event.
  std::array<std::vector<Date>, 7> eligible;
  for (Date d = spec.period_start; d <= spec.period_end; ++d) {
    bool clear = true;
    for (const Event& e : real_events.events) {
      if (std::abs(d - e.date) <= spec.exclusion_horizon) {
        clear = false;
        break;
      }
    }
    if (clear) eligible[static_cast<std::size_t>(weekday(d))].push_back(d);
  }

  std::vector<Date> drawn;
  drawn.reserve(static_cast<std::size_t>(spec.n_events));
  for (std::size_t wd = 0; wd < 7; ++wd) {
    const auto need = static_cast<std::size_t>(target[wd]);
    if (need == 0) continue;
    auto& pool = eligible[wd];
    if (pool.size() < need)
      fail(ErrorCode::Infeasible,
           "cannot place " + std::to_string(need) + " placebo(s) on " +
               kWeekdayNames[wd] + ": only " + std::to_string(pool.size()) +
               " eligible date(s) in the period");
    Rng rng(spec.seed, wd);
    rng.partial_shuffle(pool, need);
    drawn.insert(drawn.end(), pool.begin(),
                 pool.begin() + static_cast<std::ptrdiff_t>(need));
  }
  std::sort(drawn.begin(), drawn.end());

  EventSet out;
  out.events.reserve(drawn.size());
  char id[32];
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    std::snprintf(id, sizeof id, "placebo_%04zu", i + 1);
    Event e;
    e.id = id;
    e.date = drawn[i];
    e.name = "pseudo-event";
    e.category = Category::Placebo;
    e.selection = Selection::Exogenous;
    out.events.push_back(std::move(e));
  }
  out.period_start = spec.period_start;
  out.period_end = spec.period_end;

  for (const Event& p : out.events)
    for (const Event& e : real_events.events)
      if (std::abs(p.date - e.date) <= spec.exclusion_horizon)
        fail(ErrorCode::Internal, "placebo landed inside an exclusion zone");
  return out;
}

LooReport leave_one_out(const CarTable& table, Category category,
                        Weighting scheme) {
  const EventGroup g = extract_group(table, category);
  if (g.n_events() < 2)
    fail(ErrorCode::InsufficientClusters,
         "leave-one-out needs at least 2 events in category " +
             std::string(category_token(category)));

  LooReport report;
  report.category = category;
  report.scheme = scheme;
  report.baseline = g.statistic(scheme);

  std::map<std::string, Date> dates;
  for (const CarRow& r : table.rows) dates[r.event_id] = r.event_date;

  for (std::size_t drop = 0; drop < g.n_events(); ++drop) {
    double sum = 0.0;
    std::size_t n = 0;
    if (scheme == Weighting::EventEqualWeighted) {
      for (std::size_t e = 0; e < g.n_events(); ++e) {
        if (e == drop) continue;
        sum += g.event_means[e];
        ++n;
      }
    } else {
      for (std::size_t e = 0; e < g.n_events(); ++e) {
        if (e == drop) continue;
        for (double c : g.cars[e]) sum += c;
        n += g.cars[e].size();
      }
    }
    LooRow row;
    row.event_id = g.event_ids[drop];
    row.event_date = dates[row.event_id];
    row.mean_without = sum / static_cast<double>(n);
    if (report.baseline == 0.0) {
      row.pct_change = row.mean_without == 0.0
                           ? 0.0
                           : std::copysign(
                                 std::numeric_limits<double>::infinity(),
                                 row.mean_without);
    } else {
      row.pct_change =
          (row.mean_without - report.baseline) / std::fabs(report.baseline);
    }
    row.sign_flip = row.mean_without != 0.0 && report.baseline != 0.0 &&
                    (row.mean_without > 0.0) != (report.baseline > 0.0);
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

SweepSetting run_one_setting(const SweepContext& ctx, const WindowConfig& w,
                             std::optional<double> cap, std::string label,
                             const std::map<Category, double>& baseline_means) {
  const CarTable table = event_panel_cars(*ctx.panel, *ctx.events, w,
                                          ctx.selector, cap);
  SweepSetting setting;
  setting.label = std::move(label);
  for (Category c : {Category::InfraNegative, Category::InfraPositive,
                     Category::RegNegative, Category::RegPositive,
                     Category::Placebo}) {
    EventGroup g = extract_group(table, c);
    if (g.n_events() == 0) continue;
    SweepCell cell;
    cell.mean = g.statistic(ctx.scheme);
    cell.n_events = static_cast<int>(g.n_events());
    cell.n_observations = static_cast<int>(g.n_observations());
    auto base = baseline_means.find(c);
    if (base != baseline_means.end())
      cell.sign_matches_baseline = cell.mean == 0.0 || base->second == 0.0 ||
                                   (cell.mean > 0.0) == (base->second > 0.0);
    setting.groups[c] = cell;
  }
  try {
    setting.diff = block_bootstrap_diff(table, ctx.group_a, ctx.group_b,
                                        ctx.scheme, ctx.B, ctx.seed,
                                        ctx.ci_level, ctx.threads);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientClusters) throw;
    setting.diff = std::nullopt;  // too few events under this setting
  }
  return setting;
}

std::map<Category, double> baseline_category_means(const SweepContext& ctx) {
  const CarTable table = event_panel_cars(*ctx.panel, *ctx.events, ctx.window,
                                          ctx.selector, ctx.cap);
  std::map<Category, double> means;
  for (Category c : {Category::InfraNegative, Category::InfraPositive,
                     Category::RegNegative, Category::RegPositive,
                     Category::Placebo}) {
    EventGroup g = extract_group(table, c);
    if (g.n_events() > 0) means[c] = g.statistic(ctx.scheme);
  }
  return means;
}

}  // namespace

SweepReport sweep_windows(const SweepContext& ctx,
                          const std::vector<std::pair<int, int>>& windows) {
  if (windows.empty())
    fail(ErrorCode::InvalidArgument, "window sweep needs at least one window");
  SweepReport report;
  report.axis = "window";
  report.baseline_means = baseline_category_means(ctx);
  for (const auto& [t1, t2] : windows) {
    WindowConfig w = ctx.window;
    w.tau1 = t1;
    w.tau2 = t2;
    w.validate();
    // Colon separator, matching the window spec syntax and keeping the label
    // safe inside quote-free CSV cells.
    std::string label = "[" + std::to_string(t1) + ":" + std::to_string(t2) + "]";
    report.settings.push_back(
        run_one_setting(ctx, w, ctx.cap, std::move(label), report.baseline_means));
  }
  return report;
}

SweepReport sweep_caps(const SweepContext& ctx,
                       const std::vector<std::optional<double>>& caps) {
  if (caps.empty())
    fail(ErrorCode::InvalidArgument, "cap sweep needs at least one cap");
  SweepReport report;
  report.axis = "cap";
  report.baseline_means = baseline_category_means(ctx);
  for (const auto& cap : caps) {
    std::string label = cap ? format_double(*cap) : "none";
    report.settings.push_back(run_one_setting(ctx, ctx.window, cap,
                                              std::move(label),
                                              report.baseline_means));
  }
  return report;
}

std::string SubsampleFilter::name() const {
  switch (kind) {
    case Kind::ExogenousOnly: return "exogenous";
    case Kind::NonOverlapping: return "independent";
    case Kind::ExcludeIds: {
      std::string out = "exclude:";
      for (std::size_t i = 0; i < exclude_ids.size(); ++i) {
        if (i) out += ';';
        out += exclude_ids[i];
      }
      return out;
    }
  }
  fail(ErrorCode::Internal, "unreachable filter kind");
}

SubsampleFilter SubsampleFilter::parse(const std::string& text) {
  SubsampleFilter f;
  if (text == "exogenous") {
    f.kind = Kind::ExogenousOnly;
  } else if (text == "independent") {
    f.kind = Kind::NonOverlapping;
  } else if (text.rfind("exclude:", 0) == 0) {
    f.kind = Kind::ExcludeIds;
    std::string rest = text.substr(std::string("exclude:").size());
    std::size_t start = 0;
    while (start <= rest.size()) {
      std::size_t pos = rest.find(';', start);
      std::string tok = pos == std::string::npos ? rest.substr(start)
                                                 : rest.substr(start, pos - start);
      if (!tok.empty()) f.exclude_ids.push_back(tok);
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (f.exclude_ids.empty())
      fail(ErrorCode::InvalidArgument, "exclude filter lists no event ids");
  } else {
    fail(ErrorCode::InvalidArgument,
         "unknown subsample filter '" + text +
             "' (want exogenous, independent, or exclude:<ids>)");
  }
  return f;
}

bool SubsampleFilter::keeps(const Event& e) const {
  switch (kind) {
    case Kind::ExogenousOnly:
      // Keep events whose selection does not rest on returns alone.
      return e.selection != Selection::Return;
    case Kind::NonOverlapping:
      return e.overlap_ids.empty();
    case Kind::ExcludeIds:
      return std::find(exclude_ids.begin(), exclude_ids.end(), e.id) ==
             exclude_ids.end();
  }
  fail(ErrorCode::Internal, "unreachable filter kind");
}

SubsampleResult subsample_run(const CarTable& table, const EventSet& events,
                              const SubsampleFilter& filter, Category cat_a,
                              Category cat_b, Weighting scheme, long long B,
                              std::uint64_t seed, double ci_level,
                              unsigned long long permute_max_exact,
                              int threads) {
  std::set<std::string> kept;
  for (const Event& e : events.events)
    if (filter.keeps(e)) kept.insert(e.id);

  CarTable sub;
  for (const CarRow& r : table.rows)
    if (kept.count(r.event_id)) sub.rows.push_back(r);
  for (const auto& [id, cat] : table.event_order)
    if (kept.count(id)) sub.event_order.emplace_back(id, cat);

  SubsampleResult result;
  result.filter_name = filter.name();
  const EventGroup ga = extract_group(sub, cat_a);
  const EventGroup gb = extract_group(sub, cat_b);
  result.n_events_a = static_cast<int>(ga.n_events());
  result.n_events_b = static_cast<int>(gb.n_events());
  result.n_obs_a = static_cast<int>(ga.n_observations());
  result.n_obs_b = static_cast<int>(gb.n_observations());

  try {
    result.diff = block_bootstrap_diff(sub, cat_a, cat_b, scheme, B, seed,
                                       ci_level, threads);
  } catch (const Error& e) {
    fail(e.code(), "subsample filter '" + result.filter_name + "': " + e.what());
  }
  result.mean_a = ga.statistic(scheme);
  result.mean_b = gb.statistic(scheme);
  result.permutation = permutation_test(ga.event_means, gb.event_means,
                                        permute_max_exact, seed);
  return result;
}

DecomposeBy decompose_by_from_token(std::string_view tok) {
  if (tok == "asset") return DecomposeBy::Asset;
  if (tok == "category") return DecomposeBy::Category;
  if (tok == "tag") return DecomposeBy::Tag;
  fail(ErrorCode::InvalidArgument,
       "unknown decomposition key '" + std::string(tok) +
           "' (want asset, category, or tag)");
}

std::string_view decompose_by_token(DecomposeBy by) {
  switch (by) {
    case DecomposeBy::Asset: return "asset";
    case DecomposeBy::Category: return "category";
    case DecomposeBy::Tag: return "tag";
  }
  fail(ErrorCode::Internal, "unreachable decompose key");
}

Decomposition group_decompose(const CarTable& table, const EventSet& events,
                              DecomposeBy by) {
  std::map<std::string, std::string> first_tag;
  for (const Event& e : events.events)
    first_tag[e.id] = e.tags.empty() ? "untagged" : e.tags.front();

  Decomposition out;
  out.by = by;
  for (Category c : {Category::InfraNegative, Category::InfraPositive,
                     Category::RegNegative, Category::RegPositive,
                     Category::Placebo}) {
    std::map<std::string, double> sums;
    std::map<std::string, int> counts;
    double row_sum = 0.0;
    int row_n = 0;
    for (const CarRow& r : table.rows) {
      if (r.category != c) continue;
      std::string key;
      switch (by) {
        case DecomposeBy::Asset: key = r.asset; break;
        case DecomposeBy::Category: key = category_token(c); break;
        case DecomposeBy::Tag: {
          auto it = first_tag.find(r.event_id);
          key = it == first_tag.end() ? "untagged" : it->second;
          break;
        }
      }
      sums[key] += r.car;
      ++counts[key];
      row_sum += r.car;
      ++row_n;
    }
    if (row_n == 0) continue;
    DecompositionRow row;
    row.category = c;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [key, sum] : sums) {
      const double m = sum / counts[key];
      row.cell_means[key] = m;
      row.cell_counts[key] = counts[key];
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    row.row_mean = row_sum / row_n;
    row.row_count = row_n;
    row.spread = hi - lo;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace evk
