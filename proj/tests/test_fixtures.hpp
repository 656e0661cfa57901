#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "core/dates.hpp"
#include "core/events.hpp"
#include "core/panel.hpp"
#include "core/rng.hpp"

// Builders for synthetic panels and registries used across test files.
namespace testutil {

// Consecutive-day ReturnPanel from explicit per-asset return columns; use
// NAN for a missing cell.  Day 0 is forced missing (no prior close).
inline evk::ReturnPanel make_returns(
    const std::vector<std::string>& assets, evk::Date start,
    const std::vector<std::vector<double>>& columns) {
  evk::ReturnPanel p;
  p.assets = assets;
  const std::size_t n_dates = columns.front().size();
  for (std::size_t t = 0; t < n_dates; ++t)
    p.dates.push_back(start + static_cast<evk::Date>(t));
  p.returns.assign(assets.size() * n_dates, std::nullopt);
  for (std::size_t a = 0; a < assets.size(); ++a) {
    for (std::size_t t = 1; t < n_dates; ++t) {
      const double v = columns[a][t];
      if (!std::isnan(v)) p.returns[p.at(a, t)] = v;
    }
  }
  return p;
}

// Gaussian return columns, deterministic in (seed).
inline std::vector<std::vector<double>> gaussian_columns(std::size_t n_assets,
                                                         std::size_t n_dates,
                                                         double sd,
                                                         std::uint64_t seed) {
  std::vector<std::vector<double>> cols(n_assets,
                                        std::vector<double>(n_dates, 0.0));
  evk::Rng rng(seed, 0);
  for (std::size_t a = 0; a < n_assets; ++a)
    for (std::size_t t = 0; t < n_dates; ++t)
      cols[a][t] = sd * rng.next_normal();
  return cols;
}

inline evk::Event make_event(const std::string& id, const std::string& date,
                             evk::Category cat,
                             evk::Selection sel = evk::Selection::Exogenous) {
  evk::Event e;
  e.id = id;
  e.date = evk::parse_date(date);
  e.name = id;
  e.category = cat;
  e.selection = sel;
  return e;
}

inline evk::EventSet make_event_set(std::vector<evk::Event> events) {
  evk::EventSet s;
  s.events = std::move(events);
  std::sort(s.events.begin(), s.events.end(),
            [](const evk::Event& a, const evk::Event& b) {
              return std::tie(a.date, a.id) < std::tie(b.date, b.id);
            });
  if (!s.events.empty()) {
    s.period_start = s.events.front().date;
    s.period_end = s.events.back().date;
  }
  return s;
}

}  // namespace testutil
