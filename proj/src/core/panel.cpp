#include "core/panel.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace evk {

namespace {

const std::vector<std::string> kPriceHeader = {"asset", "date",  "open",
                                               "high",  "low",   "close",
                                               "volume"};

template <typename PanelT>
std::optional<std::size_t> find_asset(const PanelT& p, std::string_view name) {
  auto it = std::lower_bound(p.assets.begin(), p.assets.end(), name);
  if (it == p.assets.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - p.assets.begin());
}

template <typename PanelT>
std::optional<std::size_t> find_date(const PanelT& p, Date d) {
  auto it = std::lower_bound(p.dates.begin(), p.dates.end(), d);
  if (it == p.dates.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - p.dates.begin());
}

Cell parse_cell(const std::string& field, const std::string& where) {
  if (field.empty()) return std::nullopt;
  return parse_double_field(field, where);
}

std::string render_cell(const Cell& c) {
  return c ? format_double(*c) : std::string();
}

}  // namespace

std::optional<std::size_t> PricePanel::asset_index(std::string_view name) const {
  return find_asset(*this, name);
}
std::optional<std::size_t> PricePanel::date_index(Date d) const {
  return find_date(*this, d);
}
std::optional<std::size_t> ReturnPanel::asset_index(std::string_view name) const {
  return find_asset(*this, name);
}
std::optional<std::size_t> ReturnPanel::date_index(Date d) const {
  return find_date(*this, d);
}

PricePanel load_price_panel(const std::string& path) {
  CsvReader reader(path);
  reader.expect_header(kPriceHeader);

  struct Row {
    Cell open, high, low, close, volume;
    long line;
  };
  std::map<std::pair<std::string, Date>, Row> cells;
  std::set<std::string> assets;
  std::set<Date> dates;

  std::vector<std::string> f;
  while (reader.next_row(f)) {
    const std::string where = reader.context();
    if (f[0].empty()) fail(ErrorCode::Parse, where + ": empty asset name");
    Date d;
    try {
      d = parse_date(f[1]);
    } catch (const Error& e) {
      fail(ErrorCode::Parse, where + ": " + e.what());
    }
    Row row{parse_cell(f[2], where), parse_cell(f[3], where),
            parse_cell(f[4], where), parse_cell(f[5], where),
            parse_cell(f[6], where), reader.line_number()};
    if (row.close && *row.close <= 0.0)
      fail(ErrorCode::Validation,
           where + ": close must be strictly positive, got " + f[5]);
    auto key = std::make_pair(f[0], d);
    auto [it, inserted] = cells.emplace(key, row);
    if (!inserted)
      fail(ErrorCode::Conflict, where + ": duplicate (asset,date) row for " +
                                    f[0] + " " + format_date(d) +
                                    " (first seen at line " +
                                    std::to_string(it->second.line) + ")");
    assets.insert(f[0]);
    dates.insert(d);
  }

  PricePanel p;
  p.assets.assign(assets.begin(), assets.end());
  p.dates.assign(dates.begin(), dates.end());
  const std::size_t n = p.assets.size() * p.dates.size();
  p.open.assign(n, std::nullopt);
  p.high.assign(n, std::nullopt);
  p.low.assign(n, std::nullopt);
  p.close.assign(n, std::nullopt);
  p.volume.assign(n, std::nullopt);
  for (const auto& [key, row] : cells) {
    const std::size_t a = *p.asset_index(key.first);
    const std::size_t t = *p.date_index(key.second);
    const std::size_t i = p.at(a, t);
    p.open[i] = row.open;
    p.high[i] = row.high;
    p.low[i] = row.low;
    p.close[i] = row.close;
    p.volume[i] = row.volume;
  }
  return p;
}

std::string render_price_panel(const PricePanel& panel) {
  CsvWriter w;
  w.row(kPriceHeader);
  for (std::size_t a = 0; a < panel.n_assets(); ++a) {
    for (std::size_t t = 0; t < panel.n_dates(); ++t) {
      const std::size_t i = panel.at(a, t);
      // A row is emitted only where at least one field is present.
      if (!panel.open[i] && !panel.high[i] && !panel.low[i] &&
          !panel.close[i] && !panel.volume[i])
        continue;
      w.row({panel.assets[a], format_date(panel.dates[t]),
             render_cell(panel.open[i]), render_cell(panel.high[i]),
             render_cell(panel.low[i]), render_cell(panel.close[i]),
             render_cell(panel.volume[i])});
    }
  }
  return w.str();
}

void save_price_panel(const PricePanel& panel, const std::string& path) {
  write_file_atomic(path, render_price_panel(panel));
}

ReturnPanel compute_returns(const PricePanel& panel) {
  ReturnPanel r;
  r.assets = panel.assets;
  r.dates = panel.dates;
  r.returns.assign(panel.n_assets() * panel.n_dates(), std::nullopt);
  for (std::size_t a = 0; a < panel.n_assets(); ++a) {
    for (std::size_t t = 1; t < panel.n_dates(); ++t) {
      if (panel.dates[t - 1] != panel.dates[t] - 1) continue;  // calendar hole
      const Cell& prev = panel.close[panel.at(a, t - 1)];
      const Cell& cur = panel.close[panel.at(a, t)];
      if (prev && cur) r.returns[r.at(a, t)] = *cur / *prev - 1.0;
    }
  }
  return r;
}

ReturnPanel winsorize_returns(const ReturnPanel& panel,
                              std::optional<double> cap) {
  if (cap && *cap <= 0.0)
    fail(ErrorCode::InvalidArgument,
         "winsorize cap must be positive, got " + format_double(*cap));
  ReturnPanel out = panel;
  if (!cap) return out;
  for (auto& c : out.returns)
    if (c) *c = std::clamp(*c, -*cap, *cap);
  return out;
}

ReturnPanel select_assets(const ReturnPanel& panel,
                          const std::vector<std::string>& names) {
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  ReturnPanel out;
  out.assets = sorted;
  out.dates = panel.dates;
  out.returns.assign(sorted.size() * panel.n_dates(), std::nullopt);
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    auto src = panel.asset_index(sorted[a]);
    if (!src)
      fail(ErrorCode::InvalidArgument,
           "asset '" + sorted[a] + "' not present in the panel");
    for (std::size_t t = 0; t < panel.n_dates(); ++t)
      out.returns[out.at(a, t)] = panel.ret(*src, t);
  }
  return out;
}

}  // namespace evk
