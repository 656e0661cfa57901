#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/dates.hpp"

namespace evk {

// Rectangular panels: assets sorted lexicographically, dates strictly
// increasing.  Cells are optional — crypto venues occasionally have holes and
// assets list on different dates, so missingness is first-class.
using Cell = std::optional<double>;

struct PricePanel {
  std::vector<std::string> assets;
  std::vector<Date> dates;
  // Field matrices, row-major by asset: index = asset * dates.size() + t.
  std::vector<Cell> open, high, low, close, volume;

  std::size_t n_assets() const { return assets.size(); }
  std::size_t n_dates() const { return dates.size(); }
  std::size_t at(std::size_t a, std::size_t t) const { return a * dates.size() + t; }

  std::optional<std::size_t> asset_index(std::string_view name) const;
  std::optional<std::size_t> date_index(Date d) const;  // binary search
};

struct ReturnPanel {
  std::vector<std::string> assets;
  std::vector<Date> dates;
  std::vector<Cell> returns;  // same layout as PricePanel matrices

  std::size_t n_assets() const { return assets.size(); }
  std::size_t n_dates() const { return dates.size(); }
  std::size_t at(std::size_t a, std::size_t t) const { return a * dates.size() + t; }
  const Cell& ret(std::size_t a, std::size_t t) const { return returns[at(a, t)]; }

  std::optional<std::size_t> asset_index(std::string_view name) const;
  std::optional<std::size_t> date_index(Date d) const;
};

// Long-format CSV with header `asset,date,open,high,low,close,volume`.
// Empty numeric fields mean "missing".  Errors carry file:line context:
// malformed rows -> Parse, duplicate (asset,date) -> Conflict, close <= 0
// where present -> Validation.
PricePanel load_price_panel(const std::string& path);

// Inverse of load_price_panel; numbers are shortest-round-trip so that
// save(load(f)) == f holds field-for-field.
void save_price_panel(const PricePanel& panel, const std::string& path);
std::string render_price_panel(const PricePanel& panel);

// Simple daily returns close/close - 1.  A return exists on date d only when
// closes exist on both d and the previous calendar day; a hole in the middle
// of a series produces no return spanning the gap.
ReturnPanel compute_returns(const PricePanel& panel);

// Symmetric clamp to [-cap, +cap]; cap = nullopt is the identity.  cap <= 0
// -> InvalidArgument.
ReturnPanel winsorize_returns(const ReturnPanel& panel, std::optional<double> cap);

// Restrict a panel to a subset of assets (names must all be present).
ReturnPanel select_assets(const ReturnPanel& panel,
                          const std::vector<std::string>& names);

}  // namespace evk
