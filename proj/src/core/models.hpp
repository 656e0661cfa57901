#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/events.hpp"
#include "core/panel.hpp"
#include "core/windows.hpp"

namespace evk {

enum class ModelKind { ConstantMean, MarketModel };

// A return series aligned with a ReturnPanel's date axis.
using Series = std::vector<Cell>;

struct ModelFit {
  ModelKind kind = ModelKind::ConstantMean;
  double mu = 0.0;       // constant-mean expectation
  double alpha = 0.0;    // market-model intercept
  double beta = 0.0;     // market-model slope
  double resid_sd = 0.0; // estimation-window residual sd (n-1 denominator)
  int n_obs = 0;         // realized estimation observations used
};

// Either a fit or a skip with the realized-observation count and a reason
// suitable for the skip log.
struct FitOutcome {
  std::optional<ModelFit> fit;
  int realized = 0;
  std::string skip_reason;
  bool ok() const { return fit.has_value(); }
};

// Equal-weight mean return of all panel assets except `exclude`, per date.
// Needs at least two other assets overall; days with no contributing asset
// are missing.
Series build_ew_proxy(const ReturnPanel& panel,
                      std::optional<std::size_t> exclude);

FitOutcome fit_constant_mean(const ReturnPanel& panel, std::size_t asset,
                             Date event_date, const WindowConfig& w);

// OLS of the asset's return on the proxy over the estimation sample (days
// where both exist).  A zero-variance proxy over the sample -> Degenerate.
FitOutcome fit_market_model(const ReturnPanel& panel, std::size_t asset,
                            const Series& proxy, Date event_date,
                            const WindowConfig& w);

struct CarValue {
  double car = 0.0;
  double sigma_car = 0.0;
  bool significant = false;  // |car| > 2 * sigma_car
  int n_days = 0;            // realized event-window days
};

// Sums abnormal returns over realized window days.  For the market model a
// day counts only when both the asset return and the proxy exist.  Returns
// nullopt when no window day is realized.
std::optional<CarValue> compute_car(const ModelFit& fit,
                                    const ReturnPanel& panel,
                                    std::size_t asset, const Series* proxy,
                                    Date event_date, int tau1, int tau2);

// How expected returns are modeled for the whole panel run.
struct ModelSelector {
  enum class Mode { ConstantMean, MarketProxy, MarketEw } mode = Mode::ConstantMean;
  std::string proxy_asset;  // MarketProxy only

  std::string label() const;
  static ModelSelector parse(const std::string& text);  // throws InvalidArgument
};

struct CarRow {
  std::string event_id;
  Date event_date = 0;
  std::string asset;
  Category category = Category::Excluded;
  ModelKind model = ModelKind::ConstantMean;
  int tau1 = 0, tau2 = 0;
  double car = 0.0;
  double sigma_car = 0.0;
  bool significant = false;
  int n_days = 0;
};

struct SkipRecord {
  std::string event_id;
  std::string asset;
  int realized = 0;
  std::string reason;
};

struct CarTable {
  std::vector<CarRow> rows;  // ordered by (event date, event id, asset)
  std::vector<SkipRecord> skips;
  // Analyzed events in (date, id) order with their category; an event with
  // every asset skipped does not appear.
  std::vector<std::pair<std::string, Category>> event_order;

  std::vector<std::size_t> rows_for_event(const std::string& id) const;
  std::vector<std::string> events_in(Category c) const;
};

// Full pipeline step: winsorize, fit per (event, asset), accumulate CARs.
// Excluded-category events are skipped wholesale.  When the selector is
// MarketProxy and the asset *is* the proxy, the asset falls back to the
// constant-mean model (a series cannot be its own benchmark).
CarTable event_panel_cars(const ReturnPanel& panel, const EventSet& events,
                          const WindowConfig& w, const ModelSelector& selector,
                          std::optional<double> cap);

// CSV with header
// `event_id,asset,category,model,tau1,tau2,car,sigma_car,significant`.
std::string render_car_table(const CarTable& table);

}  // namespace evk
