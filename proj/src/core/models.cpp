#include "core/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace evk {

namespace {

// Indices (into the panel's date axis) of the estimation sample for an event:
// the last up-to `estimation_length` dates with a realized return (and, for
// the market model, a realized proxy) on or before event - gap - 1.
std::vector<std::size_t> estimation_indices(const ReturnPanel& panel,
                                            std::size_t asset,
                                            const Series* proxy,
                                            Date event_date,
                                            const WindowConfig& w) {
  const Date cutoff = event_date - w.gap_length - 1;
  auto upper = std::upper_bound(panel.dates.begin(), panel.dates.end(), cutoff);
  std::vector<std::size_t> idx;
  idx.reserve(static_cast<std::size_t>(w.estimation_length));
  for (auto it = upper; it != panel.dates.begin() &&
                        idx.size() < static_cast<std::size_t>(w.estimation_length);) {
    --it;
    const auto t = static_cast<std::size_t>(it - panel.dates.begin());
    if (!panel.ret(asset, t)) continue;
    if (proxy && !(*proxy)[t]) continue;
    idx.push_back(t);
  }
  std::reverse(idx.begin(), idx.end());  // chronological
  return idx;
}

}  // namespace

Series build_ew_proxy(const ReturnPanel& panel, std::optional<std::size_t> exclude) {
  const std::size_t others = panel.n_assets() - (exclude ? 1 : 0);
  if (others < 2)
    fail(ErrorCode::InvalidArgument,
         "equal-weight proxy needs at least two other assets, have " +
             std::to_string(others));
  Series proxy(panel.n_dates(), std::nullopt);
  for (std::size_t t = 0; t < panel.n_dates(); ++t) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t a = 0; a < panel.n_assets(); ++a) {
      if (exclude && a == *exclude) continue;
      const Cell& r = panel.ret(a, t);
      if (r) {
        sum += *r;
        ++n;
      }
    }
    if (n > 0) proxy[t] = sum / n;
  }
  return proxy;
}

FitOutcome fit_constant_mean(const ReturnPanel& panel, std::size_t asset,
                             Date event_date, const WindowConfig& w) {
  w.validate();
  auto idx = estimation_indices(panel, asset, nullptr, event_date, w);
  FitOutcome out;
  out.realized = static_cast<int>(idx.size());
  if (out.realized < w.estimation_min) {
    out.skip_reason = "estimation window too short (" +
                      std::to_string(out.realized) + " < " +
                      std::to_string(w.estimation_min) + ")";
    return out;
  }
  std::vector<double> y;
  y.reserve(idx.size());
  for (std::size_t t : idx) y.push_back(*panel.ret(asset, t));
  ModelFit fit;
  fit.kind = ModelKind::ConstantMean;
  fit.mu = mean(y);
  fit.n_obs = out.realized;
  double ss = 0.0;
  for (double v : y) ss += (v - fit.mu) * (v - fit.mu);
  fit.resid_sd = std::sqrt(ss / static_cast<double>(y.size() - 1));
  out.fit = fit;
  return out;
}

FitOutcome fit_market_model(const ReturnPanel& panel, std::size_t asset,
                            const Series& proxy, Date event_date,
                            const WindowConfig& w) {
  w.validate();
  if (proxy.size() != panel.n_dates())
    fail(ErrorCode::InvalidArgument, "proxy series length mismatch");
  auto idx = estimation_indices(panel, asset, &proxy, event_date, w);
  FitOutcome out;
  out.realized = static_cast<int>(idx.size());
  if (out.realized < w.estimation_min) {
    out.skip_reason = "estimation window too short (" +
                      std::to_string(out.realized) + " < " +
                      std::to_string(w.estimation_min) + ")";
    return out;
  }
  const auto n = static_cast<double>(idx.size());
  double sx = 0.0, sy = 0.0, sxx_raw = 0.0;
  for (std::size_t t : idx) {
    sx += *proxy[t];
    sy += *panel.ret(asset, t);
    sxx_raw += *proxy[t] * *proxy[t];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t t : idx) {
    const double dx = *proxy[t] - mx;
    sxx += dx * dx;
    sxy += dx * (*panel.ret(asset, t) - my);
  }
  // A constant proxy still picks up rounding jitter through the mean, so sxx
  // lands at the summation noise floor (~ sum(x^2) * (n*eps)^2) instead of
  // exactly zero. Variance at or below that floor cannot identify beta.
  const double eps = std::numeric_limits<double>::epsilon();
  if (sxx <= sxx_raw * n * n * eps * eps)
    fail(ErrorCode::Degenerate,
         "proxy has zero variance over the estimation window for asset '" +
             panel.assets[asset] + "'");
  ModelFit fit;
  fit.kind = ModelKind::MarketModel;
  fit.beta = sxy / sxx;
  fit.alpha = my - fit.beta * mx;
  fit.n_obs = out.realized;
  double ss = 0.0;
  for (std::size_t t : idx) {
    const double resid = *panel.ret(asset, t) - fit.alpha - fit.beta * *proxy[t];
    ss += resid * resid;
  }
  fit.resid_sd = std::sqrt(ss / (n - 1.0));
  out.fit = fit;
  return out;
}

std::optional<CarValue> compute_car(const ModelFit& fit,
                                    const ReturnPanel& panel,
                                    std::size_t asset, const Series* proxy,
                                    Date event_date, int tau1, int tau2) {
  if (tau1 > tau2)
    fail(ErrorCode::InvalidArgument, "compute_car: tau1 > tau2");
  if (fit.kind == ModelKind::MarketModel && proxy == nullptr)
    fail(ErrorCode::InvalidArgument, "market-model CAR needs a proxy series");
  double car = 0.0;
  int n_days = 0;
  for (int tau = tau1; tau <= tau2; ++tau) {
    auto t = panel.date_index(event_date + tau);
    if (!t) continue;
    const Cell& r = panel.ret(asset, *t);
    if (!r) continue;
    double expected;
    if (fit.kind == ModelKind::ConstantMean) {
      expected = fit.mu;
    } else {
      const Cell& m = (*proxy)[*t];
      if (!m) continue;
      expected = fit.alpha + fit.beta * *m;
    }
    car += *r - expected;
    ++n_days;
  }
  if (n_days == 0) return std::nullopt;
  CarValue v;
  v.car = car;
  v.n_days = n_days;
  v.sigma_car = fit.resid_sd * std::sqrt(static_cast<double>(n_days));
  v.significant = std::fabs(v.car) > 2.0 * v.sigma_car;
  return v;
}

std::string ModelSelector::label() const {
  switch (mode) {
    case Mode::ConstantMean: return "constant-mean";
    case Mode::MarketProxy: return "market-proxy:" + proxy_asset;
    case Mode::MarketEw: return "market-ew";
  }
  fail(ErrorCode::Internal, "unreachable model mode");
}

ModelSelector ModelSelector::parse(const std::string& text) {
  ModelSelector s;
  if (text == "constant-mean") {
    s.mode = Mode::ConstantMean;
  } else if (text == "market-ew") {
    s.mode = Mode::MarketEw;
  } else if (text.rfind("market-proxy:", 0) == 0 &&
             text.size() > std::string("market-proxy:").size()) {
    s.mode = Mode::MarketProxy;
    s.proxy_asset = text.substr(std::string("market-proxy:").size());
  } else {
    fail(ErrorCode::InvalidArgument,
         "unknown model '" + text +
             "' (want constant-mean, market-proxy:<asset>, or market-ew)");
  }
  return s;
}

std::vector<std::size_t> CarTable::rows_for_event(const std::string& id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].event_id == id) out.push_back(i);
  return out;
}

std::vector<std::string> CarTable::events_in(Category c) const {
  std::vector<std::string> out;
  for (const auto& [id, cat] : event_order)
    if (cat == c) out.push_back(id);
  return out;
}

CarTable event_panel_cars(const ReturnPanel& panel, const EventSet& events,
                          const WindowConfig& w, const ModelSelector& selector,
                          std::optional<double> cap) {
  w.validate();
  const ReturnPanel rp = winsorize_returns(panel, cap);

  // Proxy series are built from the capped panel so that the benchmark sees
  // the same tail treatment as the assets.
  Series shared_proxy;
  std::optional<std::size_t> shared_proxy_asset;
  if (selector.mode == ModelSelector::Mode::MarketProxy) {
    auto a = rp.asset_index(selector.proxy_asset);
    if (!a)
      fail(ErrorCode::InvalidArgument,
           "proxy asset '" + selector.proxy_asset + "' not present in the panel");
    shared_proxy_asset = *a;
    shared_proxy.assign(rp.n_dates(), std::nullopt);
    for (std::size_t t = 0; t < rp.n_dates(); ++t)
      shared_proxy[t] = rp.ret(*shared_proxy_asset, t);
  }
  std::vector<Series> ew_proxies;  // per excluded asset
  if (selector.mode == ModelSelector::Mode::MarketEw) {
    ew_proxies.reserve(rp.n_assets());
    for (std::size_t a = 0; a < rp.n_assets(); ++a)
      ew_proxies.push_back(build_ew_proxy(rp, a));
  }

  CarTable table;
  for (const Event& ev : events.events) {
    if (ev.category == Category::Excluded) {
      table.skips.push_back({ev.id, "*", 0, "excluded-category event"});
      continue;
    }
    bool any_row = false;
    for (std::size_t a = 0; a < rp.n_assets(); ++a) {
      const Series* proxy = nullptr;
      bool constant_mean = selector.mode == ModelSelector::Mode::ConstantMean;
      if (selector.mode == ModelSelector::Mode::MarketProxy) {
        if (shared_proxy_asset && a == *shared_proxy_asset)
          constant_mean = true;  // the proxy cannot benchmark itself
        else
          proxy = &shared_proxy;
      } else if (selector.mode == ModelSelector::Mode::MarketEw) {
        proxy = &ew_proxies[a];
      }
      FitOutcome fit = constant_mean
                           ? fit_constant_mean(rp, a, ev.date, w)
                           : fit_market_model(rp, a, *proxy, ev.date, w);
      if (!fit.ok()) {
        table.skips.push_back({ev.id, rp.assets[a], fit.realized, fit.skip_reason});
        continue;
      }
      auto car = compute_car(*fit.fit, rp, a, proxy, ev.date, w.tau1, w.tau2);
      if (!car) {
        table.skips.push_back(
            {ev.id, rp.assets[a], fit.realized, "no realized event-window days"});
        continue;
      }
      CarRow row;
      row.event_id = ev.id;
      row.event_date = ev.date;
      row.asset = rp.assets[a];
      row.category = ev.category;
      row.model = fit.fit->kind;
      row.tau1 = w.tau1;
      row.tau2 = w.tau2;
      row.car = car->car;
      row.sigma_car = car->sigma_car;
      row.significant = car->significant;
      row.n_days = car->n_days;
      table.rows.push_back(std::move(row));
      any_row = true;
    }
    if (any_row) table.event_order.emplace_back(ev.id, ev.category);
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const CarRow& a, const CarRow& b) {
              return std::tie(a.event_date, a.event_id, a.asset) <
                     std::tie(b.event_date, b.event_id, b.asset);
            });
  return table;
}

std::string render_car_table(const CarTable& table) {
  CsvWriter w;
  w.row({"event_id", "asset", "category", "model", "tau1", "tau2", "car",
         "sigma_car", "significant"});
  for (const CarRow& r : table.rows) {
    w.row({r.event_id, r.asset, std::string(category_token(r.category)),
           r.model == ModelKind::ConstantMean ? "constant-mean" : "market",
           std::to_string(r.tau1), std::to_string(r.tau2), format_double(r.car),
           format_double(r.sigma_car), r.significant ? "1" : "0"});
  }
  return w.str();
}

}  // namespace evk
