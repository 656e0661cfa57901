#include "eventkit/eventkit.h"

#include <cstring>
#include <exception>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/inference.hpp"
#include "core/power.hpp"
#include "core/runner.hpp"

namespace {

thread_local std::string g_last_error;

evk_status status_from(evk::ErrorCode code) {
  return static_cast<evk_status>(static_cast<int>(code));
}

evk_status set_error(evk_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

evk_status invalid(const std::string& msg) {
  return set_error(EVK_ERR_INVALID_ARGUMENT, msg);
}

void copy_string(const std::string& src, char* dst, size_t capacity) {
  if (dst == nullptr || capacity == 0) return;
  const size_t n = std::min(src.size(), capacity - 1);
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

// Runs the body, translating exceptions into status codes.
template <typename Fn>
evk_status guarded(Fn&& fn) {
  try {
    fn();
    return EVK_OK;
  } catch (const evk::Error& e) {
    return set_error(status_from(e.code()), e.what());
  } catch (const std::exception& e) {
    return set_error(EVK_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(EVK_ERR_INTERNAL, "unknown error");
  }
}

struct ReturnsHandle {
  evk::ReturnPanel panel;
};
struct EventsHandle {
  evk::EventSet set;
};
struct CarsHandle {
  evk::CarTable table;
};
struct ConfigHandle {
  evk::RunConfig cfg;
};

evk::Weighting parse_weighting(const char* w) {
  if (w == nullptr) evk::fail(evk::ErrorCode::InvalidArgument, "weighting is NULL");
  return evk::weighting_from_token(w);
}

evk::Category parse_category(const char* c) {
  if (c == nullptr) evk::fail(evk::ErrorCode::InvalidArgument, "category is NULL");
  return evk::category_from_token(c);
}

void fill_interval(const evk::BootstrapResult& r, evk_interval* out) {
  out->estimate = r.estimate;
  out->se = r.se;
  out->ci_low = r.ci_low;
  out->ci_high = r.ci_high;
  out->p_value = r.p_value;
  out->replications = r.replications;
}

}  // namespace

extern "C" {

const char* evk_version(void) { return "0.1.0"; }

const char* evk_last_error(void) { return g_last_error.c_str(); }

evk_status evk_config_create(evk_config** out) {
  if (out == nullptr) return invalid("out is NULL");
  return guarded([&] {
    *out = reinterpret_cast<evk_config*>(new ConfigHandle{evk::default_config()});
  });
}

evk_status evk_config_load_file(evk_config* cfg, const char* path) {
  if (cfg == nullptr) return invalid("config is NULL");
  if (path == nullptr) return invalid("path is NULL");
  return guarded([&] {
    evk::apply_config_file(reinterpret_cast<ConfigHandle*>(cfg)->cfg, path);
  });
}

evk_status evk_config_set(evk_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr) return invalid("config is NULL");
  if (key == nullptr || value == nullptr) return invalid("key/value is NULL");
  return guarded([&] {
    evk::apply_config_kv(reinterpret_cast<ConfigHandle*>(cfg)->cfg, key, value);
  });
}

evk_status evk_config_hash(const evk_config* cfg, uint64_t* out) {
  if (cfg == nullptr || out == nullptr) return invalid("config/out is NULL");
  return guarded([&] {
    *out = evk::config_hash(reinterpret_cast<const ConfigHandle*>(cfg)->cfg);
  });
}

void evk_config_free(evk_config* cfg) {
  delete reinterpret_cast<ConfigHandle*>(cfg);
}

evk_status evk_returns_load(const char* prices_csv_path, evk_returns** out) {
  if (prices_csv_path == nullptr || out == nullptr)
    return invalid("path/out is NULL");
  return guarded([&] {
    auto* h = new ReturnsHandle;
    try {
      h->panel = evk::compute_returns(evk::load_price_panel(prices_csv_path));
    } catch (...) {
      delete h;
      throw;
    }
    *out = reinterpret_cast<evk_returns*>(h);
  });
}

evk_status evk_returns_shape(const evk_returns* r, size_t* n_assets,
                             size_t* n_dates) {
  if (r == nullptr) return invalid("returns handle is NULL");
  const auto* h = reinterpret_cast<const ReturnsHandle*>(r);
  if (n_assets) *n_assets = h->panel.n_assets();
  if (n_dates) *n_dates = h->panel.n_dates();
  return EVK_OK;
}

void evk_returns_free(evk_returns* r) { delete reinterpret_cast<ReturnsHandle*>(r); }

evk_status evk_events_load(const char* events_csv_path, int overlap_horizon,
                           evk_events** out) {
  if (events_csv_path == nullptr || out == nullptr)
    return invalid("path/out is NULL");
  return guarded([&] {
    auto* h = new EventsHandle;
    try {
      h->set = evk::detect_overlaps(evk::load_events(events_csv_path),
                                    overlap_horizon);
    } catch (...) {
      delete h;
      throw;
    }
    *out = reinterpret_cast<evk_events*>(h);
  });
}

evk_status evk_events_count(const evk_events* e, size_t* out) {
  if (e == nullptr || out == nullptr) return invalid("events/out is NULL");
  *out = reinterpret_cast<const EventsHandle*>(e)->set.size();
  return EVK_OK;
}

void evk_events_free(evk_events* e) { delete reinterpret_cast<EventsHandle*>(e); }

evk_status evk_cars_compute(const evk_returns* r, const evk_events* e,
                            const evk_config* cfg, evk_cars** out) {
  if (r == nullptr || e == nullptr || cfg == nullptr || out == nullptr)
    return invalid("returns/events/config/out is NULL");
  return guarded([&] {
    const auto& rc = reinterpret_cast<const ConfigHandle*>(cfg)->cfg;
    const auto& panel = reinterpret_cast<const ReturnsHandle*>(r)->panel;
    const auto& events = reinterpret_cast<const EventsHandle*>(e)->set;
    auto* h = new CarsHandle;
    try {
      h->table = evk::event_panel_cars(panel, events, rc.window,
                                       evk::ModelSelector::parse(rc.model),
                                       rc.cap);
    } catch (...) {
      delete h;
      throw;
    }
    *out = reinterpret_cast<evk_cars*>(h);
  });
}

evk_status evk_cars_count(const evk_cars* c, size_t* out) {
  if (c == nullptr || out == nullptr) return invalid("cars/out is NULL");
  *out = reinterpret_cast<const CarsHandle*>(c)->table.rows.size();
  return EVK_OK;
}

evk_status evk_cars_row(const evk_cars* c, size_t index, evk_car_row* out) {
  if (c == nullptr || out == nullptr) return invalid("cars/out is NULL");
  const auto& table = reinterpret_cast<const CarsHandle*>(c)->table;
  if (index >= table.rows.size())
    return invalid("row index " + std::to_string(index) + " out of range (" +
                   std::to_string(table.rows.size()) + " rows)");
  const evk::CarRow& row = table.rows[index];
  std::memset(out, 0, sizeof *out);
  copy_string(row.event_id, out->event_id, sizeof out->event_id);
  copy_string(row.asset, out->asset, sizeof out->asset);
  copy_string(std::string(evk::category_token(row.category)), out->category,
              sizeof out->category);
  copy_string(row.model == evk::ModelKind::ConstantMean ? "constant-mean"
                                                        : "market",
              out->model, sizeof out->model);
  out->tau1 = row.tau1;
  out->tau2 = row.tau2;
  out->car = row.car;
  out->sigma_car = row.sigma_car;
  out->significant = row.significant ? 1 : 0;
  out->n_days = row.n_days;
  return EVK_OK;
}

void evk_cars_free(evk_cars* c) { delete reinterpret_cast<CarsHandle*>(c); }

evk_status evk_event_means(const evk_cars* c, const char* category,
                           double* buf, size_t capacity, size_t* n_events) {
  if (c == nullptr || n_events == nullptr) return invalid("cars/n_events is NULL");
  return guarded([&] {
    const auto& table = reinterpret_cast<const CarsHandle*>(c)->table;
    auto means = evk::event_level_means(table, parse_category(category));
    *n_events = means.size();
    if (buf == nullptr || capacity == 0) return;  // size query
    if (capacity < means.size())
      evk::fail(evk::ErrorCode::InvalidArgument,
                "event means buffer holds " + std::to_string(capacity) +
                    " but " + std::to_string(means.size()) + " are needed");
    for (size_t i = 0; i < means.size(); ++i) buf[i] = means[i].second;
  });
}

evk_status evk_bootstrap_mean(const evk_cars* c, const char* category,
                              const char* weighting, int64_t B, uint64_t seed,
                              double ci_level, int threads, evk_interval* out) {
  if (c == nullptr || out == nullptr) return invalid("cars/out is NULL");
  return guarded([&] {
    const auto& table = reinterpret_cast<const CarsHandle*>(c)->table;
    auto r = evk::block_bootstrap_mean(table, parse_category(category),
                                       parse_weighting(weighting), B, seed,
                                       ci_level, threads);
    fill_interval(r, out);
  });
}

evk_status evk_bootstrap_diff(const evk_cars* c, const char* category_a,
                              const char* category_b, const char* weighting,
                              int64_t B, uint64_t seed, double ci_level,
                              int threads, evk_interval* out) {
  if (c == nullptr || out == nullptr) return invalid("cars/out is NULL");
  return guarded([&] {
    const auto& table = reinterpret_cast<const CarsHandle*>(c)->table;
    auto r = evk::block_bootstrap_diff(table, parse_category(category_a),
                                       parse_category(category_b),
                                       parse_weighting(weighting), B, seed,
                                       ci_level, threads);
    fill_interval(r, out);
  });
}

evk_status evk_permutation_test(const double* group_a, size_t n_a,
                                const double* group_b, size_t n_b,
                                uint64_t max_exact, uint64_t seed,
                                double* observed_diff, double* p_value,
                                uint64_t* n_assignments, int32_t* exact) {
  if (group_a == nullptr || group_b == nullptr)
    return invalid("group data is NULL");
  return guarded([&] {
    auto r = evk::permutation_test({group_a, n_a}, {group_b, n_b}, max_exact,
                                   seed);
    if (observed_diff) *observed_diff = r.observed_diff;
    if (p_value) *p_value = r.p_value;
    if (n_assignments) *n_assignments = r.n_assignments;
    if (exact) *exact = r.exact ? 1 : 0;
  });
}

evk_status evk_welch_t(const double* group_a, size_t n_a,
                       const double* group_b, size_t n_b, double ci_level,
                       evk_t_result* out) {
  if (group_a == nullptr || group_b == nullptr || out == nullptr)
    return invalid("group data/out is NULL");
  return guarded([&] {
    auto r = evk::welch_t_test({group_a, n_a}, {group_b, n_b}, ci_level);
    out->diff = r.diff;
    out->se = r.se;
    out->t_stat = r.t_stat;
    out->df = r.df;
    out->p_value = r.p_value;
    out->ci_low = r.ci_low;
    out->ci_high = r.ci_high;
  });
}

evk_status evk_adjust_t(double t, int64_t n, double rho_bar, double* out) {
  if (out == nullptr) return invalid("out is NULL");
  return guarded([&] { *out = evk::adjust_t_for_correlation(t, n, rho_bar); });
}

evk_status evk_z_quantile(double p, double* out) {
  if (out == nullptr) return invalid("out is NULL");
  return guarded([&] { *out = evk::z_quantile(p); });
}

evk_status evk_required_events(double alpha, double power, double d,
                               int64_t* out) {
  if (out == nullptr) return invalid("out is NULL");
  return guarded([&] {
    *out = evk::required_events_per_group(alpha, power, d);
  });
}

evk_status evk_mde(double alpha, double power, double sigma, int64_t n1,
                   int64_t n2, double* out) {
  if (out == nullptr) return invalid("out is NULL");
  return guarded([&] {
    *out = evk::minimum_detectable_effect(alpha, power, sigma, n1, n2);
  });
}

evk_status evk_run(const evk_config* cfg, const char* subcommand,
                   char* summary, size_t summary_capacity) {
  if (cfg == nullptr || subcommand == nullptr)
    return invalid("config/subcommand is NULL");
  return guarded([&] {
    auto result = evk::run_pipeline(
        reinterpret_cast<const ConfigHandle*>(cfg)->cfg, subcommand);
    copy_string(result.summary, summary, summary_capacity);
  });
}

}  // extern "C"
