#include "core/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace evk {

void SimSpec::validate() const {
  window.validate();
  if (n_assets < 1) fail(ErrorCode::InvalidArgument, "sim needs >= 1 asset");
  if (n_events < 1) fail(ErrorCode::InvalidArgument, "sim needs >= 1 event");
  if (!(rho >= 0.0 && rho < 1.0))
    fail(ErrorCode::InvalidArgument, "sim rho must lie in [0,1)");
  if (!(daily_sd > 0.0))
    fail(ErrorCode::InvalidArgument, "sim daily_sd must be positive");
  if (trials < 1) fail(ErrorCode::InvalidArgument, "sim trials must be >= 1");
  const int needed = window.estimation_length + window.gap_length + window.tau2 + 1;
  if (days_per_event < needed)
    fail(ErrorCode::Infeasible,
         "days_per_event " + std::to_string(days_per_event) +
             " cannot host an estimation window plus gap plus event window (need >= " +
             std::to_string(needed) + ")");
}

std::pair<ReturnPanel, EventSet> simulate_panel(const SimSpec& spec,
                                                int trial_index) {
  spec.validate();
  if (trial_index < 0)
    fail(ErrorCode::InvalidArgument, "trial index must be >= 0");

  // Day 0 carries no return (as if it were the first close); block j starts
  // at day 1 + j*days_per_event and hosts event j at estimation + gap days in.
  const int n_days = 1 + spec.n_events * spec.days_per_event;
  const Date base = parse_date("2015-01-01");

  ReturnPanel panel;
  panel.assets.reserve(static_cast<std::size_t>(spec.n_assets));
  char name[16];
  for (int a = 0; a < spec.n_assets; ++a) {
    std::snprintf(name, sizeof name, "SIM%02d", a);
    panel.assets.emplace_back(name);
  }
  panel.dates.resize(static_cast<std::size_t>(n_days));
  for (int t = 0; t < n_days; ++t) panel.dates[static_cast<std::size_t>(t)] = base + t;
  panel.returns.assign(panel.n_assets() * panel.n_dates(), std::nullopt);

  EventSet events;
  std::vector<char> in_window(static_cast<std::size_t>(n_days), 0);
  for (int j = 0; j < spec.n_events; ++j) {
    const int event_day = 1 + j * spec.days_per_event +
                          spec.window.estimation_length + spec.window.gap_length;
    char id[24];
    std::snprintf(id, sizeof id, "sim_e%03d", j + 1);
    Event e;
    e.id = id;
    e.date = base + event_day;
    e.name = "synthetic shock";
    e.category = Category::InfraNegative;
    e.selection = Selection::Exogenous;
    events.events.push_back(std::move(e));
    for (int tau = spec.window.tau1; tau <= spec.window.tau2; ++tau) {
      const int t = event_day + tau;
      if (t >= 1 && t < n_days) in_window[static_cast<std::size_t>(t)] = 1;
    }
  }
  events.period_start = events.events.front().date;
  events.period_end = events.events.back().date;

  const double load_f = std::sqrt(spec.rho);
  const double load_e = std::sqrt(1.0 - spec.rho);
  Rng rng(spec.seed, static_cast<std::uint64_t>(trial_index));
  for (int t = 1; t < n_days; ++t) {
    const double f = rng.next_normal();
    for (int a = 0; a < spec.n_assets; ++a) {
      const double e = rng.next_normal();
      double r = spec.daily_sd * (load_f * f + load_e * e);
      if (in_window[static_cast<std::size_t>(t)]) r += spec.delta;
      panel.returns[panel.at(static_cast<std::size_t>(a),
                             static_cast<std::size_t>(t))] = r;
    }
  }
  return {std::move(panel), std::move(events)};
}

CalibrationReport coverage_study(const SimSpec& spec, double alpha,
                                 long long B, Weighting scheme, int threads) {
  spec.validate();
  if (spec.trials < 200)
    fail(ErrorCode::InvalidArgument,
         "coverage study needs >= 200 trials for stable rates, got " +
             std::to_string(spec.trials));
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");

  const double true_mean =
      spec.delta * static_cast<double>(spec.window.window_span());
  const ModelSelector selector;  // constant-mean

  struct TrialOut {
    bool naive_reject = false;
    bool boot_reject = false;
    bool covered = false;
    double estimate = 0.0;
  };
  std::vector<TrialOut> out(static_cast<std::size_t>(spec.trials));

  parallel_for(spec.trials, threads, [&](std::int64_t trial) {
    auto [panel, events] = simulate_panel(spec, static_cast<int>(trial));
    const CarTable table =
        event_panel_cars(panel, events, spec.window, selector, std::nullopt);

    // Naive benchmark: pool every (event, asset) CAR and run a one-sample t
    // against zero as if the observations were independent.
    std::vector<double> pooled;
    for (const CarRow& r : table.rows) pooled.push_back(r.car);
    if (pooled.size() < 2)
      fail(ErrorCode::InsufficientData, "simulated panel produced < 2 CARs");
    const double m = mean(pooled);
    const double se = sample_sd(pooled) / std::sqrt(static_cast<double>(pooled.size()));
    TrialOut& slot = out[static_cast<std::size_t>(trial)];
    if (se == 0.0) {
      slot.naive_reject = m != 0.0;
    } else {
      const double t_stat = m / se;
      const double df = static_cast<double>(pooled.size() - 1);
      slot.naive_reject = student_t_two_sided_p(t_stat, df) < alpha;
    }

    const BootstrapResult boot = block_bootstrap_mean(
        table, Category::InfraNegative, scheme, B,
        Rng::mix(spec.seed, static_cast<std::uint64_t>(trial)), 0.95, 1);
    slot.boot_reject = boot.p_value < alpha;
    slot.covered = boot.ci_low <= true_mean && true_mean <= boot.ci_high;
    slot.estimate = boot.estimate;
  });

  CalibrationReport report;
  report.trials = spec.trials;
  report.alpha = alpha;
  report.B = B;
  report.scheme = scheme;
  report.true_mean_car = true_mean;
  double sum_est = 0.0;
  for (const TrialOut& t : out) {
    report.naive_rejection_rate += t.naive_reject ? 1.0 : 0.0;
    report.bootstrap_rejection_rate += t.boot_reject ? 1.0 : 0.0;
    report.bootstrap_ci_coverage += t.covered ? 1.0 : 0.0;
    sum_est += t.estimate;
  }
  const auto n = static_cast<double>(spec.trials);
  report.naive_rejection_rate /= n;
  report.bootstrap_rejection_rate /= n;
  report.bootstrap_ci_coverage /= n;
  report.mean_estimate = sum_est / n;
  double ss = 0.0;
  for (const TrialOut& t : out)
    ss += (t.estimate - report.mean_estimate) * (t.estimate - report.mean_estimate);
  report.se_mean_estimate = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return report;
}

}  // namespace evk
