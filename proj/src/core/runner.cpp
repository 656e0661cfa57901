#include "core/runner.hpp"

#include <cmath>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/power.hpp"
#include "core/report.hpp"

namespace evk {

namespace {

std::string fmt4(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct LoadedInputs {
  ReturnPanel returns;
  EventSet events;
};

LoadedInputs load_inputs(const RunConfig& cfg) {
  if (cfg.prices_path.empty())
    fail(ErrorCode::InvalidArgument, "no prices file configured");
  if (cfg.events_path.empty())
    fail(ErrorCode::InvalidArgument, "no events file configured");
  LoadedInputs in;
  const PricePanel prices = load_price_panel(cfg.prices_path);
  in.returns = compute_returns(prices);
  if (!cfg.assets.empty()) in.returns = select_assets(in.returns, cfg.assets);
  in.events = detect_overlaps(load_events(cfg.events_path), cfg.overlap_horizon);
  return in;
}

CarTable build_cars(const RunConfig& cfg, const LoadedInputs& in) {
  return event_panel_cars(in.returns, in.events, cfg.window,
                          ModelSelector::parse(cfg.model), cfg.cap);
}

SweepContext make_sweep_context(const RunConfig& cfg, const LoadedInputs& in) {
  SweepContext ctx;
  ctx.panel = &in.returns;
  ctx.events = &in.events;
  ctx.window = cfg.window;
  ctx.selector = ModelSelector::parse(cfg.model);
  ctx.cap = cfg.cap;
  ctx.scheme = cfg.weighting;
  ctx.group_a = parse_group(cfg.group_a);
  ctx.group_b = parse_group(cfg.group_b);
  ctx.B = cfg.B;
  ctx.seed = cfg.seed;
  ctx.ci_level = cfg.ci_level;
  ctx.threads = cfg.threads;
  return ctx;
}

PlaceboSpec make_placebo_spec(const RunConfig& cfg, const LoadedInputs& in) {
  PlaceboSpec spec;
  spec.n_events = cfg.placebo_n;
  spec.exclusion_horizon = cfg.placebo_horizon;
  spec.seed = cfg.seed;
  if (!cfg.placebo_period.empty()) {
    auto [a, b] = parse_period(cfg.placebo_period);
    spec.period_start = a;
    spec.period_end = b;
  } else {
    if (in.returns.dates.empty())
      fail(ErrorCode::InvalidArgument, "empty panel; cannot derive placebo period");
    spec.period_start = in.returns.dates.front();
    spec.period_end = in.returns.dates.back();
  }
  return spec;
}

// The pseudo-event pipeline: draw dates, run them through the same CAR
// machinery, and test the placebo "category" like a real group.
struct PlaceboOutcome {
  EventSet placebos;
  CarTable table;
  BootstrapResult boot;
  double share_significant = 0.0;
};

PlaceboOutcome run_placebos(const RunConfig& cfg, const LoadedInputs& in) {
  PlaceboOutcome out;
  out.placebos = generate_placebos(in.events, make_placebo_spec(cfg, in));
  out.table = event_panel_cars(in.returns, out.placebos, cfg.window,
                               ModelSelector::parse(cfg.model), cfg.cap);
  out.boot = block_bootstrap_mean(out.table, Category::Placebo, cfg.weighting,
                                  cfg.B, cfg.seed, cfg.ci_level, cfg.threads);
  int sig = 0;
  for (const CarRow& r : out.table.rows) sig += r.significant ? 1 : 0;
  out.share_significant =
      out.table.rows.empty()
          ? 0.0
          : static_cast<double>(sig) / static_cast<double>(out.table.rows.size());
  return out;
}

struct PowerOutcome {
  double sigma = 0.0;  // event-level sd used
  double d = 0.0;
  long long required_n = 0;
  double mde = 0.0;
  long long n1 = 0, n2 = 0;
};

// Fills the power inputs from config where given, otherwise derives them
// from the realized event-level CARs of the two focal groups.
PowerOutcome compute_power(const RunConfig& cfg, const CarTable* table) {
  PowerOutcome out;
  out.n1 = cfg.power_n1;
  out.n2 = cfg.power_n2;
  double sigma = cfg.power_sigma.value_or(0.0);
  double d = cfg.power_d.value_or(0.0);
  if ((!cfg.power_d || !cfg.power_sigma || out.n1 == 0 || out.n2 == 0)) {
    if (table == nullptr)
      fail(ErrorCode::InvalidArgument,
           "power needs d, sigma, n1 and n2 when no CAR data is configured");
    EventGroup ga = extract_group(*table, parse_group(cfg.group_a));
    EventGroup gb = extract_group(*table, parse_group(cfg.group_b));
    if (ga.n_events() < 2 || gb.n_events() < 2)
      fail(ErrorCode::InsufficientClusters,
           "power derivation needs >= 2 events in each focal group");
    if (out.n1 == 0) out.n1 = static_cast<long long>(ga.n_events());
    if (out.n2 == 0) out.n2 = static_cast<long long>(gb.n_events());
    if (!cfg.power_sigma) {
      // Pooled event-level sd across the two groups.
      const double va = sample_variance(ga.event_means);
      const double vb = sample_variance(gb.event_means);
      const double na = static_cast<double>(ga.n_events());
      const double nb = static_cast<double>(gb.n_events());
      sigma = std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
    }
    if (!cfg.power_d) {
      const double diff = mean(ga.event_means) - mean(gb.event_means);
      if (sigma <= 0.0)
        fail(ErrorCode::InvalidArgument,
             "cannot standardize the observed difference: sigma is zero");
      d = diff / sigma;
    }
  }
  out.sigma = sigma;
  out.d = d;
  out.required_n = required_events_per_group(cfg.power_alpha, cfg.power_target, d);
  out.mde = minimum_detectable_effect(cfg.power_alpha, cfg.power_target, sigma,
                                      out.n1, out.n2);
  return out;
}

RunResult finish(ArtifactSet& artifacts, std::string summary) {
  RunResult r;
  r.artifacts = artifacts.commit();
  r.summary = std::move(summary);
  return r;
}

}  // namespace

RunResult run_pipeline(const RunConfig& cfg, const std::string& subcommand) {
  ArtifactSet artifacts(cfg.out_dir);

  if (subcommand == "power" && cfg.power_d && cfg.power_sigma &&
      cfg.power_n1 > 0 && cfg.power_n2 > 0) {
    // Pure-formula mode needs no data files.
    PowerOutcome p = compute_power(cfg, nullptr);
    CsvWriter w;
    w.raw_line(provenance_line(cfg));
    w.row({"alpha", "power", "d", "sigma", "n1", "n2", "required_n",
           "mde"});
    w.row({format_double(cfg.power_alpha), format_double(cfg.power_target),
           format_double(p.d), format_double(p.sigma), std::to_string(p.n1),
           std::to_string(p.n2), std::to_string(p.required_n),
           format_double(p.mde)});
    artifacts.add("power.csv", w.str());
    return finish(artifacts,
                  "power: required events/group = " + std::to_string(p.required_n) +
                      ", MDE = " + fmt4(p.mde));
  }

  if (subcommand == "calibrate") {
    SimSpec spec = cfg.sim;
    spec.seed = cfg.seed;
    CalibrationReport rep =
        coverage_study(spec, cfg.sim_alpha, cfg.sim_B, cfg.weighting, cfg.threads);
    artifacts.add("calibration.csv", render_calibration(cfg, rep));
    return finish(
        artifacts,
        "calibrate: naive rejection " + fmt4(rep.naive_rejection_rate) +
            ", bootstrap rejection " + fmt4(rep.bootstrap_rejection_rate) +
            ", CI coverage " + fmt4(rep.bootstrap_ci_coverage) +
            " over " + std::to_string(rep.trials) + " trials");
  }

  LoadedInputs in = load_inputs(cfg);
  const Category cat_a = parse_group(cfg.group_a);
  const Category cat_b = parse_group(cfg.group_b);

  if (subcommand == "cars") {
    CarTable table = build_cars(cfg, in);
    artifacts.add("cars.csv", render_cars_artifact(cfg, table));
    artifacts.add("skips.csv", render_skips(cfg, table));
    return finish(artifacts, "cars: " + std::to_string(table.rows.size()) +
                                 " rows, " + std::to_string(table.skips.size()) +
                                 " skips");
  }

  if (subcommand == "bootstrap") {
    CarTable table = build_cars(cfg, in);
    std::vector<InferenceRow> rows;
    for (const std::string& group : {cfg.group_a, cfg.group_b}) {
      BootstrapResult r =
          block_bootstrap_mean(table, parse_group(group), cfg.weighting, cfg.B,
                               cfg.seed, cfg.ci_level, cfg.threads);
      rows.push_back(row_from_bootstrap("bootstrap_mean", group, "", r));
    }
    artifacts.add("inference.csv", render_inference(cfg, rows));
    return finish(artifacts, "bootstrap: " + cfg.group_a + " mean " +
                                 rows[0].estimate + " (p " + rows[0].p + ")");
  }

  if (subcommand == "diff") {
    CarTable table = build_cars(cfg, in);
    BootstrapResult r = block_bootstrap_diff(table, cat_a, cat_b, cfg.weighting,
                                             cfg.B, cfg.seed, cfg.ci_level,
                                             cfg.threads);
    artifacts.add("inference.csv",
                  render_inference(cfg, {row_from_bootstrap(
                                       "bootstrap_diff", cfg.group_a,
                                       cfg.group_b, r)}));
    return finish(artifacts, "diff: " + fmt4(r.estimate) + " [" +
                                 fmt4(r.ci_low) + ", " + fmt4(r.ci_high) +
                                 "], p " + fmt4(r.p_value));
  }

  if (subcommand == "permute") {
    CarTable table = build_cars(cfg, in);
    EventGroup ga = extract_group(table, cat_a);
    EventGroup gb = extract_group(table, cat_b);
    PermutationResult r = permutation_test(ga.event_means, gb.event_means,
                                           cfg.permute_max_exact, cfg.seed);
    artifacts.add("inference.csv",
                  render_inference(
                      cfg, {row_from_permutation(cfg.group_a, cfg.group_b, r)}));
    return finish(artifacts,
                  "permute: diff " + fmt4(r.observed_diff) + ", p " +
                      fmt4(r.p_value) + (r.exact ? " (exact, " : " (sampled, ") +
                      std::to_string(r.n_assignments) + " assignments)");
  }

  if (subcommand == "im") {
    CarTable table = build_cars(cfg, in);
    EventGroup ga = extract_group(table, cat_a);
    EventGroup gb = extract_group(table, cat_b);
    TTestResult r =
        cluster_mean_t_test(ga.event_means, gb.event_means, cfg.ci_level);
    artifacts.add("inference.csv",
                  render_inference(cfg, {row_from_t_test("cluster_t", cfg.group_a,
                                                         cfg.group_b, r)}));
    return finish(artifacts, "im: t " + fmt4(r.t_stat) + " (df " + fmt4(r.df) +
                                 "), p " + fmt4(r.p_value));
  }

  if (subcommand == "placebo") {
    PlaceboOutcome out = run_placebos(cfg, in);
    artifacts.add("placebo_events.csv",
                  provenance_line(cfg) + "\n" + render_events(out.placebos));
    artifacts.add("placebo_cars.csv", render_cars_artifact(cfg, out.table));
    artifacts.add("inference.csv",
                  render_inference(cfg, {row_from_bootstrap(
                                       "placebo_bootstrap_mean", "Placebo", "",
                                       out.boot)}));
    return finish(artifacts,
                  "placebo: " + std::to_string(out.placebos.size()) +
                      " pseudo-events, mean " + fmt4(out.boot.estimate) +
                      ", share significant " + fmt4(out.share_significant));
  }

  if (subcommand == "loo") {
    CarTable table = build_cars(cfg, in);
    LooReport rep =
        leave_one_out(table, parse_group(cfg.loo_category), cfg.weighting);
    artifacts.add("loo.csv", render_loo(cfg, rep));
    double worst = 0.0;
    for (const LooRow& r : rep.rows)
      worst = std::max(worst, std::fabs(r.pct_change));
    return finish(artifacts, "loo: baseline " + fmt4(rep.baseline) +
                                 ", max |change| " + fmt4(worst));
  }

  if (subcommand == "sweep-window") {
    SweepReport rep =
        sweep_windows(make_sweep_context(cfg, in), parse_window_list(cfg.sweep_windows));
    artifacts.add("sweep_window.csv", render_sweep(cfg, rep));
    return finish(artifacts, "sweep-window: " +
                                 std::to_string(rep.settings.size()) +
                                 " settings");
  }

  if (subcommand == "sweep-cap") {
    SweepReport rep =
        sweep_caps(make_sweep_context(cfg, in), parse_cap_list(cfg.sweep_caps));
    artifacts.add("sweep_cap.csv", render_sweep(cfg, rep));
    return finish(artifacts,
                  "sweep-cap: " + std::to_string(rep.settings.size()) +
                      " settings");
  }

  if (subcommand == "subsample") {
    CarTable table = build_cars(cfg, in);
    SubsampleResult r = subsample_run(
        table, in.events, SubsampleFilter::parse(cfg.subsample_filter), cat_a,
        cat_b, cfg.weighting, cfg.B, cfg.seed, cfg.ci_level,
        cfg.permute_max_exact, cfg.threads);
    artifacts.add("subsample.csv", render_subsample(cfg, r));
    return finish(artifacts, "subsample(" + r.filter_name + "): diff " +
                                 fmt4(r.diff.estimate) + ", p " +
                                 fmt4(r.diff.p_value));
  }

  if (subcommand == "decompose") {
    CarTable table = build_cars(cfg, in);
    Decomposition d = group_decompose(table, in.events,
                                      decompose_by_from_token(cfg.decompose_by));
    artifacts.add("decompose.csv", render_decomposition(cfg, d));
    return finish(artifacts,
                  "decompose: " + std::to_string(d.rows.size()) + " categories");
  }

  if (subcommand == "power") {
    CarTable table = build_cars(cfg, in);
    PowerOutcome p = compute_power(cfg, &table);
    CsvWriter w;
    w.raw_line(provenance_line(cfg));
    w.row({"alpha", "power", "d", "sigma", "n1", "n2", "required_n",
           "mde"});
    w.row({format_double(cfg.power_alpha), format_double(cfg.power_target),
           format_double(p.d), format_double(p.sigma), std::to_string(p.n1),
           std::to_string(p.n2), std::to_string(p.required_n),
           format_double(p.mde)});
    artifacts.add("power.csv", w.str());
    return finish(artifacts,
                  "power: d = " + fmt4(p.d) + ", required events/group = " +
                      std::to_string(p.required_n) + ", MDE = " + fmt4(p.mde));
  }

  if (subcommand == "report") {
    CarTable table = build_cars(cfg, in);

    std::vector<InferenceRow> inference;
    for (const std::string& group : {cfg.group_a, cfg.group_b}) {
      BootstrapResult r =
          block_bootstrap_mean(table, parse_group(group), cfg.weighting, cfg.B,
                               cfg.seed, cfg.ci_level, cfg.threads);
      inference.push_back(row_from_bootstrap("bootstrap_mean", group, "", r));
    }
    BootstrapResult diff =
        block_bootstrap_diff(table, cat_a, cat_b, cfg.weighting, cfg.B,
                             cfg.seed, cfg.ci_level, cfg.threads);
    inference.push_back(
        row_from_bootstrap("bootstrap_diff", cfg.group_a, cfg.group_b, diff));

    EventGroup ga = extract_group(table, cat_a);
    EventGroup gb = extract_group(table, cat_b);
    PermutationResult perm = permutation_test(ga.event_means, gb.event_means,
                                              cfg.permute_max_exact, cfg.seed);
    inference.push_back(row_from_permutation(cfg.group_a, cfg.group_b, perm));
    TTestResult im =
        cluster_mean_t_test(ga.event_means, gb.event_means, cfg.ci_level);

    const double rho_bar =
        mean_cross_correlation(in.returns, in.events, cfg.window,
                               ModelSelector::parse(cfg.model), cfg.cap);
    const long long n_units = static_cast<long long>(in.returns.n_assets());
    const double kp_t = adjust_t_for_correlation(im.t_stat, n_units, rho_bar);
    inference.push_back(row_from_t_test(
        "cluster_t", cfg.group_a, cfg.group_b, im,
        "rho_bar=" + format_double(rho_bar) + ";t_adj=" + format_double(kp_t)));

    SelectionAudit audit =
        audit_selection(in.events, in.returns, cfg.reference_asset,
                        cfg.selection_threshold);

    SweepContext ctx = make_sweep_context(cfg, in);
    SweepReport wsweep = sweep_windows(ctx, parse_window_list(cfg.sweep_windows));
    SweepReport csweep = sweep_caps(ctx, parse_cap_list(cfg.sweep_caps));
    LooReport loo =
        leave_one_out(table, parse_group(cfg.loo_category), cfg.weighting);
    Decomposition decomp = group_decompose(
        table, in.events, decompose_by_from_token(cfg.decompose_by));

    std::vector<SubsampleResult> subs;
    for (const char* f : {"exogenous", "independent"}) {
      subs.push_back(subsample_run(table, in.events, SubsampleFilter::parse(f),
                                   cat_a, cat_b, cfg.weighting, cfg.B, cfg.seed,
                                   cfg.ci_level, cfg.permute_max_exact,
                                   cfg.threads));
    }

    PlaceboOutcome placebo = run_placebos(cfg, in);
    inference.push_back(row_from_bootstrap("placebo_bootstrap_mean", "Placebo",
                                           "", placebo.boot));

    PowerOutcome power = compute_power(cfg, &table);

    ReportInputs rin;
    rin.events = &in.events;
    rin.table = &table;
    rin.audit = &audit;
    rin.inference = inference;
    rin.window_sweep = &wsweep;
    rin.cap_sweep = &csweep;
    rin.loo = &loo;
    rin.decomposition = &decomp;
    rin.subsamples = subs;
    rin.placebo_table = &placebo.table;
    rin.placebo_share_significant = placebo.share_significant;
    rin.rho_bar = rho_bar;
    rin.kp_adjusted_t = kp_t;
    rin.power_sigma = power.sigma;
    rin.power_d = power.d;
    rin.power_required_n = power.required_n;
    rin.power_mde = power.mde;

    artifacts.add("cars.csv", render_cars_artifact(cfg, table));
    artifacts.add("skips.csv", render_skips(cfg, table));
    artifacts.add("inference.csv", render_inference(cfg, inference));
    artifacts.add("audit.csv", render_audit(cfg, audit));
    artifacts.add("loo.csv", render_loo(cfg, loo));
    artifacts.add("sweep_window.csv", render_sweep(cfg, wsweep));
    artifacts.add("sweep_cap.csv", render_sweep(cfg, csweep));
    artifacts.add("decompose.csv", render_decomposition(cfg, decomp));
    artifacts.add("placebo_events.csv",
                  provenance_line(cfg) + "\n" + render_events(placebo.placebos));
    artifacts.add("report.md", render_markdown_report(cfg, rin));
    return finish(artifacts,
                  "report: diff " + fmt4(diff.estimate) + " (p " +
                      fmt4(diff.p_value) + "), permutation p " +
                      fmt4(perm.p_value) + ", cluster t p " + fmt4(im.p_value));
  }

  fail(ErrorCode::InvalidArgument, "unknown subcommand '" + subcommand + "'");
}

}  // namespace evk
