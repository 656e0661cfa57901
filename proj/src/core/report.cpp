#include "core/report.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace evk {

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pct(double v, int digits = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f%%", digits, 100.0 * v);
  return buf;
}

const std::vector<Category> kRealCategories = {
    Category::InfraNegative, Category::RegNegative, Category::InfraPositive,
    Category::RegPositive};

}  // namespace

std::string provenance_line(const RunConfig& cfg) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "# config_hash=%016" PRIx64 " seed=%" PRIu64 " scheme=%s",
                config_hash(cfg), cfg.seed,
                std::string(weighting_token(cfg.weighting)).c_str());
  return buf;
}

void ArtifactSet::add(const std::string& name, std::string content) {
  files_.emplace_back(name, std::move(content));
}

std::vector<std::string> ArtifactSet::commit() {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  for (const auto& [name, content] : files_) {
    const std::string path = (fs::path(dir_) / name).string();
    write_file_atomic(path, content);
    paths.push_back(path);
  }
  return paths;
}

InferenceRow row_from_bootstrap(const std::string& test,
                                const std::string& group_a,
                                const std::string& group_b,
                                const BootstrapResult& r) {
  InferenceRow row;
  row.test = test;
  row.group_a = group_a;
  row.group_b = group_b;
  row.estimate = format_double(r.estimate);
  row.se = format_double(r.se);
  row.ci_low = format_double(r.ci_low);
  row.ci_high = format_double(r.ci_high);
  row.p = format_double(r.p_value);
  row.meta = "B=" + std::to_string(r.replications) +
             ";seed=" + std::to_string(r.seed) +
             ";scheme=" + std::string(weighting_token(r.scheme)) +
             ";level=" + format_double(r.ci_level);
  return row;
}

InferenceRow row_from_permutation(const std::string& group_a,
                                  const std::string& group_b,
                                  const PermutationResult& r) {
  InferenceRow row;
  row.test = "permutation";
  row.group_a = group_a;
  row.group_b = group_b;
  row.estimate = format_double(r.observed_diff);
  row.p = format_double(r.p_value);
  row.meta = "assignments=" + std::to_string(r.n_assignments) +
             ";exact=" + (r.exact ? std::string("1") : std::string("0"));
  return row;
}

InferenceRow row_from_t_test(const std::string& test,
                             const std::string& group_a,
                             const std::string& group_b, const TTestResult& r,
                             const std::string& extra_meta) {
  InferenceRow row;
  row.test = test;
  row.group_a = group_a;
  row.group_b = group_b;
  row.estimate = format_double(r.diff);
  row.se = format_double(r.se);
  row.ci_low = format_double(r.ci_low);
  row.ci_high = format_double(r.ci_high);
  row.p = format_double(r.p_value);
  row.meta = "t=" + format_double(r.t_stat) + ";df=" + format_double(r.df);
  if (!extra_meta.empty()) row.meta += ";" + extra_meta;
  return row;
}

std::string render_inference(const RunConfig& cfg,
                             const std::vector<InferenceRow>& rows) {
  CsvWriter w;
  w.raw_line(provenance_line(cfg));
  w.row({"test", "groupA", "groupB", "estimate", "se", "ci_low", "ci_high",
         "p", "meta"});
  for (const InferenceRow& r : rows)
    w.row({r.test, r.group_a, r.group_b, r.estimate, r.se, r.ci_low, r.ci_high,
           r.p, r.meta});
  return w.str();
}

std::string render_cars_artifact(const RunConfig& cfg, const CarTable& table) {
  return provenance_line(cfg) + "\n" + render_car_table(table);
}

std::string render_skips(const RunConfig& cfg, const CarTable& table) {
  CsvWriter w;
  w.raw_line(provenance_line(cfg));
  w.row({"event_id", "asset", "realized", "reason"});
  for (const SkipRecord& s : table.skips)
    w.row({s.event_id, s.asset, std::to_string(s.realized), s.reason});
  return w.str();
}

std::string render_audit(const RunConfig& cfg, const SelectionAudit& audit) {
  CsvWriter w;
  w.raw_line(provenance_line(cfg));
  w.row({"event_id", "same_day_return", "three_day_return", "met_same_day",
         "met_three_day", "met_impact", "met_users", "qualifies", "complete"});
  for (const EventAudit& r : audit.rows) {
    w.row({r.event_id,
           r.same_day_return ? format_double(*r.same_day_return) : std::string(),
           r.three_day_return ? format_double(*r.three_day_return) : std::string(),
           r.met_same_day ? "1" : "0", r.met_three_day ? "1" : "0",
           r.met_impact ? "1" : "0", r.met_users ? "1" : "0",
           r.qualifies ? "1" : "0", r.complete ? "1" : "0"});
  }
  return w.str();
}

std::string render_loo(const RunConfig& cfg, const LooReport& report) {
  CsvWriter w;
  w.raw_line(provenance_line(cfg));
  w.row({"category", "baseline", "event_dropped", "date", "mean_without",
         "pct_change", "sign_flip"});
  for (const LooRow& r : report.rows)
    w.row({std::string(category_token(report.category)),
           format_double(report.baseline), r.event_id, format_date(r.event_date),
           format_double(r.mean_without), format_double(r.pct_change),
           r.sign_flip ? "1" : "0"});
  return w.str();
}

std::string render_sweep(const RunConfig& cfg, const SweepReport& report) {
  CsvWriter w;
  w.raw_line(provenance_line(cfg));
  w.row({"axis", "setting", "category", "n_events", "n_obs", "mean",
         "sign_matches_baseline", "diff_estimate", "diff_p"});
  for (const SweepSetting& s : report.settings) {
    for (const auto& [cat, cell] : s.groups) {
      w.row({report.axis, s.label, std::string(category_token(cat)),
             std::to_string(cell.n_events), std::to_string(cell.n_observations),
             format_double(cell.mean), cell.sign_matches_baseline ? "1" : "0",
             s.diff ? format_double(s.diff->estimate) : std::string(),
             s.diff ? format_double(s.diff->p_value) : std::string()});
    }
  }
  return w.str();
}

std::string render_subsample(const RunConfig& cfg, const SubsampleResult& r) {
  CsvWriter w;
  w.raw_line(provenance_line(cfg));
  w.row({"filter", "n_events_a", "n_events_b", "n_obs_a", "n_obs_b", "mean_a",
         "mean_b", "diff", "diff_p", "perm_p"});
  w.row({r.filter_name, std::to_string(r.n_events_a),
         std::to_string(r.n_events_b), std::to_string(r.n_obs_a),
         std::to_string(r.n_obs_b), format_double(r.mean_a),
         format_double(r.mean_b), format_double(r.diff.estimate),
         format_double(r.diff.p_value), format_double(r.permutation.p_value)});
  return w.str();
}

std::string render_decomposition(const RunConfig& cfg, const Decomposition& d) {
  CsvWriter w;
  w.raw_line(provenance_line(cfg));
  w.row({"category", "key", "mean", "n", "row_mean", "row_n", "spread"});
  for (const DecompositionRow& row : d.rows) {
    for (const auto& [key, m] : row.cell_means) {
      w.row({std::string(category_token(row.category)), key, format_double(m),
             std::to_string(row.cell_counts.at(key)),
             format_double(row.row_mean), std::to_string(row.row_count),
             format_double(row.spread)});
    }
  }
  return w.str();
}

std::string render_calibration(const RunConfig& cfg,
                               const CalibrationReport& r) {
  CsvWriter w;
  w.raw_line(provenance_line(cfg));
  w.row({"trials", "alpha", "B", "scheme", "naive_rejection_rate",
         "bootstrap_rejection_rate", "bootstrap_ci_coverage", "mean_estimate",
         "se_mean_estimate", "true_mean_car"});
  w.row({std::to_string(r.trials), format_double(r.alpha), std::to_string(r.B),
         std::string(weighting_token(r.scheme)),
         format_double(r.naive_rejection_rate),
         format_double(r.bootstrap_rejection_rate),
         format_double(r.bootstrap_ci_coverage), format_double(r.mean_estimate),
         format_double(r.se_mean_estimate), format_double(r.true_mean_car)});
  return w.str();
}

namespace {

struct CategorySummary {
  int n_events = 0;
  int n_obs = 0;
  double mean_car = 0.0;
  int n_significant = 0;
  bool present = false;
};

CategorySummary summarize_category(const CarTable& table, Category c,
                                   Weighting scheme) {
  CategorySummary s;
  EventGroup g = extract_group(table, c);
  if (g.n_events() == 0) return s;
  s.present = true;
  s.n_events = static_cast<int>(g.n_events());
  s.n_obs = static_cast<int>(g.n_observations());
  s.mean_car = g.statistic(scheme);
  for (const CarRow& r : table.rows)
    if (r.category == c && r.significant) ++s.n_significant;
  return s;
}

}  // namespace

std::string render_markdown_report(const RunConfig& cfg,
                                   const ReportInputs& in) {
  std::ostringstream md;
  const Weighting scheme = cfg.weighting;

  md << "# Event-study report\n\n";
  md << "Generated by eventkit. " << provenance_line(cfg).substr(2) << "\n\n";
  md << "- model: " << cfg.model << "\n";
  md << "- event window: [" << cfg.window.tau1 << ", " << cfg.window.tau2
     << "], estimation " << cfg.window.estimation_length << " days (min "
     << cfg.window.estimation_min << "), gap " << cfg.window.gap_length
     << " days\n";
  md << "- winsorization cap: " << (cfg.cap ? fmt(*cfg.cap, 2) : "none") << "\n";
  md << "- weighting: " << weighting_token(scheme)
     << " (group means pool every asset CAR unless noted)\n";
  md << "- bootstrap: " << cfg.B << " event-level block replications, seed "
     << cfg.seed << "\n\n";

  md << "## Event sample\n\n";
  md << "| category | events analyzed | observations | mean CAR | significant obs |\n";
  md << "|---|---|---|---|---|\n";
  for (Category c : kRealCategories) {
    CategorySummary s = summarize_category(*in.table, c, scheme);
    if (!s.present) continue;
    md << "| " << category_token(c) << " | " << s.n_events << " | " << s.n_obs
       << " | " << pct(s.mean_car) << " | " << s.n_significant << "/" << s.n_obs
       << " |\n";
  }
  md << "\nSkipped (event, asset) pairs: " << in.table->skips.size() << "\n\n";

  md << "## Primary comparison\n\n";
  md << "| test | groups | estimate | 95% CI | p |\n";
  md << "|---|---|---|---|---|\n";
  for (const InferenceRow& r : in.inference) {
    std::string ci = r.ci_low.empty()
                         ? std::string("-")
                         : "[" + fmt(std::stod(r.ci_low), 4) + ", " +
                               fmt(std::stod(r.ci_high), 4) + "]";
    std::string est = r.estimate.empty() ? "-" : fmt(std::stod(r.estimate), 4);
    md << "| " << r.test << " | " << r.group_a
       << (r.group_b.empty() ? "" : " vs " + r.group_b) << " | " << est << " | "
       << ci << " | " << (r.p.empty() ? "-" : fmt(std::stod(r.p), 4)) << " |\n";
  }
  md << "\nMean pairwise abnormal-return correlation across assets: "
     << fmt(in.rho_bar, 4) << "; correlation-adjusted cluster t = "
     << fmt(in.kp_adjusted_t, 4) << ".\n\n";

  if (in.decomposition) {
    md << "## Decomposition by " << decompose_by_token(in.decomposition->by)
       << "\n\n";
    md << "| category | cell | mean CAR | n | spread |\n";
    md << "|---|---|---|---|---|\n";
    for (const DecompositionRow& row : in.decomposition->rows)
      for (const auto& [key, m] : row.cell_means)
        md << "| " << category_token(row.category) << " | " << key << " | "
           << pct(m) << " | " << row.cell_counts.at(key) << " | "
           << pct(row.spread) << " |\n";
    md << "\n";
  }

  if (in.window_sweep) {
    md << "## Window sensitivity\n\n";
    md << "| window | category | n events | mean CAR | sign matches baseline | diff p |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const SweepSetting& s : in.window_sweep->settings)
      for (const auto& [cat, cell] : s.groups)
        md << "| " << s.label << " | " << category_token(cat) << " | "
           << cell.n_events << " | " << pct(cell.mean) << " | "
           << (cell.sign_matches_baseline ? "yes" : "no") << " | "
           << (s.diff ? fmt(s.diff->p_value, 3) : std::string("-")) << " |\n";
    md << "\n";
  }

  if (in.cap_sweep) {
    md << "## Winsorization sensitivity\n\n";
    md << "| cap | category | n events | mean CAR | sign matches baseline | diff p |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const SweepSetting& s : in.cap_sweep->settings)
      for (const auto& [cat, cell] : s.groups)
        md << "| " << s.label << " | " << category_token(cat) << " | "
           << cell.n_events << " | " << pct(cell.mean) << " | "
           << (cell.sign_matches_baseline ? "yes" : "no") << " | "
           << (s.diff ? fmt(s.diff->p_value, 3) : std::string("-")) << " |\n";
    md << "\n";
  }

  if (in.loo) {
    md << "## Leave-one-out (" << category_token(in.loo->category) << ")\n\n";
    md << "Baseline mean CAR: " << pct(in.loo->baseline) << " ("
       << weighting_token(in.loo->scheme) << "-weighted)\n\n";
    md << "| dropped event | date | mean without | change | sign flip |\n";
    md << "|---|---|---|---|---|\n";
    for (const LooRow& r : in.loo->rows)
      md << "| " << r.event_id << " | " << format_date(r.event_date) << " | "
         << pct(r.mean_without) << " | " << pct(r.pct_change, 1) << " | "
         << (r.sign_flip ? "yes" : "no") << " |\n";
    md << "\n";
  }

  if (!in.subsamples.empty()) {
    md << "## Subsamples\n\n";
    md << "| filter | nA | nB | mean A | mean B | diff | diff p | perm p |\n";
    md << "|---|---|---|---|---|---|---|---|\n";
    for (const SubsampleResult& r : in.subsamples)
      md << "| " << r.filter_name << " | " << r.n_events_a << " | "
         << r.n_events_b << " | " << pct(r.mean_a) << " | " << pct(r.mean_b)
         << " | " << pct(r.diff.estimate) << " | " << fmt(r.diff.p_value, 3)
         << " | " << fmt(r.permutation.p_value, 3) << " |\n";
    md << "\n";
  }

  if (in.placebo_table) {
    CategorySummary s =
        summarize_category(*in.placebo_table, Category::Placebo, scheme);
    md << "## Placebo battery\n\n";
    md << "Pseudo-events analyzed: " << s.n_events << "; mean CAR "
       << pct(s.mean_car) << "; significant observations " << s.n_significant
       << "/" << s.n_obs << " (" << pct(in.placebo_share_significant, 1)
       << ").\n\n";
  }

  if (in.audit) {
    int qualify = 0, incomplete = 0;
    for (const EventAudit& r : in.audit->rows) {
      qualify += r.qualifies ? 1 : 0;
      incomplete += r.complete ? 0 : 1;
    }
    md << "## Selection audit\n\n";
    md << "Reference asset " << in.audit->reference_asset << ", threshold "
       << pct(in.audit->threshold, 0) << ": " << qualify << "/"
       << in.audit->rows.size() << " events meet at least one criterion; "
       << incomplete << " rows lack complete return data.\n\n";
  }

  md << "## Power\n\n";
  md << "Observed standardized difference d = " << fmt(in.power_d, 3)
     << " (event-level sd " << fmt(in.power_sigma, 4)
     << "); events per group for 80% power: " << in.power_required_n
     << "; minimum detectable difference at current sizes: "
     << pct(in.power_mde) << ".\n";

  return md.str();
}

}  // namespace evk
