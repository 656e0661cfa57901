#include "core/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace evk {

namespace {

long long to_int(const std::string& key, const std::string& value) {
  return parse_int_field(value, "config key '" + key + "'");
}

double to_double(const std::string& key, const std::string& value) {
  return parse_double_field(value, "config key '" + key + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  long long v = to_int(key, value);
  if (v < 0)
    fail(ErrorCode::InvalidArgument, "config key '" + key + "' must be >= 0");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::string> split_list(const std::string& text, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find(delim, start);
    std::string tok = pos == std::string::npos ? text.substr(start)
                                               : text.substr(start, pos - start);
    if (!tok.empty()) out.push_back(tok);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

}  // namespace

RunConfig default_config() {
  RunConfig cfg;
  if (const char* env = std::getenv("EVENTKIT_SEED")) {
    std::string v(env);
    if (!v.empty()) cfg.seed = to_u64("EVENTKIT_SEED", v);
  }
  return cfg;
}

std::pair<int, int> parse_window_spec(const std::string& text) {
  std::size_t pos = text.find(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 >= text.size())
    fail(ErrorCode::InvalidArgument,
         "bad window '" + text + "' (want T1:T2, e.g. -5:30)");
  const std::string where = "window '" + text + "'";
  int t1 = static_cast<int>(parse_int_field(text.substr(0, pos), where));
  int t2 = static_cast<int>(parse_int_field(text.substr(pos + 1), where));
  return {t1, t2};
}

std::vector<std::pair<int, int>> parse_window_list(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  for (const std::string& tok : split_list(text, ','))
    out.push_back(parse_window_spec(tok));
  if (out.empty())
    fail(ErrorCode::InvalidArgument, "empty window list '" + text + "'");
  return out;
}

std::vector<std::optional<double>> parse_cap_list(const std::string& text) {
  std::vector<std::optional<double>> out;
  // Split by hand: an empty entry ("0.25,,0.5") is a typo, not a no-op.
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string tok = pos == std::string::npos
                                ? text.substr(start)
                                : text.substr(start, pos - start);
    if (tok.empty())
      fail(ErrorCode::InvalidArgument, "empty entry in cap list '" + text + "'");
    if (tok == "none")
      out.push_back(std::nullopt);
    else
      out.push_back(to_double("cap list", tok));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (out.empty())
    fail(ErrorCode::InvalidArgument, "empty cap list '" + text + "'");
  return out;
}

std::pair<Date, Date> parse_period(const std::string& text) {
  std::size_t pos = text.find(':');
  if (pos == std::string::npos)
    fail(ErrorCode::InvalidArgument,
         "bad period '" + text + "' (want YYYY-MM-DD:YYYY-MM-DD)");
  Date a = parse_date(text.substr(0, pos));
  Date b = parse_date(text.substr(pos + 1));
  if (a > b)
    fail(ErrorCode::InvalidArgument, "period start exceeds end in '" + text + "'");
  return {a, b};
}

Category parse_group(const std::string& text) { return category_from_token(text); }

void apply_config_kv(RunConfig& cfg, const std::string& key,
                     const std::string& value) {
  if (key == "prices") cfg.prices_path = value;
  else if (key == "events") cfg.events_path = value;
  else if (key == "assets") cfg.assets = split_list(value, ';');
  else if (key == "model") { ModelSelector::parse(value); cfg.model = value; }
  else if (key == "window") {
    auto [t1, t2] = parse_window_spec(value);
    cfg.window.tau1 = t1;
    cfg.window.tau2 = t2;
  }
  else if (key == "estimation") cfg.window.estimation_length = static_cast<int>(to_int(key, value));
  else if (key == "estimation_min") cfg.window.estimation_min = static_cast<int>(to_int(key, value));
  else if (key == "gap") cfg.window.gap_length = static_cast<int>(to_int(key, value));
  else if (key == "cap") {
    if (value == "none") cfg.cap = std::nullopt;
    else cfg.cap = to_double(key, value);
  }
  else if (key == "weighting") cfg.weighting = weighting_from_token(value);
  else if (key == "B") cfg.B = to_int(key, value);
  else if (key == "seed") cfg.seed = to_u64(key, value);
  else if (key == "level") cfg.ci_level = to_double(key, value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "threads") cfg.threads = static_cast<int>(to_int(key, value));
  else if (key == "group_a") { parse_group(value); cfg.group_a = value; }
  else if (key == "group_b") { parse_group(value); cfg.group_b = value; }
  else if (key == "overlap_horizon") cfg.overlap_horizon = static_cast<int>(to_int(key, value));
  else if (key == "selection_threshold") cfg.selection_threshold = to_double(key, value);
  else if (key == "reference_asset") cfg.reference_asset = value;
  else if (key == "max_exact") {
    long long v = to_int(key, value);
    if (v <= 0) fail(ErrorCode::InvalidArgument, "max_exact must be positive");
    cfg.permute_max_exact = static_cast<unsigned long long>(v);
  }
  else if (key == "placebo_n") cfg.placebo_n = static_cast<int>(to_int(key, value));
  else if (key == "placebo_horizon") cfg.placebo_horizon = static_cast<int>(to_int(key, value));
  else if (key == "placebo_period") { if (!value.empty()) parse_period(value); cfg.placebo_period = value; }
  else if (key == "loo_category") { parse_group(value); cfg.loo_category = value; }
  else if (key == "sweep_windows") { parse_window_list(value); cfg.sweep_windows = value; }
  else if (key == "sweep_caps") { parse_cap_list(value); cfg.sweep_caps = value; }
  else if (key == "subsample") { SubsampleFilter::parse(value); cfg.subsample_filter = value; }
  else if (key == "decompose_by") { decompose_by_from_token(value); cfg.decompose_by = value; }
  else if (key == "alpha") cfg.power_alpha = to_double(key, value);
  else if (key == "power") cfg.power_target = to_double(key, value);
  else if (key == "d") cfg.power_d = to_double(key, value);
  else if (key == "sigma") cfg.power_sigma = to_double(key, value);
  else if (key == "n1") cfg.power_n1 = to_int(key, value);
  else if (key == "n2") cfg.power_n2 = to_int(key, value);
  else if (key == "sim_assets") cfg.sim.n_assets = static_cast<int>(to_int(key, value));
  else if (key == "sim_events") cfg.sim.n_events = static_cast<int>(to_int(key, value));
  else if (key == "sim_days") cfg.sim.days_per_event = static_cast<int>(to_int(key, value));
  else if (key == "sim_rho") cfg.sim.rho = to_double(key, value);
  else if (key == "sim_sd") cfg.sim.daily_sd = to_double(key, value);
  else if (key == "sim_delta") cfg.sim.delta = to_double(key, value);
  else if (key == "sim_trials") cfg.sim.trials = static_cast<int>(to_int(key, value));
  else if (key == "sim_window") {
    auto [t1, t2] = parse_window_spec(value);
    cfg.sim.window.tau1 = t1;
    cfg.sim.window.tau2 = t2;
  }
  else if (key == "sim_B") cfg.sim_B = to_int(key, value);
  else if (key == "sim_alpha") cfg.sim_alpha = to_double(key, value);
  else
    fail(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t pos = s.find('=');
    if (pos == std::string::npos)
      fail(ErrorCode::Parse, path + ":" + std::to_string(line_no) +
                                 ": expected key=value, got '" + s + "'");
    const std::string key = trim(s.substr(0, pos));
    const std::string value = trim(s.substr(pos + 1));
    try {
      apply_config_kv(cfg, key, value);
    } catch (const Error& e) {
      fail(e.code(),
           path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string serialize_config(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["prices"] = cfg.prices_path;
  kv["events"] = cfg.events_path;
  {
    std::string joined;
    for (std::size_t i = 0; i < cfg.assets.size(); ++i) {
      if (i) joined += ';';
      joined += cfg.assets[i];
    }
    kv["assets"] = joined;
  }
  kv["model"] = cfg.model;
  kv["window"] = std::to_string(cfg.window.tau1) + ":" + std::to_string(cfg.window.tau2);
  kv["estimation"] = std::to_string(cfg.window.estimation_length);
  kv["estimation_min"] = std::to_string(cfg.window.estimation_min);
  kv["gap"] = std::to_string(cfg.window.gap_length);
  kv["cap"] = cfg.cap ? format_double(*cfg.cap) : "none";
  kv["weighting"] = std::string(weighting_token(cfg.weighting));
  kv["B"] = std::to_string(cfg.B);
  kv["seed"] = std::to_string(cfg.seed);
  kv["level"] = format_double(cfg.ci_level);
  // `out` and `threads` are deliberately absent: they say where results go
  // and how many workers computed them, not what was computed, and the same
  // analysis must hash identically regardless of either.
  kv["group_a"] = cfg.group_a;
  kv["group_b"] = cfg.group_b;
  kv["overlap_horizon"] = std::to_string(cfg.overlap_horizon);
  kv["selection_threshold"] = format_double(cfg.selection_threshold);
  kv["reference_asset"] = cfg.reference_asset;
  kv["max_exact"] = std::to_string(cfg.permute_max_exact);
  kv["placebo_n"] = std::to_string(cfg.placebo_n);
  kv["placebo_horizon"] = std::to_string(cfg.placebo_horizon);
  kv["placebo_period"] = cfg.placebo_period;
  kv["loo_category"] = cfg.loo_category;
  kv["sweep_windows"] = cfg.sweep_windows;
  kv["sweep_caps"] = cfg.sweep_caps;
  kv["subsample"] = cfg.subsample_filter;
  kv["decompose_by"] = cfg.decompose_by;
  kv["alpha"] = format_double(cfg.power_alpha);
  kv["power"] = format_double(cfg.power_target);
  kv["d"] = cfg.power_d ? format_double(*cfg.power_d) : "";
  kv["sigma"] = cfg.power_sigma ? format_double(*cfg.power_sigma) : "";
  kv["n1"] = std::to_string(cfg.power_n1);
  kv["n2"] = std::to_string(cfg.power_n2);
  kv["sim_assets"] = std::to_string(cfg.sim.n_assets);
  kv["sim_events"] = std::to_string(cfg.sim.n_events);
  kv["sim_days"] = std::to_string(cfg.sim.days_per_event);
  kv["sim_rho"] = format_double(cfg.sim.rho);
  kv["sim_sd"] = format_double(cfg.sim.daily_sd);
  kv["sim_delta"] = format_double(cfg.sim.delta);
  kv["sim_trials"] = std::to_string(cfg.sim.trials);
  kv["sim_window"] = std::to_string(cfg.sim.window.tau1) + ":" +
                     std::to_string(cfg.sim.window.tau2);
  kv["sim_B"] = std::to_string(cfg.sim_B);
  kv["sim_alpha"] = format_double(cfg.sim_alpha);

  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  return out.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace evk
