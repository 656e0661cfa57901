#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/inference.hpp"
#include "core/robustness.hpp"
#include "core/simulate.hpp"

namespace evk {

// One flat configuration drives every subcommand.  Precedence: built-in
// defaults < config file < explicit overrides (CLI flags); the EVENTKIT_SEED
// environment variable supplies the default seed when set.
struct RunConfig {
  std::string prices_path;
  std::string events_path;
  std::vector<std::string> assets;  // empty = every asset in the panel
  std::string model = "constant-mean";
  WindowConfig window;
  std::optional<double> cap;  // winsorization, nullopt = off
  Weighting weighting = Weighting::ObservationWeighted;
  long long B = 5000;
  std::uint64_t seed = 20240101;
  double ci_level = 0.95;
  std::string out_dir = "out";
  int threads = 1;

  std::string group_a = "Infra_Neg";
  std::string group_b = "Reg_Neg";
  int overlap_horizon = 30;
  double selection_threshold = 0.05;
  std::string reference_asset = "BTC";
  unsigned long long permute_max_exact = 200000;

  int placebo_n = 200;
  int placebo_horizon = 30;
  std::string placebo_period;  // "YYYY-MM-DD:YYYY-MM-DD"; empty = panel range
  std::string loo_category = "Infra_Neg";
  std::string sweep_windows = "0:1,0:3,0:5,0:10,-5:30";
  std::string sweep_caps = "0.25,0.5,0.75,none";
  std::string subsample_filter = "exogenous";
  std::string decompose_by = "asset";

  double power_alpha = 0.05;
  double power_target = 0.80;
  std::optional<double> power_d;      // standardized effect
  std::optional<double> power_sigma;  // raw sd for MDE
  long long power_n1 = 0, power_n2 = 0;

  SimSpec sim;
  long long sim_B = 1000;
  double sim_alpha = 0.05;
};

RunConfig default_config();  // applies EVENTKIT_SEED when present

// key=value lines; '#' starts a comment; unknown keys -> InvalidArgument.
void apply_config_file(RunConfig& cfg, const std::string& path);
void apply_config_kv(RunConfig& cfg, const std::string& key,
                     const std::string& value);

// Canonical serialization (sorted keys) and its FNV-1a 64-bit hash; every
// emitted table carries this hash so outputs are traceable to their inputs.
// Execution-only settings (out directory, thread count) are excluded: the
// same analysis hashes the same wherever and however it ran.
std::string serialize_config(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

// Parsed views of the compound fields (throw InvalidArgument on bad syntax).
std::pair<int, int> parse_window_spec(const std::string& text);  // "T1:T2"
std::vector<std::pair<int, int>> parse_window_list(const std::string& text);
std::vector<std::optional<double>> parse_cap_list(const std::string& text);
std::pair<Date, Date> parse_period(const std::string& text);
Category parse_group(const std::string& text);

}  // namespace evk
