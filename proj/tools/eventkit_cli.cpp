// eventkit command-line front end.  Talks to the engine exclusively through
// the public C API so it exercises the same surface as any other binding.

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "eventkit/eventkit.h"

namespace {

struct ConfigDeleter {
  void operator()(evk_config* c) const { evk_config_free(c); }
};
using ConfigPtr = std::unique_ptr<evk_config, ConfigDeleter>;

int fail_with(const char* context, evk_status status) {
  std::fprintf(stderr, "eventkit: %s: %s (status %d)\n", context,
               evk_last_error(), static_cast<int>(status));
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-study toolkit for daily asset panels"};
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "key=value config file");

  // (flag name, config key) pairs collected as strings and applied over the
  // config file, so flags always win.
  std::vector<std::pair<std::string, std::string>> overrides;
  auto add_override = [&](const std::string& flag, const std::string& key,
                          const std::string& help) {
    app.add_option_function<std::string>(
           flag,
           [&overrides, key](const std::string& v) {
             overrides.emplace_back(key, v);
           },
           help)
        ->expected(1);
  };

  add_override("--prices", "prices", "price panel CSV");
  add_override("--events", "events", "event registry CSV");
  add_override("--assets", "assets", "semicolon-separated asset whitelist");
  add_override("--model", "model",
               "constant-mean | market-proxy:<asset> | market-ew");
  add_override("--window", "window", "event window T1:T2 (e.g. -5:30)");
  add_override("--estimation", "estimation", "estimation window length (days)");
  add_override("--estimation-min", "estimation_min",
               "minimum realized estimation days");
  add_override("--gap", "gap", "gap between estimation and event window");
  add_override("--cap", "cap", "winsorization cap (e.g. 0.5) or 'none'");
  add_override("--weighting", "weighting", "observation | event");
  add_override("--B", "B", "bootstrap replications (>= 1000)");
  add_override("--seed", "seed", "RNG seed");
  add_override("--level", "level", "confidence level (e.g. 0.95)");
  add_override("--out", "out", "output directory");
  add_override("--threads", "threads", "worker threads");
  add_override("--group-a", "group_a", "focal category A");
  add_override("--group-b", "group_b", "focal category B");
  add_override("--overlap-horizon", "overlap_horizon",
               "days within which events overlap");
  add_override("--selection-threshold", "selection_threshold",
               "return screen threshold");
  add_override("--reference-asset", "reference_asset",
               "asset used by the selection audit");
  add_override("--max-exact", "max_exact",
               "assignment budget for the permutation test");
  add_override("--placebo-n", "placebo_n", "number of pseudo-events");
  add_override("--placebo-horizon", "placebo_horizon",
               "exclusion distance around real events");
  add_override("--placebo-period", "placebo_period",
               "sampling period YYYY-MM-DD:YYYY-MM-DD");
  add_override("--loo-category", "loo_category", "category for leave-one-out");
  add_override("--sweep-windows", "sweep_windows",
               "comma-separated windows, e.g. 0:1,0:5,-5:30");
  add_override("--sweep-caps", "sweep_caps",
               "comma-separated caps, e.g. 0.25,0.5,none");
  add_override("--subsample", "subsample",
               "exogenous | independent | exclude:<ids>");
  add_override("--decompose-by", "decompose_by", "asset | category | tag");
  add_override("--alpha", "alpha", "test size for power calculations");
  add_override("--power", "power", "target power");
  add_override("--d", "d", "standardized effect size");
  add_override("--sigma", "sigma", "event-level sd for the MDE");
  add_override("--n1", "n1", "group A size for the MDE");
  add_override("--n2", "n2", "group B size for the MDE");
  add_override("--sim-assets", "sim_assets", "simulated assets");
  add_override("--sim-events", "sim_events", "simulated events");
  add_override("--sim-days", "sim_days", "calendar days per simulated event");
  add_override("--sim-rho", "sim_rho", "cross-asset correlation");
  add_override("--sim-sd", "sim_sd", "daily return sd");
  add_override("--sim-delta", "sim_delta", "per-day effect inside the window");
  add_override("--sim-trials", "sim_trials", "Monte Carlo trials");
  add_override("--sim-window", "sim_window", "simulated event window T1:T2");
  add_override("--sim-B", "sim_B", "bootstrap replications per trial");
  add_override("--sim-alpha", "sim_alpha", "test size inside the calibration");

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"cars", "compute the CAR table"},
      {"bootstrap", "bootstrap each focal group's mean CAR"},
      {"diff", "bootstrap the A-minus-B mean difference"},
      {"permute", "permutation test on event-level means"},
      {"im", "few-cluster t-test on event-level means"},
      {"placebo", "pseudo-event battery"},
      {"loo", "leave-one-out sensitivity"},
      {"sweep-window", "re-run across event windows"},
      {"sweep-cap", "re-run across winsorization caps"},
      {"subsample", "re-run on a filtered event subsample"},
      {"decompose", "cell means by asset/category/tag"},
      {"power", "required sample size and MDE"},
      {"calibrate", "Monte Carlo calibration of the tests"},
      {"report", "full analysis with markdown report"},
  };
  // Options are declared on the parent app; fallthrough lets them appear
  // after the subcommand (`eventkit cars --prices ...`).
  for (const auto& [name, help] : subcommands)
    app.add_subcommand(name, help)->fallthrough();

  CLI11_PARSE(app, argc, argv);

  evk_config* raw = nullptr;
  if (evk_status s = evk_config_create(&raw); s != EVK_OK)
    return fail_with("creating config", s);
  ConfigPtr cfg(raw);

  if (!config_file.empty())
    if (evk_status s = evk_config_load_file(cfg.get(), config_file.c_str());
        s != EVK_OK)
      return fail_with("loading config file", s);

  for (const auto& [key, value] : overrides)
    if (evk_status s = evk_config_set(cfg.get(), key.c_str(), value.c_str());
        s != EVK_OK)
      return fail_with(("setting " + key).c_str(), s);

  const std::string subcommand = app.get_subcommands().front()->get_name();
  char summary[512] = {0};
  if (evk_status s =
          evk_run(cfg.get(), subcommand.c_str(), summary, sizeof summary);
      s != EVK_OK)
    return fail_with(subcommand.c_str(), s);

  std::printf("%s\n", summary);
  return 0;
}
