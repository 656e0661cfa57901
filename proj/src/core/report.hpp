#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/events.hpp"
#include "core/models.hpp"
#include "core/robustness.hpp"
#include "core/simulate.hpp"

namespace evk {

// Provenance comment stamped as the first line of every artifact.
std::string provenance_line(const RunConfig& cfg);

// A staged set of output files, committed together.  Contents are rendered
// up front; commit() writes each through a temp file + rename so a failed
// run leaves no partial artifact behind.
class ArtifactSet {
public:
  explicit ArtifactSet(std::string dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, std::string content);
  std::vector<std::string> commit();  // returns the paths written

private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

// One row of the inference artifact.
struct InferenceRow {
  std::string test;
  std::string group_a;
  std::string group_b;
  std::string estimate;
  std::string se;
  std::string ci_low;
  std::string ci_high;
  std::string p;
  std::string meta;  // semicolon-separated key=value pairs
};

InferenceRow row_from_bootstrap(const std::string& test,
                                const std::string& group_a,
                                const std::string& group_b,
                                const BootstrapResult& r);
InferenceRow row_from_permutation(const std::string& group_a,
                                  const std::string& group_b,
                                  const PermutationResult& r);
InferenceRow row_from_t_test(const std::string& test,
                             const std::string& group_a,
                             const std::string& group_b, const TTestResult& r,
                             const std::string& extra_meta = "");

std::string render_inference(const RunConfig& cfg,
                             const std::vector<InferenceRow>& rows);
std::string render_cars_artifact(const RunConfig& cfg, const CarTable& table);
std::string render_skips(const RunConfig& cfg, const CarTable& table);
std::string render_audit(const RunConfig& cfg, const SelectionAudit& audit);
std::string render_loo(const RunConfig& cfg, const LooReport& report);
std::string render_sweep(const RunConfig& cfg, const SweepReport& report);
std::string render_subsample(const RunConfig& cfg, const SubsampleResult& r);
std::string render_decomposition(const RunConfig& cfg, const Decomposition& d);
std::string render_calibration(const RunConfig& cfg,
                               const CalibrationReport& r);

// Everything the full markdown report needs, computed by the runner.
struct ReportInputs {
  const EventSet* events = nullptr;
  const CarTable* table = nullptr;
  const SelectionAudit* audit = nullptr;
  std::vector<InferenceRow> inference;
  const SweepReport* window_sweep = nullptr;
  const SweepReport* cap_sweep = nullptr;
  const LooReport* loo = nullptr;
  const Decomposition* decomposition = nullptr;
  std::vector<SubsampleResult> subsamples;
  const CarTable* placebo_table = nullptr;
  double placebo_share_significant = 0.0;
  double rho_bar = 0.0;
  double kp_adjusted_t = 0.0;
  double power_sigma = 0.0;
  double power_d = 0.0;
  long long power_required_n = 0;
  double power_mde = 0.0;
};

std::string render_markdown_report(const RunConfig& cfg, const ReportInputs& in);

}  // namespace evk
