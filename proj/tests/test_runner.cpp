#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "core/csv.hpp"
#include "core/rng.hpp"
#include "core/runner.hpp"
#include "test_util.hpp"

using namespace evk;
namespace fs = std::filesystem;

namespace {

// Writes a deterministic four-asset price history plus a small registry and
// returns a config wired to them.
struct RunnerFixture {
  testutil::TempDir dir;
  RunConfig cfg;

  RunnerFixture() {
    const std::vector<std::string> assets{"AAA", "BBB", "CCC", "DDD"};
    std::string prices = "asset,date,open,high,low,close,volume\n";
    const Date start = parse_date("2020-01-01");
    for (std::size_t a = 0; a < assets.size(); ++a) {
      Rng rng(91, a);
      double close = 100.0;
      for (int t = 0; t < 320; ++t) {
        close *= 1.0 + 0.02 * rng.next_normal();
        prices += assets[a] + "," + format_date(start + t) + ",,,," +
                  format_double(close) + ",\n";
      }
    }
    testutil::write_file(dir.path() + "/prices.csv", prices);

    // Every pair of dates is more than 30 days apart so the "independent"
    // subsample keeps all categories analyzable; the Return-selected events
    // and the Excluded one give the other filters something to drop.
    testutil::write_file(
        dir.path() + "/events.csv",
        "id,date,name,category,selection,impact_usd,affected_users,tags\n"
        "inf1,2020-03-05,bridge hack,Infra_Neg,Exogenous,250000000,600000,"
        "hack;bridge\n"
        "inf2,2020-05-12,exchange halt,Infra_Neg,Both,,,hack\n"
        "inf3,2020-07-25,crash day,Infra_Neg,Return,,,\n"
        "reg1,2020-04-08,enforcement,Reg_Neg,Exogenous,,,\n"
        "reg2,2020-06-18,ban,Reg_Neg,Both,,,\n"
        "ret1,2020-10-06,surprise ruling,Reg_Neg,Return,,,\n"
        "exc1,2020-08-30,ambiguous,Excluded,Exogenous,,,\n");

    cfg = default_config();
    apply_config_kv(cfg, "prices", dir.path() + "/prices.csv");
    apply_config_kv(cfg, "events", dir.path() + "/events.csv");
    apply_config_kv(cfg, "estimation", "60");
    apply_config_kv(cfg, "estimation_min", "30");
    apply_config_kv(cfg, "gap", "10");
    apply_config_kv(cfg, "window", "-2:5");
    apply_config_kv(cfg, "B", "1000");
    apply_config_kv(cfg, "seed", "17");
    apply_config_kv(cfg, "threads", "2");
    apply_config_kv(cfg, "reference_asset", "AAA");
    apply_config_kv(cfg, "placebo_n", "20");
    apply_config_kv(cfg, "placebo_horizon", "10");
    apply_config_kv(cfg, "placebo_period", "2020-04-01:2020-10-31");
    apply_config_kv(cfg, "sweep_windows", "0:1,0:5");
    apply_config_kv(cfg, "sweep_caps", "0.5,none");
    apply_config_kv(cfg, "out", dir.path() + "/out");
  }
};

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

void check_provenance(const std::string& path) {
  const std::string content = testutil::slurp(path);
  const std::string head = first_line(content);
  CHECK(head.rfind("# config_hash=", 0) == 0);
  CHECK(head.find("seed=") != std::string::npos);
  CHECK(head.find("scheme=") != std::string::npos);
}

}  // namespace

TEST_CASE("runner writes the per-subcommand artifacts with provenance") {
  RunnerFixture fx;

  SUBCASE("cars") {
    RunResult r = run_pipeline(fx.cfg, "cars");
    REQUIRE(r.artifacts.size() == 2);
    for (const std::string& p : r.artifacts) {
      CHECK(fs::exists(p));
      check_provenance(p);
    }
    const std::string cars = testutil::slurp(fx.dir.path() + "/out/cars.csv");
    CHECK(cars.find("event_id,asset,category,model") != std::string::npos);
    CHECK(cars.find("inf1,AAA,Infra_Neg,constant-mean,-2,5,") != std::string::npos);
    CHECK(cars.find("exc1") == std::string::npos);  // Excluded never analyzed
    const std::string skips = testutil::slurp(fx.dir.path() + "/out/skips.csv");
    CHECK(skips.find("exc1") != std::string::npos);
    CHECK(!r.summary.empty());
  }

  SUBCASE("bootstrap, diff, permute, im") {
    run_pipeline(fx.cfg, "bootstrap");
    std::string inf = testutil::slurp(fx.dir.path() + "/out/inference.csv");
    check_provenance(fx.dir.path() + "/out/inference.csv");
    CHECK(inf.find("bootstrap_mean,Infra_Neg,") != std::string::npos);
    CHECK(inf.find("bootstrap_mean,Reg_Neg,") != std::string::npos);

    run_pipeline(fx.cfg, "diff");
    inf = testutil::slurp(fx.dir.path() + "/out/inference.csv");
    CHECK(inf.find("bootstrap_diff,Infra_Neg,Reg_Neg,") != std::string::npos);
    CHECK(inf.find("B=1000") != std::string::npos);

    run_pipeline(fx.cfg, "permute");
    inf = testutil::slurp(fx.dir.path() + "/out/inference.csv");
    CHECK(inf.find("permutation,Infra_Neg,Reg_Neg,") != std::string::npos);

    run_pipeline(fx.cfg, "im");
    inf = testutil::slurp(fx.dir.path() + "/out/inference.csv");
    CHECK(inf.find("cluster_t,Infra_Neg,Reg_Neg,") != std::string::npos);
  }

  SUBCASE("placebo") {
    RunResult r = run_pipeline(fx.cfg, "placebo");
    REQUIRE(r.artifacts.size() == 3);
    check_provenance(fx.dir.path() + "/out/placebo_events.csv");
    const std::string ev = testutil::slurp(fx.dir.path() +
                                           "/out/placebo_events.csv");
    CHECK(ev.find("placebo_0001") != std::string::npos);
    CHECK(ev.find("Placebo") != std::string::npos);
    const std::string inf = testutil::slurp(fx.dir.path() + "/out/inference.csv");
    CHECK(inf.find("placebo_bootstrap_mean,Placebo,") != std::string::npos);
  }

  SUBCASE("loo, sweeps, subsample, decompose") {
    run_pipeline(fx.cfg, "loo");
    const std::string loo = testutil::slurp(fx.dir.path() + "/out/loo.csv");
    check_provenance(fx.dir.path() + "/out/loo.csv");
    CHECK(loo.find("inf1") != std::string::npos);
    CHECK(loo.find("inf2") != std::string::npos);

    run_pipeline(fx.cfg, "sweep-window");
    const std::string sw = testutil::slurp(fx.dir.path() + "/out/sweep_window.csv");
    CHECK(sw.find("[0:1]") != std::string::npos);
    CHECK(sw.find("[0:5]") != std::string::npos);

    run_pipeline(fx.cfg, "sweep-cap");
    const std::string sc = testutil::slurp(fx.dir.path() + "/out/sweep_cap.csv");
    CHECK(sc.find("none") != std::string::npos);

    run_pipeline(fx.cfg, "subsample");
    const std::string sub = testutil::slurp(fx.dir.path() + "/out/subsample.csv");
    CHECK(sub.find("exogenous") != std::string::npos);

    run_pipeline(fx.cfg, "decompose");
    const std::string dec = testutil::slurp(fx.dir.path() + "/out/decompose.csv");
    CHECK(dec.find("Infra_Neg") != std::string::npos);
    CHECK(dec.find("AAA") != std::string::npos);
  }

  SUBCASE("power from the observed panel") {
    RunResult r = run_pipeline(fx.cfg, "power");
    const std::string p = testutil::slurp(fx.dir.path() + "/out/power.csv");
    check_provenance(fx.dir.path() + "/out/power.csv");
    CHECK(p.find("required_n") != std::string::npos);
    CHECK(!r.summary.empty());
  }

  SUBCASE("report bundles everything") {
    RunResult r = run_pipeline(fx.cfg, "report");
    CHECK(r.artifacts.size() == 10);
    const std::string md = testutil::slurp(fx.dir.path() + "/out/report.md");
    CHECK(md.find("Infra_Neg") != std::string::npos);
    CHECK(md.find("bootstrap") != std::string::npos);
    for (const std::string& p : r.artifacts)
      CHECK(fs::exists(p));
  }
}

TEST_CASE("runner power mode works without data when fully specified") {
  RunConfig cfg = default_config();
  testutil::TempDir dir;
  apply_config_kv(cfg, "out", dir.path() + "/out");
  apply_config_kv(cfg, "d", "0.13");
  apply_config_kv(cfg, "sigma", "0.27");
  apply_config_kv(cfg, "n1", "8");
  apply_config_kv(cfg, "n2", "7");
  RunResult r = run_pipeline(cfg, "power");
  const std::string p = testutil::slurp(dir.path() + "/out/power.csv");
  CHECK(p.find("929") != std::string::npos);
  CHECK(r.summary.find("929") != std::string::npos);
}

TEST_CASE("runner calibrate runs a small study end to end") {
  RunConfig cfg = default_config();
  testutil::TempDir dir;
  apply_config_kv(cfg, "out", dir.path() + "/out");
  apply_config_kv(cfg, "sim_assets", "2");
  apply_config_kv(cfg, "sim_events", "4");
  apply_config_kv(cfg, "sim_days", "290");
  apply_config_kv(cfg, "sim_trials", "200");
  apply_config_kv(cfg, "sim_B", "1000");
  apply_config_kv(cfg, "seed", "3");
  apply_config_kv(cfg, "threads", "4");
  RunResult r = run_pipeline(cfg, "calibrate");
  REQUIRE(r.artifacts.size() == 1);
  const std::string cal = testutil::slurp(dir.path() + "/out/calibration.csv");
  check_provenance(dir.path() + "/out/calibration.csv");
  CHECK(cal.find("naive_rejection_rate") != std::string::npos);
  CHECK(!r.summary.empty());
}

TEST_CASE("runner failures leave no artifacts behind") {
  RunnerFixture fx;
  SUBCASE("unknown subcommand") {
    CHECK_FAILS_WITH(run_pipeline(fx.cfg, "anova"), ErrorCode::InvalidArgument);
    CHECK(!fs::exists(fx.dir.path() + "/out"));
  }
  SUBCASE("missing prices file") {
    RunConfig cfg = fx.cfg;
    apply_config_kv(cfg, "prices", fx.dir.path() + "/nope.csv");
    CHECK_FAILS_WITH(run_pipeline(cfg, "cars"), ErrorCode::Io);
    CHECK(!fs::exists(fx.dir.path() + "/out"));
  }
  SUBCASE("unknown asset selection") {
    RunConfig cfg = fx.cfg;
    apply_config_kv(cfg, "assets", "AAA;ZZZ");
    CHECK_FAILS_WITH(run_pipeline(cfg, "cars"), ErrorCode::InvalidArgument);
    CHECK(!fs::exists(fx.dir.path() + "/out"));
  }
  SUBCASE("one-event group surfaces InsufficientClusters") {
    RunConfig cfg = fx.cfg;
    apply_config_kv(cfg, "group_a", "Infra_Pos");  // nothing in that bucket
    CHECK_FAILS_WITH(run_pipeline(cfg, "diff"), ErrorCode::InsufficientClusters);
  }
}

TEST_CASE("identical runs produce byte-identical artifacts") {
  RunnerFixture fx;
  run_pipeline(fx.cfg, "diff");
  const std::string once = testutil::slurp(fx.dir.path() + "/out/inference.csv");
  run_pipeline(fx.cfg, "diff");
  const std::string twice = testutil::slurp(fx.dir.path() + "/out/inference.csv");
  CHECK(once == twice);

  // Worker count and output directory are execution details: changing them
  // must not move a byte, provenance line included.
  RunConfig cfg1 = fx.cfg;
  apply_config_kv(cfg1, "threads", "1");
  apply_config_kv(cfg1, "out", fx.dir.path() + "/out_serial");
  run_pipeline(cfg1, "diff");
  const std::string serial =
      testutil::slurp(fx.dir.path() + "/out_serial/inference.csv");
  CHECK(serial == once);
}
