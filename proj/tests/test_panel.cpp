#include <doctest.h>

#include <cmath>

#include "core/panel.hpp"
#include "core/rng.hpp"
#include "test_fixtures.hpp"
#include "test_util.hpp"

using namespace evk;

namespace {

const char* kSmallPanel =
    "asset,date,open,high,low,close,volume\n"
    "ETH,2021-01-03,3,4,2,3.5,200\n"
    "BTC,2021-01-01,1,2,0.5,1.5,100\n"
    "BTC,2021-01-02,1.5,3,1,2,150\n"
    "BTC,2021-01-03,2,2,1,1,120\n"
    "ETH,2021-01-02,3,5,2,4,250\n";

}  // namespace

TEST_CASE("load sorts assets and dates and fills missing cells") {
  testutil::TempDir tmp("panel");
  PricePanel p = load_price_panel(
      testutil::write_file(tmp, "p.csv", kSmallPanel));
  CHECK(p.assets == std::vector<std::string>{"BTC", "ETH"});
  REQUIRE(p.n_dates() == 3);
  CHECK(p.dates[0] == parse_date("2021-01-01"));
  CHECK(p.dates[2] == parse_date("2021-01-03"));
  // ETH has no 2021-01-01 row at all.
  CHECK(!p.close[p.at(1, 0)].has_value());
  CHECK(p.close[p.at(1, 1)] == 4.0);
  CHECK(p.volume[p.at(0, 0)] == 100.0);
}

TEST_CASE("save(load(f)) reproduces the file byte for byte") {
  // Rows sorted by (asset, date) with shortest-round-trip numbers, matching
  // what the writer itself emits.
  const std::string canonical =
      "asset,date,open,high,low,close,volume\n"
      "BTC,2021-01-01,1,2,0.5,1.5,100\n"
      "BTC,2021-01-02,1.5,3,1,2,150\n"
      "BTC,2021-01-03,2,2,1,1,120\n"
      "ETH,2021-01-02,3,5,2,4,250\n"
      "ETH,2021-01-03,3,4,2,3.5,200\n";
  testutil::TempDir tmp("roundtrip");
  const std::string src = testutil::write_file(tmp, "p.csv", canonical);
  PricePanel p = load_price_panel(src);
  CHECK(render_price_panel(p) == canonical);

  // And a second load of the render is identical again.
  const std::string dst = tmp.path("q.csv");
  save_price_panel(p, dst);
  CHECK(testutil::slurp(dst) == canonical);
}

TEST_CASE("round trip preserves awkward doubles and missing fields") {
  PricePanel p;
  p.assets = {"X"};
  p.dates = {parse_date("2020-01-01"), parse_date("2020-01-02")};
  p.open.assign(2, std::nullopt);
  p.high.assign(2, std::nullopt);
  p.low.assign(2, std::nullopt);
  p.close.assign(2, std::nullopt);
  p.volume.assign(2, std::nullopt);
  p.close[0] = 0.1 + 0.2;          // 0.30000000000000004
  p.close[1] = 1.0 / 3.0;
  p.volume[1] = 12345678901234.5;
  testutil::TempDir tmp("awkward");
  const std::string path = tmp.path("p.csv");
  save_price_panel(p, path);
  PricePanel q = load_price_panel(path);
  CHECK(q.close[0] == p.close[0]);
  CHECK(q.close[1] == p.close[1]);
  CHECK(q.volume[1] == p.volume[1]);
  CHECK(!q.open[0].has_value());
}

TEST_CASE("loader rejects malformed input with context") {
  testutil::TempDir tmp("bad");
  auto try_load = [&](const std::string& name, const std::string& body) {
    return load_price_panel(testutil::write_file(tmp, name, body));
  };
  const std::string hdr = "asset,date,open,high,low,close,volume\n";

  CHECK_FAILS_WITH(try_load("h.csv", "asset,date,close\nBTC,2021-01-01,1\n"),
                   ErrorCode::Parse);
  CHECK_FAILS_WITH(try_load("d.csv", hdr + "BTC,2021-13-01,1,1,1,1,1\n"),
                   ErrorCode::Parse);
  CHECK_FAILS_WITH(try_load("n.csv", hdr + "BTC,2021-01-01,1,1,1,abc,1\n"),
                   ErrorCode::Parse);
  CHECK_FAILS_WITH(
      try_load("dup.csv", hdr + "BTC,2021-01-01,1,1,1,1,1\nBTC,2021-01-01,2,2,2,2,2\n"),
      ErrorCode::Conflict);
  CHECK_FAILS_WITH(try_load("z.csv", hdr + "BTC,2021-01-01,1,1,1,0,1\n"),
                   ErrorCode::Validation);
  CHECK_FAILS_WITH(try_load("neg.csv", hdr + "BTC,2021-01-01,1,1,1,-2,1\n"),
                   ErrorCode::Validation);
  // Missing close is fine (row kept, cell empty).
  PricePanel ok = try_load("gap.csv", hdr + "BTC,2021-01-01,1,1,1,,1\n");
  CHECK(!ok.close[0].has_value());
}

TEST_CASE("returns need adjacent calendar closes") {
  testutil::TempDir tmp("ret");
  const std::string body =
      "asset,date,open,high,low,close,volume\n"
      "BTC,2021-01-01,,,,100,\n"
      "BTC,2021-01-02,,,,110,\n"
      "BTC,2021-01-04,,,,121,\n"   // calendar hole on the 3rd
      "BTC,2021-01-05,,,,133.1,\n"
      "ETH,2021-01-03,,,,50,\n";   // fills the grid date but not BTC's close
  PricePanel p = load_price_panel(testutil::write_file(tmp, "p.csv", body));
  ReturnPanel r = compute_returns(p);
  const std::size_t btc = *r.asset_index("BTC");
  REQUIRE(r.n_dates() == 5);
  CHECK(!r.ret(btc, 0).has_value());  // first day
  CHECK(*r.ret(btc, 1) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(!r.ret(btc, 2).has_value());  // the 3rd: BTC close missing
  CHECK(!r.ret(btc, 3).has_value());  // no close on the adjacent 3rd
  CHECK(*r.ret(btc, 4) == doctest::Approx(0.10).epsilon(1e-12));
}

TEST_CASE("returns across a grid hole are not invented") {
  // No asset trades on 2021-01-03, so the panel's date axis itself skips it.
  testutil::TempDir tmp("hole");
  const std::string body =
      "asset,date,open,high,low,close,volume\n"
      "BTC,2021-01-02,,,,100,\n"
      "BTC,2021-01-04,,,,121,\n";
  PricePanel p = load_price_panel(testutil::write_file(tmp, "p.csv", body));
  REQUIRE(p.n_dates() == 2);
  ReturnPanel r = compute_returns(p);
  CHECK(!r.ret(0, 1).has_value());  // 2 calendar days apart
}

TEST_CASE("winsorize clamps symmetrically and validates the cap") {
  auto panel = testutil::make_returns(
      {"A"}, parse_date("2021-01-01"),
      {{NAN, 0.9, -0.9, 0.05, -0.02, NAN, 0.5}});
  ReturnPanel capped = winsorize_returns(panel, 0.5);
  CHECK(*capped.ret(0, 1) == 0.5);
  CHECK(*capped.ret(0, 2) == -0.5);
  CHECK(*capped.ret(0, 3) == 0.05);
  CHECK(!capped.ret(0, 5).has_value());
  CHECK(*capped.ret(0, 6) == 0.5);

  SUBCASE("no cap is the identity") {
    ReturnPanel same = winsorize_returns(panel, std::nullopt);
    for (std::size_t i = 0; i < panel.returns.size(); ++i)
      CHECK(same.returns[i] == panel.returns[i]);
  }
  SUBCASE("idempotent and nested caps compose") {
    ReturnPanel twice = winsorize_returns(capped, 0.5);
    for (std::size_t i = 0; i < capped.returns.size(); ++i)
      CHECK(twice.returns[i] == capped.returns[i]);
    // cap 0.5 then 0.3 == cap 0.3 directly
    ReturnPanel nested = winsorize_returns(capped, 0.3);
    ReturnPanel direct = winsorize_returns(panel, 0.3);
    for (std::size_t i = 0; i < direct.returns.size(); ++i)
      CHECK(nested.returns[i] == direct.returns[i]);
  }
  SUBCASE("bad caps") {
    CHECK_FAILS_WITH(winsorize_returns(panel, 0.0), ErrorCode::InvalidArgument);
    CHECK_FAILS_WITH(winsorize_returns(panel, -0.1), ErrorCode::InvalidArgument);
  }
}

TEST_CASE("select_assets subsets and validates names") {
  auto panel = testutil::make_returns(
      {"A", "B", "C"}, parse_date("2021-01-01"),
      {{NAN, 0.1, 0.2}, {NAN, 0.3, 0.4}, {NAN, 0.5, 0.6}});
  ReturnPanel sub = select_assets(panel, {"C", "A"});
  CHECK(sub.assets == std::vector<std::string>{"A", "C"});
  CHECK(*sub.ret(1, 2) == 0.6);
  CHECK_FAILS_WITH(select_assets(panel, {"A", "Z"}), ErrorCode::InvalidArgument);
}
