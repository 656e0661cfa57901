#include "core/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace evk {

std::string_view weighting_token(Weighting w) {
  return w == Weighting::ObservationWeighted ? "observation" : "event";
}

Weighting weighting_from_token(std::string_view tok) {
  if (tok == "observation") return Weighting::ObservationWeighted;
  if (tok == "event") return Weighting::EventEqualWeighted;
  fail(ErrorCode::InvalidArgument,
       "unknown weighting '" + std::string(tok) + "' (want observation or event)");
}

std::size_t EventGroup::n_observations() const {
  std::size_t n = 0;
  for (const auto& v : cars) n += v.size();
  return n;
}

double EventGroup::statistic(Weighting w) const {
  if (w == Weighting::EventEqualWeighted) return mean(event_means);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : cars) {
    for (double c : v) sum += c;
    n += v.size();
  }
  if (n == 0) fail(ErrorCode::Internal, "group statistic over empty group");
  return sum / static_cast<double>(n);
}

EventGroup extract_group(const CarTable& table, Category category) {
  EventGroup g;
  for (const auto& [id, cat] : table.event_order) {
    if (cat != category) continue;
    std::vector<double> cars;
    for (const CarRow& row : table.rows)
      if (row.event_id == id) cars.push_back(row.car);
    if (cars.empty()) continue;
    g.event_ids.push_back(id);
    g.event_means.push_back(mean(cars));
    g.cars.push_back(std::move(cars));
  }
  return g;
}

std::vector<std::pair<std::string, double>> event_level_means(
    const CarTable& table, Category category) {
  EventGroup g = extract_group(table, category);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(g.n_events());
  for (std::size_t e = 0; e < g.n_events(); ++e)
    out.emplace_back(g.event_ids[e], g.event_means[e]);
  return out;
}

namespace {

// Statistic over a resampled set of event indices.
double resampled_statistic(const EventGroup& g, std::span<const std::uint32_t> draw,
                           Weighting w) {
  double sum = 0.0;
  std::size_t n = 0;
  if (w == Weighting::EventEqualWeighted) {
    for (std::uint32_t e : draw) sum += g.event_means[e];
    return sum / static_cast<double>(draw.size());
  }
  for (std::uint32_t e : draw) {
    for (double c : g.cars[e]) sum += c;
    n += g.cars[e].size();
  }
  return sum / static_cast<double>(n);
}

void check_bootstrap_args(long long B, double ci_level) {
  if (B < 1000)
    fail(ErrorCode::InvalidArgument,
         "bootstrap needs B >= 1000, got " + std::to_string(B));
  if (!(ci_level > 0.0 && ci_level < 1.0))
    fail(ErrorCode::InvalidArgument, "ci_level must lie in (0,1)");
}

void check_group_size(const EventGroup& g, Category c) {
  if (g.n_events() < 2)
    fail(ErrorCode::InsufficientClusters,
         "category " + std::string(category_token(c)) + " has " +
             std::to_string(g.n_events()) +
             " analyzable event(s); the event-level bootstrap needs at least 2");
}

BootstrapResult summarize_replications(double estimate, std::vector<double> stats,
                                       long long B, std::uint64_t seed,
                                       double ci_level, Weighting scheme) {
  BootstrapResult r;
  r.estimate = estimate;
  r.replications = B;
  r.ci_level = ci_level;
  r.scheme = scheme;
  r.seed = seed;
  r.se = sample_sd(stats);

  long long n_le = 0, n_ge = 0;
  for (double s : stats) {
    if (s <= 0.0) ++n_le;
    if (s >= 0.0) ++n_ge;
  }
  const double frac_le = static_cast<double>(n_le) / static_cast<double>(B);
  const double frac_ge = static_cast<double>(n_ge) / static_cast<double>(B);
  r.p_value = std::min(1.0, std::max(2.0 * std::min(frac_le, frac_ge),
                                     2.0 / static_cast<double>(B)));

  std::sort(stats.begin(), stats.end());
  const double tail = (1.0 - ci_level) / 2.0;
  r.ci_low = quantile_sorted(stats, tail);
  r.ci_high = quantile_sorted(stats, 1.0 - tail);
  return r;
}

}  // namespace

BootstrapResult block_bootstrap_mean(const CarTable& table, Category category,
                                     Weighting scheme, long long B,
                                     std::uint64_t seed, double ci_level,
                                     int threads) {
  check_bootstrap_args(B, ci_level);
  const EventGroup g = extract_group(table, category);
  check_group_size(g, category);

  const auto n = static_cast<std::uint32_t>(g.n_events());
  std::vector<double> stats(static_cast<std::size_t>(B));
  parallel_for(B, threads, [&](std::int64_t b) {
    Rng rng(seed, static_cast<std::uint64_t>(b));
    std::vector<std::uint32_t> draw(n);
    for (auto& d : draw)
      d = static_cast<std::uint32_t>(rng.next_below(n));
    stats[static_cast<std::size_t>(b)] = resampled_statistic(g, draw, scheme);
  });
  return summarize_replications(g.statistic(scheme), std::move(stats), B, seed,
                                ci_level, scheme);
}

BootstrapResult block_bootstrap_diff(const CarTable& table, Category cat_a,
                                     Category cat_b, Weighting scheme,
                                     long long B, std::uint64_t seed,
                                     double ci_level, int threads) {
  check_bootstrap_args(B, ci_level);
  const EventGroup ga = extract_group(table, cat_a);
  const EventGroup gb = extract_group(table, cat_b);
  check_group_size(ga, cat_a);
  check_group_size(gb, cat_b);

  const auto na = static_cast<std::uint32_t>(ga.n_events());
  const auto nb = static_cast<std::uint32_t>(gb.n_events());
  std::vector<double> stats(static_cast<std::size_t>(B));
  parallel_for(B, threads, [&](std::int64_t b) {
    Rng rng(seed, static_cast<std::uint64_t>(b));
    std::vector<std::uint32_t> draw_a(na), draw_b(nb);
    for (auto& d : draw_a)
      d = static_cast<std::uint32_t>(rng.next_below(na));
    for (auto& d : draw_b)
      d = static_cast<std::uint32_t>(rng.next_below(nb));
    stats[static_cast<std::size_t>(b)] = resampled_statistic(ga, draw_a, scheme) -
                                         resampled_statistic(gb, draw_b, scheme);
  });
  return summarize_replications(ga.statistic(scheme) - gb.statistic(scheme),
                                std::move(stats), B, seed, ci_level, scheme);
}

PermutationResult permutation_test(std::span<const double> group_a,
                                   std::span<const double> group_b,
                                   unsigned long long max_exact,
                                   std::uint64_t seed) {
  if (group_a.empty() || group_b.empty())
    fail(ErrorCode::InvalidArgument, "permutation test needs non-empty groups");
  if (max_exact == 0)
    fail(ErrorCode::InvalidArgument, "permutation max_exact must be positive");

  const int na = static_cast<int>(group_a.size());
  const int nb = static_cast<int>(group_b.size());
  const int n = na + nb;
  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(n));
  pooled.insert(pooled.end(), group_a.begin(), group_a.end());
  pooled.insert(pooled.end(), group_b.begin(), group_b.end());
  double total = 0.0;
  for (double v : pooled) total += v;

  const double obs = mean(group_a) - mean(group_b);
  const double cut = std::fabs(obs) - 1e-12;
  auto diff_from_sum_a = [&](double sum_a) {
    return sum_a / na - (total - sum_a) / nb;
  };

  PermutationResult r;
  r.observed_diff = obs;

  const unsigned long long total_assignments =
      binomial_capped(n, na, max_exact);
  if (total_assignments <= max_exact) {
    // Exhaustive enumeration over which pooled positions form group A,
    // walking combinations in lexicographic order.
    std::vector<int> comb(static_cast<std::size_t>(na));
    for (int i = 0; i < na; ++i) comb[static_cast<std::size_t>(i)] = i;
    unsigned long long hits = 0;
    while (true) {
      double sum_a = 0.0;
      for (int i : comb) sum_a += pooled[static_cast<std::size_t>(i)];
      if (std::fabs(diff_from_sum_a(sum_a)) >= cut) ++hits;
      // next combination
      int k = na - 1;
      while (k >= 0 && comb[static_cast<std::size_t>(k)] == n - na + k) --k;
      if (k < 0) break;
      ++comb[static_cast<std::size_t>(k)];
      for (int i = k + 1; i < na; ++i)
        comb[static_cast<std::size_t>(i)] = comb[static_cast<std::size_t>(i - 1)] + 1;
    }
    r.n_assignments = total_assignments;
    r.p_value = static_cast<double>(hits) / static_cast<double>(total_assignments);
    r.exact = true;
    return r;
  }

  // Monte Carlo: the observed assignment is draw 0, so p >= 1/max_exact.
  unsigned long long hits = 1;
  std::vector<std::size_t> index(static_cast<std::size_t>(n));
  for (unsigned long long k = 1; k < max_exact; ++k) {
    Rng rng(seed, k);
    for (int i = 0; i < n; ++i) index[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    rng.partial_shuffle(index, static_cast<std::size_t>(na));
    double sum_a = 0.0;
    for (int i = 0; i < na; ++i) sum_a += pooled[index[static_cast<std::size_t>(i)]];
    if (std::fabs(diff_from_sum_a(sum_a)) >= cut) ++hits;
  }
  r.n_assignments = max_exact;
  r.p_value = static_cast<double>(hits) / static_cast<double>(max_exact);
  r.exact = false;
  return r;
}

TTestResult welch_t_test(std::span<const double> group_a,
                         std::span<const double> group_b, double ci_level) {
  if (group_a.size() < 2 || group_b.size() < 2)
    fail(ErrorCode::InsufficientClusters,
         "Welch t-test needs at least 2 observations per group (have " +
             std::to_string(group_a.size()) + " and " +
             std::to_string(group_b.size()) + ")");
  if (!(ci_level > 0.0 && ci_level < 1.0))
    fail(ErrorCode::InvalidArgument, "ci_level must lie in (0,1)");
  for (double v : group_a)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite observation");
  for (double v : group_b)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite observation");

  const double na = static_cast<double>(group_a.size());
  const double nb = static_cast<double>(group_b.size());
  const double va = sample_variance(group_a) / na;
  const double vb = sample_variance(group_b) / nb;

  TTestResult r;
  r.diff = mean(group_a) - mean(group_b);
  r.se = std::sqrt(va + vb);
  if (r.se == 0.0) {
    // Two exactly constant groups: equal means give t = 0, p = 1; unequal
    // means are separated with certainty.
    r.t_stat = r.diff == 0.0 ? 0.0
                             : std::copysign(
                                   std::numeric_limits<double>::infinity(), r.diff);
    r.df = na + nb - 2.0;
    r.p_value = r.diff == 0.0 ? 1.0 : 0.0;
    r.ci_low = r.ci_high = r.diff;
    return r;
  }
  r.t_stat = r.diff / r.se;
  r.df = (va + vb) * (va + vb) /
         (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = student_t_two_sided_p(r.t_stat, r.df);
  const double tcrit = student_t_quantile(1.0 - (1.0 - ci_level) / 2.0, r.df);
  r.ci_low = r.diff - tcrit * r.se;
  r.ci_high = r.diff + tcrit * r.se;
  return r;
}

TTestResult cluster_mean_t_test(std::span<const double> means_a,
                                std::span<const double> means_b,
                                double ci_level) {
  return welch_t_test(means_a, means_b, ci_level);
}

double adjust_t_for_correlation(double t, long long n, double rho_bar) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "adjustment needs n >= 1");
  const double inflation = 1.0 + static_cast<double>(n - 1) * rho_bar;
  if (!(inflation > 0.0))
    fail(ErrorCode::InvalidArgument,
         "correlation adjustment undefined: 1 + (n-1)*rho_bar = " +
             std::to_string(inflation) + " is not positive");
  return t / std::sqrt(inflation);
}

double mean_cross_correlation(const ReturnPanel& panel, const EventSet& events,
                              const WindowConfig& w,
                              const ModelSelector& selector,
                              std::optional<double> cap) {
  w.validate();
  const ReturnPanel rp = winsorize_returns(panel, cap);

  // Abnormal returns per asset keyed by (event index, relative day), so the
  // same market days contribute to each pairwise correlation.
  const std::size_t n_assets = rp.n_assets();
  std::map<std::pair<std::size_t, int>, std::vector<Cell>> ar;

  Series shared_proxy;
  std::optional<std::size_t> proxy_asset;
  if (selector.mode == ModelSelector::Mode::MarketProxy) {
    auto a = rp.asset_index(selector.proxy_asset);
    if (!a)
      fail(ErrorCode::InvalidArgument,
           "proxy asset '" + selector.proxy_asset + "' not present in the panel");
    proxy_asset = *a;
    shared_proxy.assign(rp.n_dates(), std::nullopt);
    for (std::size_t t = 0; t < rp.n_dates(); ++t)
      shared_proxy[t] = rp.ret(*proxy_asset, t);
  }

  std::size_t ev_index = 0;
  for (const Event& ev : events.events) {
    if (ev.category == Category::Excluded) continue;
    for (std::size_t a = 0; a < n_assets; ++a) {
      const Series* proxy = nullptr;
      bool constant_mean = selector.mode == ModelSelector::Mode::ConstantMean;
      Series ew;
      if (selector.mode == ModelSelector::Mode::MarketProxy) {
        if (proxy_asset && a == *proxy_asset)
          constant_mean = true;
        else
          proxy = &shared_proxy;
      } else if (selector.mode == ModelSelector::Mode::MarketEw) {
        ew = build_ew_proxy(rp, a);
        proxy = &ew;
      }
      FitOutcome fit = constant_mean
                           ? fit_constant_mean(rp, a, ev.date, w)
                           : fit_market_model(rp, a, *proxy, ev.date, w);
      for (int tau = w.tau1; tau <= w.tau2; ++tau) {
        auto key = std::make_pair(ev_index, tau);
        auto& slot = ar[key];
        if (slot.empty()) slot.assign(n_assets, std::nullopt);
        if (!fit.ok()) continue;
        auto t = rp.date_index(ev.date + tau);
        if (!t) continue;
        const Cell& r = rp.ret(a, *t);
        if (!r) continue;
        if (fit.fit->kind == ModelKind::ConstantMean) {
          slot[a] = *r - fit.fit->mu;
        } else {
          const Cell& m = (*proxy)[*t];
          if (!m) continue;
          slot[a] = *r - fit.fit->alpha - fit.fit->beta * *m;
        }
      }
    }
    ++ev_index;
  }

  double rho_sum = 0.0;
  int rho_n = 0;
  for (std::size_t a = 0; a < n_assets; ++a) {
    for (std::size_t b = a + 1; b < n_assets; ++b) {
      std::vector<double> xs, ys;
      for (const auto& [key, slot] : ar) {
        if (slot[a] && slot[b]) {
          xs.push_back(*slot[a]);
          ys.push_back(*slot[b]);
        }
      }
      if (xs.size() < 3) continue;
      const double mx = mean(xs), my = mean(ys);
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
      }
      if (sxx == 0.0 || syy == 0.0) continue;
      rho_sum += sxy / std::sqrt(sxx * syy);
      ++rho_n;
    }
  }
  return rho_n == 0 ? 0.0 : rho_sum / rho_n;
}

}  // namespace evk
