// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "stwt/estimation.hpp"
#include "stwt/fixtures.hpp"
#include "stwt/markov_fpt.hpp"
#include "stwt/panel_ingest.hpp"
#include "stwt/report.hpp"

using namespace stwt;
using S = LaborState;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

MarkovChain fixture_chain(const char* name) {
  return MarkovChain::from_states(find_fixture(name)->renormalized);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1. First-passage recursion against exhaustive path enumeration.
Outcome fpt_exactness() {
  Outcome o;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> size_dist(2, 4);
  double worst = 0.0;
  int matrices = 0;
  for (; matrices < 150; ++matrices) {
    const std::size_t k = size_dist(rng);
    const auto rows = oracle::random_stochastic(rng, k, 0.25);
    const MarkovChain c(rows);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const auto d = fpt_distribution(c, i, j, 6);
        for (int n = 1; n <= 6; ++n) {
          worst = std::max(worst, std::abs(d.f[static_cast<std::size_t>(n - 1)] -
                                           oracle::path_sum_fpt(rows, i, j, n)));
        }
      }
    }
  }
  o.require(worst <= 1e-12, "max deviation " + num(worst));
  if (o.ok) o.detail = std::to_string(matrices) + " matrices, max deviation " + num(worst);
  return o;
}

// 2. Series and linear-system EFPT agree.
Outcome dual_method() {
  Outcome o;
  double worst = 0.0;
  int pairs = 0;
  auto compare = [&](const MarkovChain& c, std::size_t i, std::size_t j) {
    const auto s = efpt_series(c, i, j);
    const auto l = efpt_linear(c, i, j);
    worst = std::max(worst, std::abs(s.efpt_quarters - l.efpt_quarters) / l.efpt_quarters);
    ++pairs;
  };
  for (const auto& fx : all_fixtures()) {
    const auto c = MarkovChain::from_states(fx.renormalized);
    for (std::size_t i = 0; i < kNumStates; ++i) {
      for (std::size_t j = 0; j < kNumStates; ++j) {
        if (check_well_defined(c, i, j).verdict == Verdict::WellDefined) compare(c, i, j);
      }
    }
  }
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> size_dist(2, 7);
  int random_chains = 0;
  while (random_chains < 100) {
    const std::size_t k = size_dist(rng);
    const MarkovChain c(oracle::random_stochastic(rng, k, 0.3));
    const std::size_t i = rng() % k, j = rng() % k;
    if (check_well_defined(c, i, j).verdict != Verdict::WellDefined) continue;
    compare(c, i, j);
    ++random_chains;
  }
  o.require(worst <= 1e-6, "max relative gap " + num(worst));
  if (o.ok) o.detail = std::to_string(pairs) + " pairs, max relative gap " + num(worst);
  return o;
}

// 3. Published EFPT for early young, 2019.II -> 2019.III.
Outcome table_reproduction() {
  Outcome o;
  const auto c = fixture_chain("early_2019Q3");
  const double pe = efpt_series(c, S::EDU, S::PE).efpt_years;
  const double te = efpt_series(c, S::EDU, S::TE).efpt_years;
  o.require(std::abs(pe - 8.63) <= 0.2 * 8.63, "EDU->PE " + num(pe) + " y");
  o.require(std::abs(te - 3.72) <= 0.2 * 3.72, "EDU->TE " + num(te) + " y");
  if (o.ok) o.detail = "EDU->PE " + num(pe) + " y (8.63), EDU->TE " + num(te) + " y (3.72)";
  return o;
}

// 4. Probability of reaching PE from EDU within 40 quarters.
Outcome cdf_claim() {
  Outcome o;
  const auto cdf = fpt_cdf(fpt_distribution(fixture_chain("early_2019Q3"), S::EDU, S::PE, 40));
  const double p = cdf.back();
  o.require(p >= 0.63 && p <= 0.77, "cdf(40) = " + num(p));
  if (o.ok) o.detail = "cdf(40) = " + num(p);
  return o;
}

// 5. A state with no departures gets the uniform row.
Outcome uniform_fallback() {
  Outcome o;
  SyntheticPanelParams params;
  params.truth = find_fixture("early_2020Q3")->renormalized;
  params.initial_shares = {0.1, 0.2, 0.2, 0.1, 0.1, 0.3, 0.0};
  // FS only reachable through transitions; estimate on the first quarter.
  params.n_individuals = 5000;
  params.start_quarter = {2019, 2};
  params.seed = 5;
  const auto data = generate_synthetic_panel(params);
  const auto m = estimate_transition_matrix(data, {}, params.start_quarter);
  const auto fs = state_index(S::FS);
  o.require(m.row_counts[fs] == 0.0, "FS has departures");
  o.require(m.fallback_rows.test(fs), "FS row not flagged");
  for (double p : m.entries[fs]) {
    o.require(p == 1.0 / 7.0, "FS cell " + num(p));
    o.require(format_two_decimals(p) == "0.14", "FS cell prints " + format_two_decimals(p));
  }
  if (o.ok) o.detail = "FS row = 1/7 per cell, prints 0.14, flagged";
  return o;
}

// 6. Simulate from the 2020.II -> 2020.III fixture and re-estimate.
Outcome round_trip() {
  Outcome o;
  const Fixture& fx = *find_fixture("early_2020Q3");
  SyntheticPanelParams params;
  params.truth = fx.renormalized;
  params.initial_shares.fill(1.0 / 7.0);
  params.n_individuals = 100000;
  params.start_quarter = fx.from_quarter;
  params.n_quarters = 6;
  params.seed = 2020;
  params.demographics.age_band = fx.age_band;

  // Through the text format, as the command line would.
  std::stringstream buf;
  write_pair_rows(buf, generate_synthetic_panel(params).pairs);
  const auto parsed = parse_panel_stream(buf, PanelFormat::PairRows, "synthetic");
  o.require(parsed.report.empty(), "generated rows rejected");
  const auto m = estimate_transition_matrix(parsed.dataset, {}, fx.from_quarter);
  double worst = 0.0;
  for (std::size_t i = 0; i < kNumStates; ++i) {
    for (std::size_t j = 0; j < kNumStates; ++j) {
      worst = std::max(worst, std::abs(m.entries[i][j] - fx.renormalized[i][j]));
    }
  }
  o.require(worst <= 0.01, "max abs cell error " + num(worst));
  if (o.ok) o.detail = "max abs cell error " + num(worst);
  return o;
}

// 7. Geometric first passage: EFPT = 1/q quarters.
Outcome geometric() {
  Outcome o;
  double worst = 0.0;
  for (double q : {0.1, 0.25, 0.5, 1.0}) {
    const MarkovChain c({{1.0 - q, q}, {0.0, 1.0}});
    const auto s = efpt_series(c, 0, 1, {1e-15, 100000});
    const auto l = efpt_linear(c, 0, 1);
    worst = std::max({worst, std::abs(s.efpt_quarters - 1.0 / q),
                      std::abs(l.efpt_quarters - 1.0 / q)});
  }
  o.require(worst <= 1e-9, "max error " + num(worst));
  if (o.ok) o.detail = "q in {0.1,0.25,0.5,1}, max error " + num(worst) + " quarters";
  return o;
}

// 8. Relabelling, weight rescaling and cdf monotonicity.
Outcome invariances() {
  Outcome o;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 5;
    const auto rows = oracle::random_stochastic(rng, k, 0.0);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    oracle::Rows permuted(k, std::vector<double>(k));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) permuted[perm[a]][perm[b]] = rows[a][b];
    }
    const MarkovChain c(rows), cp(permuted);
    const auto d1 = fpt_distribution(c, 0, 2, 30), d2 = fpt_distribution(cp, perm[0], perm[2], 30);
    for (std::size_t n = 0; n < 30; ++n) {
      o.require(std::abs(d1.f[n] - d2.f[n]) <= 1e-12, "relabelled f differs");
    }
    const double e1 = efpt_linear(c, 0, 2).efpt_quarters;
    const double e2 = efpt_linear(cp, perm[0], perm[2]).efpt_quarters;
    o.require(std::abs(e1 - e2) <= 1e-9 * e1, "relabelled EFPT differs");
    const auto cdf = fpt_cdf(d1);
    for (std::size_t n = 1; n < cdf.size(); ++n) {
      o.require(cdf[n] >= cdf[n - 1] && cdf[n] <= 1.0 + 1e-12, "cdf not monotone");
    }
  }

  SyntheticPanelParams params;
  params.truth = find_fixture("late_2020Q3")->renormalized;
  params.initial_shares.fill(1.0 / 7.0);
  params.n_individuals = 2000;
  params.start_quarter = {2020, 2};
  std::uniform_real_distribution<double> w(0.1, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    params.seed = 100 + static_cast<std::uint64_t>(trial);
    auto data = generate_synthetic_panel(params);
    for (auto& p : data.pairs) p.weight = w(rng);
    auto scaled = data;
    const double factor = std::exp(std::uniform_real_distribution<double>(-6.0, 6.0)(rng));
    for (auto& p : scaled.pairs) p.weight *= factor;
    const auto m1 = estimate_transition_matrix(data, {}, params.start_quarter);
    const auto m2 = estimate_transition_matrix(scaled, {}, params.start_quarter);
    const auto s1 = compute_shares(data, {}, params.start_quarter);
    const auto s2 = compute_shares(scaled, {}, params.start_quarter);
    for (std::size_t i = 0; i < kNumStates; ++i) {
      o.require(std::abs(s1.shares[i] - s2.shares[i]) <= 1e-12, "shares change under rescaling");
      for (std::size_t j = 0; j < kNumStates; ++j) {
        o.require(std::abs(m1.entries[i][j] - m2.entries[i][j]) <= 1e-12,
                  "matrix changes under rescaling");
      }
    }
  }
  if (o.ok) o.detail = "50 relabellings, 20 weight rescalings";
  return o;
}

// 9. Identity matrix: divergent verdict, infinite EFPT naming the trap.
Outcome degenerate() {
  Outcome o;
  StateMatrix id{};
  for (std::size_t i = 0; i < kNumStates; ++i) id[i][i] = 1.0;
  const auto c = MarkovChain::from_states(id);
  int pairs = 0;
  for (std::size_t i = 0; i < kNumStates; ++i) {
    for (std::size_t j = 0; j < kNumStates; ++j) {
      if (i == j) continue;
      o.require(check_well_defined(c, i, j).verdict == Verdict::Divergent, "verdict not divergent");
      try {
        efpt_linear(c, i, j);
        o.require(false, "linear method returned a finite EFPT");
      } catch (const InfiniteEfptError& e) {
        o.require(e.trapped_class() == std::vector<std::size_t>{i}, "wrong trapped class");
        o.require(std::string(e.what()).find("{" + std::string(to_string(state_at(i))) + "}") !=
                      std::string::npos,
                  "diagnostic does not name the class");
      }
      ++pairs;
    }
  }
  if (o.ok) o.detail = std::to_string(pairs) + " pairs divergent with named trap";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  const Criterion criteria[] = {
      {"first-passage recursion matches path enumeration", fpt_exactness, 5.0},
      {"series and linear EFPT agree", dual_method, 10.0},
      {"published EDU->PE and EDU->TE EFPT within 20%", table_reproduction, 1.0},
      {"Pr(EDU->PE within 40 quarters) in [0.63, 0.77]", cdf_claim, 1.0},
      {"uniform fallback row for a state without departures", uniform_fallback, 1.0},
      {"simulate/estimate round trip, 100k individuals", round_trip, 60.0},
      {"geometric EFPT = 1/q by both methods", geometric, 0.0},
      {"relabelling, rescaling and monotonicity properties", invariances, 0.0},
      {"identity chain is divergent with a named trap", degenerate, 0.0},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.ok = false;
      o.detail += " (over " + num(c.budget_s) + " s budget)";
    }
    if (!o.ok) ++failures;
    std::printf("%s [%d] %s: %s (%.3f s)\n", o.ok ? "PASS" : "FAIL", index, c.name,
                o.detail.c_str(), secs);
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
