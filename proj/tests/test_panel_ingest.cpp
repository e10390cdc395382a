#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "stwt/fixtures.hpp"
#include "stwt/panel_ingest.hpp"

using namespace stwt;

namespace {

ParseResult parse_text(const std::string& text, PanelFormat format) {
  std::istringstream in(text);
  return parse_panel_stream(in, format, "inline");
}

WaveRow wave(std::string id, QuarterId q, LaborState s, std::size_t line = 0) {
  WaveRow r;
  r.person_id = std::move(id);
  r.quarter = q;
  r.state = s;
  r.demographics = Demographics{22, Sex::Female, true, Region::North};
  r.source_line = line;
  return r;
}

StateMatrix identity() {
  StateMatrix m{};
  for (std::size_t i = 0; i < kNumStates; ++i) m[i][i] = 1.0;
  return m;
}

StateVector uniform_shares() {
  StateVector v{};
  v.fill(1.0 / 7.0);
  return v;
}

}  // namespace

TEST_CASE("pair_rows: bad state code is rejected, valid rows kept") {
  const std::string text =
      "person_id,quarter_from,quarter_to,state_from,state_to,age,sex,citizen,region,weight\n"
      "a,2019.2,2019.3,EDU,TE,21,F,1,NORTH,\n"
      "b,2019.2,2019.3,EDU,EDU,22,M,1,SOUTH,1.5\n"
      "c,2019.2,2019.3,XX,EDU,22,M,0,CENTRE,\n"
      "d,2019.2,2019.3,U,NEET,23,M,0,CENTRE,\n";
  const auto r = parse_text(text, PanelFormat::PairRows);
  CHECK(r.dataset.pairs.size() == 3);
  REQUIRE(r.report.rejections.size() == 1);
  CHECK(r.report.rejections[0].line_number == 4);
  CHECK(r.report.rejections[0].reason.find("XX") != std::string::npos);
  CHECK(r.dataset.pairs[0].weight == 1.0);
  CHECK(r.dataset.pairs[1].weight == 1.5);
  CHECK(r.dataset.pairs[2].state_to == LaborState::NLFET);
  REQUIRE(r.dataset.quarter_range.has_value());
  CHECK(r.dataset.quarter_range->first == QuarterId{2019, 2});
  CHECK(r.dataset.quarter_range->second == QuarterId{2019, 3});
}

TEST_CASE("pair_rows: field-level validation") {
  const std::string text =
      "person_id,quarter_from,quarter_to,state_from,state_to,age,sex,citizen,region,weight\n"
      "a,2019.5,2020.1,EDU,TE,21,F,1,NORTH,\n"    // invalid quarter
      "b,2019.2,2019.4,EDU,TE,21,F,1,NORTH,\n"    // not a 3-month pair
      "c,2019.2,2019.3,EDU,TE,21,F,1,NORTH,0\n"   // zero weight
      "d,2019.2,2019.3,EDU,TE,21,F,1,NORTH,-2\n"  // negative weight
      "e,2019.2,2019.3,EDU,TE,21,X,1,NORTH,\n"    // sex
      "f,2019.2,2019.3,EDU,TE,21,F,2,NORTH,\n"    // citizen
      "g,2019.2,2019.3,EDU,TE,21,F,1,EAST,\n"     // region
      "h,2019.2,2019.3,EDU,TE,x1,F,1,NORTH,\n"    // age
      "i,2019.2,2019.3,EDU,TE\n"                  // too few fields
      "\n"
      "j,2019.2,2019.3,EDU,TE,40,F,1,NORTH,\n"    // out of age range: filtered
      "k,2019.2,2019.3,EDU,TE,14,F,1,NORTH,\n"    // out of age range: filtered
      "l,2019.4,2020.1,edu,te,34,f,0,south,2.5\r\n";
  const auto r = parse_text(text, PanelFormat::PairRows);
  CHECK(r.dataset.pairs.size() == 1);
  CHECK(r.dataset.pairs[0].person_id == "l");
  CHECK(r.dataset.pairs[0].quarter_to == QuarterId{2020, 1});
  CHECK(r.dataset.pairs[0].weight == 2.5);
  CHECK(r.report.filtered_out_of_age == 2);
  std::vector<std::size_t> lines;
  for (const auto& rej : r.report.rejections) lines.push_back(rej.line_number);
  CHECK(lines == std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8, 9, 10});
}

TEST_CASE("rejection report CSV") {
  RejectionReport report;
  report.rejections.push_back({4, "unknown state code 'XX' in state_from"});
  report.rejections.push_back({9, "expected 10 fields, found 5"});
  std::ostringstream out;
  report.write_csv(out);
  CHECK(out.str() ==
        "line_number,reason\n4,unknown state code 'XX' in state_from\n"
        "9,\"expected 10 fields, found 5\"\n");
}

TEST_CASE("header mismatch and unreadable files are fatal") {
  CHECK_THROWS_AS(parse_text("id,q\n", PanelFormat::PairRows), PanelIoError);
  CHECK_THROWS_AS(parse_text("", PanelFormat::WaveRows), PanelIoError);
  CHECK_THROWS_AS(parse_panel_file("/nonexistent/panel.csv", PanelFormat::PairRows),
                  PanelIoError);
}

TEST_CASE("wave_rows: adjacent waves link into one pair") {
  const std::string text =
      "person_id,quarter,state,age,sex,citizen,region,weight\n"
      "A,2019.2,EDU,21,F,1,NORTH,\n"
      "A,2019.3,TE,22,F,1,NORTH,\n";
  const auto r = parse_text(text, PanelFormat::WaveRows);
  REQUIRE(r.dataset.pairs.size() == 1);
  const auto& p = r.dataset.pairs[0];
  CHECK(p.state_from == LaborState::EDU);
  CHECK(p.state_to == LaborState::TE);
  CHECK(p.quarter_from == QuarterId{2019, 2});
  // Demographics come from the first wave.
  CHECK(p.demographics.age_at_first_wave == 21);
}

TEST_CASE("wave_rows: waves twelve months apart produce no pair") {
  const std::string text =
      "person_id,quarter,state,age,sex,citizen,region,weight\n"
      "A,2019.2,EDU,21,F,1,NORTH,\n"
      "A,2020.2,TE,22,F,1,NORTH,\n";
  const auto r = parse_text(text, PanelFormat::WaveRows);
  const std::vector<WaveRow> rows = {wave("A", {2019, 2}, LaborState::EDU),
                                     wave("A", {2020, 2}, LaborState::TE)};
  CHECK(oracle::adjacent_pairs(rows).empty());
  CHECK(r.dataset.pairs.empty());
  CHECK(r.report.empty());
}

TEST_CASE("link_waves on the rotation patterns") {
  const QuarterId t{2019, 1};
  SUBCASE("2-2-2 rotation yields two pairs") {
    const auto res = link_waves({wave("p", t, LaborState::EDU),
                                 wave("p", quarter_advance(t, 1), LaborState::EDU),
                                 wave("p", quarter_advance(t, 4), LaborState::TE),
                                 wave("p", quarter_advance(t, 5), LaborState::PE)});
    REQUIRE(res.pairs.size() == 2);
    CHECK(res.pairs[0].quarter_from == t);
    CHECK(res.pairs[1].quarter_from == quarter_advance(t, 4));
    CHECK(res.pairs[1].state_from == LaborState::TE);
    CHECK(res.pairs[1].state_to == LaborState::PE);
  }
  SUBCASE("single wave yields nothing") {
    CHECK(link_waves({wave("p", t, LaborState::EDU)}).pairs.empty());
  }
  SUBCASE("three consecutive waves yield two pairs") {
    const std::vector<WaveRow> rows = {wave("p", t, LaborState::EDU),
                                       wave("p", quarter_advance(t, 1), LaborState::TE),
                                       wave("p", quarter_advance(t, 2), LaborState::U)};
    CHECK(oracle::adjacent_pairs(rows).size() == 2);
    CHECK(link_waves(rows).pairs.size() == 2);
  }
}

TEST_CASE("link_waves: duplicates") {
  const QuarterId t{2019, 1};
  SUBCASE("conflicting states reject both rows") {
    const auto res = link_waves({wave("p", t, LaborState::EDU, 2),
                                 wave("p", t, LaborState::TE, 3),
                                 wave("p", quarter_successor(t), LaborState::TE, 4)});
    CHECK(res.pairs.empty());
    REQUIRE(res.rejections.size() == 2);
    CHECK(res.rejections[0].line_number == 2);
    CHECK(res.rejections[1].line_number == 3);
    CHECK(res.rejections[0].reason.find("conflicting") != std::string::npos);
  }
  SUBCASE("exact repeat keeps one row") {
    const auto res = link_waves({wave("p", t, LaborState::EDU, 2),
                                 wave("p", t, LaborState::EDU, 3),
                                 wave("p", quarter_successor(t), LaborState::TE, 4)});
    CHECK(res.pairs.size() == 1);
    REQUIRE(res.rejections.size() == 1);
    CHECK(res.rejections[0].line_number == 3);
  }
}

TEST_CASE("link_waves property: matches the adjacency oracle, sorted, idempotent") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WaveRow> rows;
    const int people = 1 + static_cast<int>(rng() % 6);
    for (int p = 0; p < people; ++p) {
      std::set<int> offsets;
      const int n = 1 + static_cast<int>(rng() % 7);
      for (int k = 0; k < n; ++k) offsets.insert(static_cast<int>(rng() % 10));
      for (int off : offsets) {
        rows.push_back(wave("id" + std::to_string(p), quarter_advance({2018, 3}, off),
                            state_at(rng() % kNumStates)));
      }
    }
    std::shuffle(rows.begin(), rows.end(), rng);

    const auto expected = oracle::adjacent_pairs(rows);
    const auto res = link_waves(rows);
    CHECK(res.rejections.empty());
    REQUIRE(res.pairs.size() == expected.size());
    for (const auto& p : res.pairs) {
      CHECK(p.quarter_to == quarter_successor(p.quarter_from));
      const int from = p.quarter_from.year * 4 + p.quarter_from.quarter - 1;
      CHECK(expected.count({p.person_id, from, from + 1}) == 1);
    }
    CHECK(std::is_sorted(res.pairs.begin(), res.pairs.end(), [](const auto& a, const auto& b) {
      return std::tie(a.person_id, a.quarter_from) < std::tie(b.person_id, b.quarter_from);
    }));

    // Rebuild waves from the pairs and link again.
    std::vector<WaveRow> rebuilt;
    for (const auto& p : res.pairs) {
      rebuilt.push_back(wave(p.person_id, p.quarter_from, p.state_from));
      rebuilt.back().demographics = p.demographics;
      rebuilt.push_back(wave(p.person_id, p.quarter_to, p.state_to));
      rebuilt.back().demographics = p.demographics;
    }
    const auto again = link_waves(rebuilt);
    CHECK(again.pairs == res.pairs);
  }
}

TEST_CASE("pair_rows writer and parser agree") {
  SyntheticPanelParams params;
  params.truth = find_fixture("early_2019Q3")->renormalized;
  params.initial_shares = uniform_shares();
  params.n_individuals = 50;
  params.n_quarters = 10;
  params.seed = 3;
  const PanelDataset data = generate_synthetic_panel(params);
  std::stringstream buf;
  write_pair_rows(buf, data.pairs);
  const auto parsed = parse_panel_stream(buf, PanelFormat::PairRows, "roundtrip");
  CHECK(parsed.report.empty());
  CHECK(parsed.dataset.pairs == data.pairs);
}

TEST_CASE("generator: identity truth keeps everyone in place") {
  SyntheticPanelParams params;
  params.truth = identity();
  params.initial_shares = uniform_shares();
  params.n_individuals = 500;
  params.n_quarters = 12;
  params.seed = 11;
  const PanelDataset data = generate_synthetic_panel(params);
  CHECK(data.pairs.size() == 1000);
  for (const auto& p : data.pairs) CHECK(p.state_from == p.state_to);
}

TEST_CASE("generator: rotation pattern and staggered entries") {
  SyntheticPanelParams params;
  params.truth = find_fixture("early_2019Q3")->renormalized;
  params.initial_shares = uniform_shares();
  params.n_individuals = 40;
  params.start_quarter = {2019, 1};
  params.n_quarters = 10;
  params.seed = 5;
  const PanelDataset data = generate_synthetic_panel(params);
  std::map<std::string, std::vector<ObservationPair>> by_person;
  for (const auto& p : data.pairs) by_person[p.person_id].push_back(p);
  CHECK(by_person.size() == 40);
  std::set<QuarterId> entries;
  for (const auto& [id, pairs] : by_person) {
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[1].quarter_from == quarter_advance(pairs[0].quarter_from, 4));
    CHECK(pairs[0].demographics == pairs[1].demographics);
    entries.insert(pairs[0].quarter_from);
  }
  // Window positions 0..4 fit a full 6-quarter rotation.
  CHECK(entries.size() == 5);
  REQUIRE(data.quarter_range.has_value());
  CHECK(data.quarter_range->first == QuarterId{2019, 1});
  CHECK(data.quarter_range->second == quarter_advance({2019, 1}, 9));
}

TEST_CASE("generator: short windows drop waves past the end") {
  SyntheticPanelParams params;
  params.truth = identity();
  params.initial_shares = uniform_shares();
  params.n_individuals = 10;
  params.n_quarters = 3;
  const PanelDataset data = generate_synthetic_panel(params);
  CHECK(data.pairs.size() == 10);
}

TEST_CASE("generator: EDU split half to TE") {
  StateMatrix truth = identity();
  const auto edu = state_index(LaborState::EDU);
  truth[edu] = {0, 0.5, 0, 0, 0, 0.5, 0};
  StateVector start{};
  start[edu] = 1.0;
  SyntheticPanelParams params;
  params.truth = truth;
  params.initial_shares = start;
  params.n_individuals = 100000;
  params.n_quarters = 10;
  params.seed = 99;
  const PanelDataset data = generate_synthetic_panel(params);
  const auto tab = oracle::tabulate(data.pairs, [](const auto&) { return true; });
  CHECK(std::abs(tab.proportion("EDU", "TE") - 0.5) <= 0.01);
}

TEST_CASE("generator: deterministic in the seed") {
  SyntheticPanelParams params;
  params.truth = find_fixture("early_2020Q3")->renormalized;
  params.initial_shares = uniform_shares();
  params.n_individuals = 300;
  params.n_quarters = 8;
  params.seed = 42;
  const PanelDataset a = generate_synthetic_panel(params);
  const PanelDataset b = generate_synthetic_panel(params);
  CHECK(a.pairs == b.pairs);
  params.seed = 43;
  const PanelDataset c = generate_synthetic_panel(params);
  CHECK_FALSE(a.pairs == c.pairs);
}

TEST_CASE("generator: empirical frequencies converge to the truth") {
  const StateMatrix truth = find_fixture("early_2020Q3")->renormalized;
  SyntheticPanelParams params;
  params.truth = truth;
  params.initial_shares = uniform_shares();
  params.n_individuals = 100000;
  params.n_quarters = 10;
  params.seed = 1;
  const PanelDataset data = generate_synthetic_panel(params);
  const auto tab = oracle::tabulate(data.pairs, [](const auto&) { return true; });
  double max_err = 0.0;
  for (std::size_t i = 0; i < kNumStates; ++i) {
    for (std::size_t j = 0; j < kNumStates; ++j) {
      const double p = tab.proportion(std::string(to_string(state_at(i))),
                                      std::string(to_string(state_at(j))));
      REQUIRE(p >= 0.0);
      max_err = std::max(max_err, std::abs(p - truth[i][j]));
    }
  }
  CHECK(max_err <= 0.01);
}

TEST_CASE("generator: invalid inputs") {
  SyntheticPanelParams params;
  params.truth = identity();
  params.initial_shares = uniform_shares();
  params.n_individuals = 10;

  auto bad = params;
  bad.truth[2][2] = 0.5;
  CHECK_THROWS_AS(generate_synthetic_panel(bad), std::invalid_argument);
  bad = params;
  bad.initial_shares[0] += 0.01;
  CHECK_THROWS_AS(generate_synthetic_panel(bad), std::invalid_argument);
  bad = params;
  bad.n_individuals = 0;
  CHECK_THROWS_AS(generate_synthetic_panel(bad), std::invalid_argument);
}

TEST_CASE("parse_panel_file reads from disk") {
  const auto path = std::filesystem::temp_directory_path() / "stwt_test_waves.csv";
  {
    std::ofstream out(path);
    out << "person_id,quarter,state,age,sex,citizen,region,weight\n"
        << "A,2019.2,EDU,21,F,1,NORTH,\n"
        << "A,2019.3,TE,21,F,1,NORTH,\n"
        << "B,2019.2,EDU,21,M,1,NORTH,\n"
        << "B,2019.3,EDU,21,M,1,NORTH,\n"
        << "B,2019.3,EDU,21,M,1,NORTH,\n";
  }
  const auto r = parse_panel_file(path, PanelFormat::WaveRows);
  CHECK(r.dataset.pairs.size() == 2);
  REQUIRE(r.report.rejections.size() == 1);
  CHECK(r.report.rejections[0].line_number == 6);
  std::filesystem::remove(path);
}
