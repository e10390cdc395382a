#include "stwt/fixtures.hpp"

#include <algorithm>

namespace stwt {

namespace {

constexpr double kPrintedUniform = 0.14;

using Row = std::array<double, kNumStates>;
constexpr Row kPrintedFallbackRow = {0.14, 0.14, 0.14, 0.14, 0.14, 0.14, 0.14};

Fixture make_fixture(std::string name, std::optional<AgeBand> band, QuarterId from,
                     StateMatrix raw, std::string provenance) {
  Fixture f;
  f.name = std::move(name);
  f.age_band = band;
  f.from_quarter = from;
  f.to_quarter = quarter_successor(from);
  f.raw = raw;
  f.renormalized = renormalize_rows(raw);
  for (std::size_t i = 0; i < kNumStates; ++i) {
    if (std::all_of(raw[i].begin(), raw[i].end(),
                    [](double p) { return p == kPrintedUniform; })) {
      f.fallback_rows.set(i);
    }
  }
  f.provenance = std::move(provenance);
  return f;
}

// Rows and columns in canonical order SE, TE, PE, U, NLFET, EDU, FS.
std::vector<Fixture> build_fixtures() {
  std::vector<Fixture> out;
  const auto early = AgeBand::EarlyYoung;
  const auto late = AgeBand::LateYoung;

  out.push_back(make_fixture(
      "early_2019Q2", early, {2019, 1},
      {{{0.78, 0.02, 0.05, 0, 0.03, 0.13, 0},
        {0.01, 0.78, 0.05, 0.06, 0.02, 0.08, 0},
        {0.01, 0.01, 0.92, 0.02, 0.02, 0.02, 0},
        {0.01, 0.13, 0.02, 0.46, 0.24, 0.13, 0},
        {0.02, 0.08, 0.02, 0.21, 0.59, 0.08, 0},
        {0.01, 0.04, 0.01, 0.02, 0.03, 0.88, 0},
        kPrintedFallbackRow}},
      "early young (20-24), block 2019.I -> 2019.II of the early-young transition table"));
  out.push_back(make_fixture(
      "early_2019Q3", early, {2019, 2},
      {{{0.72, 0.04, 0.03, 0.02, 0.04, 0.15, 0},
        {0, 0.79, 0.07, 0.03, 0.05, 0.06, 0},
        {0, 0.04, 0.89, 0.01, 0.01, 0.04, 0},
        {0.02, 0.17, 0.01, 0.36, 0.31, 0.13, 0},
        {0.02, 0.10, 0.04, 0.16, 0.63, 0.06, 0},
        {0.01, 0.06, 0.01, 0.01, 0.03, 0.88, 0},
        kPrintedFallbackRow}},
      "early young (20-24), block 2019.II -> 2019.III of the early-young transition table"));
  out.push_back(make_fixture(
      "early_2020Q2", early, {2020, 1},
      {{{0.64, 0.01, 0.10, 0.05, 0.05, 0.15, 0},
        {0.01, 0.66, 0.06, 0.07, 0.10, 0.06, 0.05},
        {0.03, 0.06, 0.65, 0.03, 0.04, 0.02, 0.18},
        {0.01, 0.07, 0.02, 0.29, 0.52, 0.07, 0.01},
        {0.01, 0.04, 0.01, 0.19, 0.69, 0.05, 0},
        {0.01, 0.03, 0.01, 0.01, 0.03, 0.91, 0.01},
        {0, 0, 1, 0, 0, 0, 0}}},
      "early young (20-24), block 2020.I -> 2020.II of the early-young transition table"));
  out.push_back(make_fixture(
      "early_2020Q3", early, {2020, 2},
      {{{0.75, 0.09, 0.01, 0.02, 0.02, 0.11, 0},
        {0.01, 0.80, 0.06, 0.04, 0.03, 0.07, 0},
        {0.01, 0.05, 0.85, 0.02, 0.02, 0.03, 0.02},
        {0.02, 0.12, 0.02, 0.41, 0.32, 0.10, 0},
        {0, 0.13, 0.01, 0.32, 0.41, 0.12, 0},
        {0.01, 0.04, 0.01, 0.04, 0.02, 0.87, 0},
        {0, 0.04, 0.75, 0.05, 0.06, 0.02, 0.08}}},
      "early young (20-24), block 2020.II -> 2020.III of the early-young transition table"));

  // The first late-young block labels its rows 2019.II although the caption
  // quarters are 2019.I -> 2019.II; fixtures follow the caption.
  out.push_back(make_fixture(
      "late_2019Q2", late, {2019, 1},
      {{{0.88, 0.04, 0.02, 0.02, 0.04, 0.02, 0},
        {0.01, 0.83, 0.07, 0.03, 0.03, 0.02, 0},
        {0.01, 0.03, 0.93, 0.01, 0.02, 0.01, 0},
        {0.03, 0.11, 0.04, 0.46, 0.29, 0.07, 0},
        {0.01, 0.07, 0.03, 0.21, 0.63, 0.06, 0},
        {0.01, 0.06, 0.02, 0.05, 0.04, 0.82, 0},
        {0, 0, 0.36, 0, 0, 0, 0.64}}},
      "late young (25-29), block 2019.I -> 2019.II of the late-young transition table "
      "(rows printed with 2019.II labels)"));
  out.push_back(make_fixture(
      "late_2019Q3", late, {2019, 2},
      {{{0.87, 0.04, 0.01, 0.04, 0.04, 0.01, 0},
        {0.01, 0.77, 0.09, 0.04, 0.07, 0.02, 0},
        {0.01, 0.03, 0.94, 0, 0.02, 0, 0},
        {0.02, 0.12, 0.03, 0.40, 0.37, 0.07, 0},
        {0.02, 0.08, 0.01, 0.19, 0.67, 0.04, 0},
        {0.01, 0.06, 0.01, 0.03, 0.07, 0.81, 0},
        kPrintedFallbackRow}},
      "late young (25-29), block 2019.II -> 2019.III of the late-young transition table"));
  out.push_back(make_fixture(
      "late_2020Q2", late, {2020, 1},
      {{{0.88, 0.02, 0.03, 0.02, 0.01, 0.02, 0.01},
        {0.02, 0.68, 0.06, 0.07, 0.10, 0.04, 0.04},
        {0, 0.04, 0.76, 0, 0.03, 0.01, 0.16},
        {0.01, 0.09, 0.03, 0.31, 0.48, 0.06, 0.02},
        {0.01, 0.03, 0.02, 0.16, 0.74, 0.03, 0},
        {0.03, 0.05, 0.02, 0.05, 0.06, 0.79, 0},
        {0, 0.01, 0.84, 0, 0.15, 0, 0}}},
      "late young (25-29), block 2020.I -> 2020.II of the late-young transition table"));
  out.push_back(make_fixture(
      "late_2020Q3", late, {2020, 2},
      {{{0.86, 0.02, 0.03, 0.03, 0.02, 0.04, 0},
        {0.02, 0.76, 0.06, 0.05, 0.09, 0.02, 0},
        {0.02, 0.02, 0.94, 0.01, 0.01, 0, 0.01},
        {0.03, 0.09, 0.01, 0.46, 0.28, 0.14, 0},
        {0, 0.07, 0.02, 0.23, 0.61, 0.06, 0},
        {0.04, 0.06, 0.01, 0.08, 0.06, 0.76, 0},
        {0, 0.10, 0.76, 0.01, 0.05, 0, 0.07}}},
      "late young (25-29), block 2020.II -> 2020.III of the late-young transition table"));

  // Demo chain: from EDU the first passage to PE is geometric with q = 0.25.
  StateMatrix geometric{};
  for (std::size_t i = 0; i < kNumStates; ++i) geometric[i][i] = 1.0;
  constexpr auto edu = state_index(LaborState::EDU);
  geometric[edu][edu] = 0.75;
  geometric[edu][state_index(LaborState::PE)] = 0.25;
  out.push_back(make_fixture("geometric_q25", std::nullopt, {2019, 2}, geometric,
                             "synthetic demo: EDU -> PE with probability 0.25 per quarter, "
                             "all other states absorbing"));
  return out;
}

}  // namespace

TransitionMatrix Fixture::transition_matrix() const {
  TransitionMatrix m;
  m.entries = renormalized;
  m.from_quarter = from_quarter;
  m.to_quarter = to_quarter;
  if (age_band) m.filter.age_band = age_band;
  m.fallback_rows = fallback_rows;
  return m;
}

const std::vector<Fixture>& all_fixtures() {
  static const std::vector<Fixture> fixtures = build_fixtures();
  return fixtures;
}

const Fixture* find_fixture(std::string_view name) {
  for (const auto& f : all_fixtures()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const std::vector<EfptTarget>& efpt_targets() {
  using S = LaborState;
  static const std::vector<EfptTarget> targets = {
      {"All", S::EDU, S::PE, {2019, 3}, 8.63, "early_2019Q3"},
      {"All", S::EDU, S::PE, {2020, 3}, 11.25, "early_2020Q3"},
      {"All", S::EDU, S::TE, {2019, 3}, 3.72, "early_2019Q3"},
      {"All", S::EDU, S::TE, {2020, 3}, 4.16, "early_2020Q3"},
      {"Males", S::EDU, S::PE, {2019, 3}, 6.88, std::nullopt},
      {"Males", S::EDU, S::PE, {2020, 3}, 10.39, std::nullopt},
      {"Males", S::EDU, S::TE, {2019, 3}, 3.46, std::nullopt},
      {"Males", S::EDU, S::TE, {2020, 3}, 3.60, std::nullopt},
      {"Females", S::EDU, S::PE, {2019, 3}, 11.70, std::nullopt},
      {"Females", S::EDU, S::PE, {2020, 3}, 12.85, std::nullopt},
      {"Females", S::EDU, S::TE, {2019, 3}, 4.08, std::nullopt},
      {"Females", S::EDU, S::TE, {2020, 3}, 4.89, std::nullopt},
      {"Non Italian citizens", S::EDU, S::PE, {2019, 3}, 6.43, std::nullopt},
      {"Non Italian citizens", S::EDU, S::PE, {2020, 3}, 9.09, std::nullopt},
      {"Non Italian citizens", S::EDU, S::TE, {2019, 3}, 6.40, std::nullopt},
      {"Non Italian citizens", S::EDU, S::TE, {2020, 3}, 7.55, std::nullopt},
      {"South", S::EDU, S::PE, {2019, 3}, 14.92, std::nullopt},
      {"South", S::EDU, S::PE, {2020, 3}, 14.88, std::nullopt},
      {"South", S::EDU, S::TE, {2019, 3}, 4.23, std::nullopt},
      {"South", S::EDU, S::TE, {2020, 3}, 5.98, std::nullopt},
  };
  return targets;
}

}  // namespace stwt
