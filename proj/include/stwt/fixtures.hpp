#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stwt/core_model.hpp"
#include "stwt/estimation.hpp"

namespace stwt {

/// A published quarter-on-quarter transition matrix, stored as printed
/// (2 decimals, rows summing to 0.98..1.02) and row-renormalized.
struct Fixture {
  std::string name;
  /// Absent for synthetic demo fixtures.
  std::optional<AgeBand> age_band;
  QuarterId from_quarter;
  QuarterId to_quarter;
  StateMatrix raw{};
  StateMatrix renormalized{};
  /// Rows printed as the uniform 0.14 pattern.
  RowFlags fallback_rows;
  std::string provenance;

  /// Renormalized entries with the fixture's quarters and fallback flags.
  TransitionMatrix transition_matrix() const;
};

/// A published expected first passage time, in years.
struct EfptTarget {
  std::string cohort;
  LaborState source = LaborState::EDU;
  LaborState target = LaborState::PE;
  QuarterId quarter;
  double published_years = 0.0;
  /// Fixture whose matrix corresponds to this entry, when one is embedded.
  std::optional<std::string> fixture;
};

const std::vector<Fixture>& all_fixtures();
/// nullptr when no fixture has this name.
const Fixture* find_fixture(std::string_view name);
const std::vector<EfptTarget>& efpt_targets();

}  // namespace stwt
