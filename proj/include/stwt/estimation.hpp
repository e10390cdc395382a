#pragma once

#include <bitset>
#include <stdexcept>
#include <string>

#include "stwt/core_model.hpp"
#include "stwt/panel_ingest.hpp"

namespace stwt {

/// No pair in the dataset matches the requested (quarter, cohort).
class EmptyCohortError : public std::runtime_error {
 public:
  EmptyCohortError(QuarterId quarter, const CohortFilter& filter);

  QuarterId quarter() const noexcept { return quarter_; }
  const CohortFilter& filter() const noexcept { return filter_; }

 private:
  QuarterId quarter_;
  CohortFilter filter_;
};

/// Distribution of one cohort over the states in one quarter.
struct StateShareTable {
  QuarterId quarter;
  CohortFilter filter;
  StateVector shares{};
  /// Weighted count per state.
  StateVector n_obs{};
  double total_weight = 0.0;
};

using RowFlags = std::bitset<kNumStates>;

struct TransitionMatrix {
  StateMatrix entries{};
  /// Weighted number of pairs departing each state.
  StateVector row_counts{};
  QuarterId from_quarter;
  QuarterId to_quarter;
  CohortFilter filter;
  /// Rows without departures, filled with 1/7.
  RowFlags fallback_rows;
  /// Rows whose support is positive but below the min-support threshold.
  RowFlags thin_rows;

  double operator()(LaborState from, LaborState to) const noexcept {
    return entries[state_index(from)][state_index(to)];
  }
};

struct EstimationOptions {
  double min_support = 30.0;
};

inline constexpr double kUniformFallback = 1.0 / static_cast<double>(kNumStates);

/// Shares of each state among pairs with quarter_from == quarter that match
/// the filter, counting each pair's state_from once.
/// Throws EmptyCohortError when the matching weight is zero.
StateShareTable compute_shares(const PanelDataset& data, const CohortFilter& filter,
                               QuarterId quarter);

/// p[i][j] = weight(i -> j) / weight(i -> *) over matching pairs departing
/// from_quarter. Rows with no departures get the uniform fallback and are
/// flagged. Throws EmptyCohortError when every row is empty.
TransitionMatrix estimate_transition_matrix(const PanelDataset& data,
                                            const CohortFilter& filter,
                                            QuarterId from_quarter,
                                            const EstimationOptions& options = {});

/// Divides each row by its sum. Throws std::invalid_argument on a negative
/// entry or a zero row.
StateMatrix renormalize_rows(const StateMatrix& m);

enum class FallbackPolicy { Uniform, AbsorbingFs };

/// Under AbsorbingFs, a flagged FS fallback row is replaced by a unit mass
/// on FS. Uniform leaves the matrix untouched.
TransitionMatrix apply_fallback_policy(TransitionMatrix m, FallbackPolicy policy);

}  // namespace stwt
