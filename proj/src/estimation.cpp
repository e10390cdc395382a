#include "stwt/estimation.hpp"

#include <stdexcept>

namespace stwt {

EmptyCohortError::EmptyCohortError(QuarterId quarter, const CohortFilter& filter)
    : std::runtime_error("empty cohort: no observations for quarter " + to_string(quarter) +
                         " and filter " + filter.describe()),
      quarter_(quarter),
      filter_(filter) {}

StateShareTable compute_shares(const PanelDataset& data, const CohortFilter& filter,
                               QuarterId quarter) {
  StateShareTable table;
  table.quarter = quarter;
  table.filter = filter;
  for (const auto& pair : data.pairs) {
    if (pair.quarter_from != quarter || !filter.matches(pair.demographics)) continue;
    table.n_obs[state_index(pair.state_from)] += pair.weight;
  }
  for (double w : table.n_obs) table.total_weight += w;
  if (!(table.total_weight > 0.0)) throw EmptyCohortError(quarter, filter);
  for (std::size_t s = 0; s < kNumStates; ++s) {
    table.shares[s] = table.n_obs[s] / table.total_weight;
  }
  return table;
}

TransitionMatrix estimate_transition_matrix(const PanelDataset& data,
                                            const CohortFilter& filter,
                                            QuarterId from_quarter,
                                            const EstimationOptions& options) {
  TransitionMatrix m;
  m.from_quarter = from_quarter;
  m.to_quarter = quarter_successor(from_quarter);
  m.filter = filter;

  StateMatrix counts{};
  for (const auto& pair : data.pairs) {
    if (pair.quarter_from != from_quarter || !filter.matches(pair.demographics)) continue;
    counts[state_index(pair.state_from)][state_index(pair.state_to)] += pair.weight;
  }

  bool any = false;
  for (std::size_t i = 0; i < kNumStates; ++i) {
    double total = 0.0;
    for (double c : counts[i]) total += c;
    m.row_counts[i] = total;
    if (total > 0.0) {
      any = true;
      for (std::size_t j = 0; j < kNumStates; ++j) m.entries[i][j] = counts[i][j] / total;
      if (total < options.min_support) m.thin_rows.set(i);
    } else {
      m.entries[i].fill(kUniformFallback);
      m.fallback_rows.set(i);
    }
  }
  if (!any) throw EmptyCohortError(from_quarter, filter);
  return m;
}

StateMatrix renormalize_rows(const StateMatrix& m) {
  StateMatrix out{};
  for (std::size_t i = 0; i < kNumStates; ++i) {
    double sum = 0.0;
    for (double p : m[i]) {
      if (!(p >= 0.0)) {
        throw std::invalid_argument("row " + std::string(to_string(state_at(i))) +
                                    " has a negative or NaN entry");
      }
      sum += p;
    }
    if (!(sum > 0.0)) {
      throw std::invalid_argument("row " + std::string(to_string(state_at(i))) +
                                  " sums to zero; apply the uniform fallback first");
    }
    for (std::size_t j = 0; j < kNumStates; ++j) out[i][j] = m[i][j] / sum;
  }
  return out;
}

TransitionMatrix apply_fallback_policy(TransitionMatrix m, FallbackPolicy policy) {
  constexpr std::size_t fs = state_index(LaborState::FS);
  if (policy == FallbackPolicy::AbsorbingFs && m.fallback_rows.test(fs)) {
    m.entries[fs].fill(0.0);
    m.entries[fs][fs] = 1.0;
  }
  return m;
}

}  // namespace stwt
