#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stwt/core_model.hpp"
#include "stwt/estimation.hpp"

namespace stwt {

/// A row is negative, NaN, or does not sum to 1.
class NonStochasticError : public std::invalid_argument {
 public:
  NonStochasticError(std::size_t row, const std::string& what)
      : std::invalid_argument(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// The expected first passage time is infinite: the target is unreachable,
/// or a closed class that excludes it can be entered from the source.
class InfiniteEfptError : public std::runtime_error {
 public:
  InfiniteEfptError(const std::string& what, std::vector<std::size_t> trapped_class)
      : std::runtime_error(what), trapped_class_(std::move(trapped_class)) {}
  /// State indices of the closed class that traps the chain; empty when the
  /// failure came from a numerically singular system.
  const std::vector<std::size_t>& trapped_class() const noexcept { return trapped_class_; }

 private:
  std::vector<std::size_t> trapped_class_;
};

/// Immutable, validated row-stochastic matrix of arbitrary size.
class MarkovChain {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  /// Throws NonStochasticError naming the offending row, or
  /// std::invalid_argument if the rows are not square.
  explicit MarkovChain(const std::vector<std::vector<double>>& rows,
                       std::vector<std::string> labels = {});

  /// Labels are the canonical state codes.
  static MarkovChain from_states(const StateMatrix& m);
  static MarkovChain from_transition_matrix(const TransitionMatrix& m) {
    return from_states(m.entries);
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t from, std::size_t to) const noexcept {
    return p_[from * n_ + to];
  }
  const std::string& label(std::size_t state) const { return labels_.at(state); }

 private:
  std::size_t n_ = 0;
  std::vector<double> p_;
  std::vector<std::string> labels_;
};

struct FptOptions {
  double epsilon = 1e-9;
  int max_horizon = 4000;
};

struct FptDistribution {
  std::size_t source = 0;
  std::size_t target = 0;
  /// f[n-1] = Pr(first passage takes exactly n steps), n = 1..horizon.
  std::vector<double> f;
  int horizon = 0;
  double covered_mass = 0.0;
  double residual = 1.0;
};

enum class EfptMethod { Series, LinearSystem };
std::string_view to_string(EfptMethod m) noexcept;

struct EfptResult {
  /// For a non-converged series this is the truncated sum, a lower bound.
  double efpt_quarters = 0.0;
  double efpt_years = 0.0;
  double covered_mass = 0.0;
  bool converged = false;
  EfptMethod method = EfptMethod::Series;
  /// Number of series terms summed; 0 for the linear system.
  int terms = 0;
};

enum class Verdict { WellDefined, Suspect, Divergent };
std::string_view to_string(Verdict v) noexcept;

struct WellDefinedness {
  double mass_at_horizon = 0.0;
  bool reachable = false;
  Verdict verdict = Verdict::Divergent;
  int horizon_used = 0;
};

/// True if some path of length >= 1 leads from `from` to `to`.
bool is_reachable(const MarkovChain& chain, std::size_t from, std::size_t to);

/// First-passage probabilities f(1..horizon). All sources are advanced
/// together: g(1) = P e_j, g(n) = P (g(n-1) with entry j zeroed).
FptDistribution fpt_distribution(const MarkovChain& chain, std::size_t source,
                                 std::size_t target, int horizon);

/// Sum of n f(n), truncated at the first n where 1 - sum f < epsilon or at
/// max_horizon (then converged = false).
EfptResult efpt_series(const MarkovChain& chain, std::size_t source, std::size_t target,
                       const FptOptions& options = {});

/// Solves mu_k = 1 + sum_{l != target} p[k][l] mu_l over the states the
/// source can visit before hitting the target, by Gaussian elimination with
/// partial pivoting. Throws InfiniteEfptError if the target is unreachable,
/// a trap is reachable, or a pivot falls below 1e-12.
EfptResult efpt_linear(const MarkovChain& chain, std::size_t source, std::size_t target);

WellDefinedness check_well_defined(const MarkovChain& chain, std::size_t source,
                                   std::size_t target, const FptOptions& options = {});

/// Partial sums of f.
std::vector<double> fpt_cdf(const FptDistribution& d);
/// 1 - cdf.
std::vector<double> fpt_survival(const FptDistribution& d);

/// Closed communicating class reachable from `source` that excludes
/// `target`, or empty if none exists.
std::vector<std::size_t> find_trapping_class(const MarkovChain& chain, std::size_t source,
                                             std::size_t target);

inline FptDistribution fpt_distribution(const MarkovChain& chain, LaborState source,
                                        LaborState target, int horizon) {
  return fpt_distribution(chain, state_index(source), state_index(target), horizon);
}
inline EfptResult efpt_series(const MarkovChain& chain, LaborState source, LaborState target,
                              const FptOptions& options = {}) {
  return efpt_series(chain, state_index(source), state_index(target), options);
}
inline EfptResult efpt_linear(const MarkovChain& chain, LaborState source, LaborState target) {
  return efpt_linear(chain, state_index(source), state_index(target));
}
inline WellDefinedness check_well_defined(const MarkovChain& chain, LaborState source,
                                          LaborState target, const FptOptions& options = {}) {
  return check_well_defined(chain, state_index(source), state_index(target), options);
}

}  // namespace stwt
