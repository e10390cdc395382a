#include "stwt/markov_fpt.hpp"

#include <cmath>
#include <optional>

namespace stwt {

namespace {

constexpr double kPivotThreshold = 1e-12;

void validate_options(const FptOptions& options) {
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  if (options.max_horizon < 1) throw std::invalid_argument("max_horizon must be >= 1");
}

void validate_states(const MarkovChain& chain, std::size_t source, std::size_t target) {
  if (source >= chain.size() || target >= chain.size()) {
    throw std::out_of_range("state index out of range for a chain of size " +
                            std::to_string(chain.size()));
  }
}

// One step of the first-passage recursion for every source at once.
void advance(const MarkovChain& chain, std::size_t target, const std::vector<double>& g,
             std::vector<double>& next) {
  const std::size_t n = chain.size();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      if (l != target) acc += chain(k, l) * g[l];
    }
    next[k] = acc;
  }
}

std::vector<double> target_column(const MarkovChain& chain, std::size_t target) {
  std::vector<double> g(chain.size());
  for (std::size_t k = 0; k < chain.size(); ++k) g[k] = chain(k, target);
  return g;
}

// States reachable from `from` in >= 1 step. If `blocked` is set, paths may
// end at it but not continue through it.
std::vector<bool> reachable_set(const MarkovChain& chain, std::size_t from,
                                std::optional<std::size_t> blocked) {
  const std::size_t n = chain.size();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack = {from};
  bool first = true;
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    if (!first && blocked && k == *blocked) continue;
    first = false;
    for (std::size_t l = 0; l < n; ++l) {
      if (chain(k, l) > 0.0 && !seen[l]) {
        seen[l] = true;
        stack.push_back(l);
      }
    }
  }
  return seen;
}

// Solves a x = b in place (row-major n x n). Returns false on a small pivot.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < kPivotThreshold) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * b[c];
    b[r] = acc / a[r * n + r];
  }
  return true;
}

std::string describe_class(const MarkovChain& chain, const std::vector<std::size_t>& states) {
  std::string out = "{";
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (k) out += ",";
    out += chain.label(states[k]);
  }
  return out + "}";
}

}  // namespace

MarkovChain::MarkovChain(const std::vector<std::vector<double>>& rows,
                         std::vector<std::string> labels)
    : n_(rows.size()), labels_(std::move(labels)) {
  if (n_ == 0) throw std::invalid_argument("empty transition matrix");
  p_.reserve(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (rows[i].size() != n_) throw std::invalid_argument("transition matrix is not square");
    double sum = 0.0;
    for (double p : rows[i]) {
      if (!(p >= 0.0)) {
        throw NonStochasticError(i, "row " + std::to_string(i) + " has a negative or NaN entry");
      }
      sum += p;
      p_.push_back(p);
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw NonStochasticError(i, "row " + std::to_string(i) + " sums to " +
                                      std::to_string(sum) + ", not 1");
    }
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < n_; ++i) labels_.push_back(std::to_string(i));
  } else if (labels_.size() != n_) {
    throw std::invalid_argument("label count does not match matrix size");
  }
}

MarkovChain MarkovChain::from_states(const StateMatrix& m) {
  std::vector<std::vector<double>> rows(kNumStates);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < kNumStates; ++i) {
    rows[i].assign(m[i].begin(), m[i].end());
    labels.emplace_back(to_string(state_at(i)));
  }
  return MarkovChain(rows, std::move(labels));
}

std::string_view to_string(EfptMethod m) noexcept {
  return m == EfptMethod::Series ? "series" : "linear_system";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::WellDefined: return "well_defined";
    case Verdict::Suspect: return "suspect";
    case Verdict::Divergent: return "divergent";
  }
  return "?";
}

bool is_reachable(const MarkovChain& chain, std::size_t from, std::size_t to) {
  validate_states(chain, from, to);
  return reachable_set(chain, from, std::nullopt)[to];
}

FptDistribution fpt_distribution(const MarkovChain& chain, std::size_t source,
                                 std::size_t target, int horizon) {
  validate_states(chain, source, target);
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  FptDistribution d;
  d.source = source;
  d.target = target;
  d.horizon = horizon;
  d.f.reserve(static_cast<std::size_t>(horizon));
  std::vector<double> g = target_column(chain, target);
  std::vector<double> next(chain.size());
  for (int n = 1; n <= horizon; ++n) {
    if (n > 1) {
      advance(chain, target, g, next);
      g.swap(next);
    }
    d.f.push_back(g[source]);
    d.covered_mass += g[source];
  }
  d.residual = 1.0 - d.covered_mass;
  return d;
}

EfptResult efpt_series(const MarkovChain& chain, std::size_t source, std::size_t target,
                       const FptOptions& options) {
  validate_states(chain, source, target);
  validate_options(options);
  EfptResult r;
  r.method = EfptMethod::Series;
  std::vector<double> g = target_column(chain, target);
  std::vector<double> next(chain.size());
  double mean = 0.0;
  for (int n = 1; n <= options.max_horizon; ++n) {
    if (n > 1) {
      advance(chain, target, g, next);
      g.swap(next);
    }
    r.covered_mass += g[source];
    mean += static_cast<double>(n) * g[source];
    r.terms = n;
    if (1.0 - r.covered_mass < options.epsilon) {
      r.converged = true;
      break;
    }
  }
  r.efpt_quarters = mean;
  r.efpt_years = mean / 4.0;
  return r;
}

std::vector<std::size_t> find_trapping_class(const MarkovChain& chain, std::size_t source,
                                             std::size_t target) {
  validate_states(chain, source, target);
  const std::size_t n = chain.size();
  std::vector<bool> visitable = reachable_set(chain, source, target);
  if (source != target) visitable[source] = true;
  visitable[target] = false;

  std::vector<std::vector<bool>> reach(n);
  for (std::size_t k = 0; k < n; ++k) {
    reach[k] = reachable_set(chain, k, std::nullopt);
    reach[k][k] = true;
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!visitable[s] || reach[s][target]) continue;
    // s cannot reach the target; it is recurrent if everything it reaches
    // leads back to it.
    bool recurrent = true;
    for (std::size_t t = 0; t < n && recurrent; ++t) {
      if (reach[s][t] && !reach[t][s]) recurrent = false;
    }
    if (!recurrent) continue;
    std::vector<std::size_t> cls;
    for (std::size_t t = 0; t < n; ++t) {
      if (reach[s][t]) cls.push_back(t);
    }
    return cls;
  }
  return {};
}

EfptResult efpt_linear(const MarkovChain& chain, std::size_t source, std::size_t target) {
  validate_states(chain, source, target);
  const std::string route = chain.label(source) + "->" + chain.label(target);
  if (auto trap = find_trapping_class(chain, source, target); !trap.empty()) {
    const bool reachable = is_reachable(chain, source, target);
    const std::string what =
        std::string(reachable ? "infinite expected first passage time " : "target unreachable ") +
        route + ": chain is trapped in recurrent class " + describe_class(chain, trap);
    throw InfiniteEfptError(what, std::move(trap));
  }

  // Unknowns: states visitable before the first hit of the target.
  std::vector<bool> visitable = reachable_set(chain, source, target);
  if (source != target) visitable[source] = true;
  visitable[target] = false;
  std::vector<std::size_t> unknowns;
  std::vector<std::size_t> position(chain.size(), 0);
  for (std::size_t k = 0; k < chain.size(); ++k) {
    if (visitable[k]) {
      position[k] = unknowns.size();
      unknowns.push_back(k);
    }
  }

  const std::size_t m = unknowns.size();
  std::vector<double> mu(m, 1.0);
  if (m > 0) {
    std::vector<double> a(m * m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        a[r * m + c] = (r == c ? 1.0 : 0.0) - chain(unknowns[r], unknowns[c]);
      }
    }
    if (!solve_dense(a, mu, m)) {
      throw InfiniteEfptError("singular first-step system for " + route, {});
    }
  }

  EfptResult r;
  r.method = EfptMethod::LinearSystem;
  r.converged = true;
  r.covered_mass = 1.0;
  if (source != target) {
    r.efpt_quarters = mu[position[source]];
  } else {
    double acc = 1.0;
    for (std::size_t k : unknowns) acc += chain(target, k) * mu[position[k]];
    r.efpt_quarters = acc;
  }
  r.efpt_years = r.efpt_quarters / 4.0;
  return r;
}

WellDefinedness check_well_defined(const MarkovChain& chain, std::size_t source,
                                   std::size_t target, const FptOptions& options) {
  validate_options(options);
  WellDefinedness w;
  w.reachable = is_reachable(chain, source, target);
  if (!w.reachable) {
    w.verdict = Verdict::Divergent;
    return w;
  }
  const EfptResult series = efpt_series(chain, source, target, options);
  w.mass_at_horizon = series.covered_mass;
  w.horizon_used = series.terms;
  w.verdict = series.converged ? Verdict::WellDefined : Verdict::Suspect;
  return w;
}

std::vector<double> fpt_cdf(const FptDistribution& d) {
  std::vector<double> cdf;
  cdf.reserve(d.f.size());
  double acc = 0.0;
  for (double p : d.f) {
    acc += p;
    cdf.push_back(acc);
  }
  return cdf;
}

std::vector<double> fpt_survival(const FptDistribution& d) {
  std::vector<double> s = fpt_cdf(d);
  for (double& v : s) v = 1.0 - v;
  return s;
}

}  // namespace stwt
