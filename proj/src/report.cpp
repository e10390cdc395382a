#include "stwt/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace stwt {

namespace {

nlohmann::json state_list(const RowFlags& flags) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < kNumStates; ++i) {
    if (flags.test(i)) out.push_back(std::string(to_string(state_at(i))));
  }
  return out;
}

nlohmann::json efpt_to_json(const EfptResult& r) {
  return {{"efpt_quarters", r.efpt_quarters},
          {"efpt_years", r.efpt_years},
          {"covered_mass", r.covered_mass},
          {"converged", r.converged},
          {"method", std::string(to_string(r.method))},
          {"terms", r.terms}};
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string format_two_decimals(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

void write_matrix_csv(std::ostream& out, const TransitionMatrix& m, bool pretty) {
  out << "# quarter_from," << to_string(m.from_quarter) << '\n'
      << "# quarter_to," << to_string(m.to_quarter) << '\n'
      << "# filter," << m.filter.describe() << '\n';
  out << "state";
  for (LaborState s : kAllStates) out << ',' << to_string(s);
  out << ",row_count,fallback,thin\n";
  for (std::size_t i = 0; i < kNumStates; ++i) {
    out << to_string(state_at(i));
    for (double p : m.entries[i]) out << ',' << (pretty ? format_two_decimals(p) : format_number(p));
    out << ',' << format_number(m.row_counts[i]) << ',' << (m.fallback_rows.test(i) ? 1 : 0)
        << ',' << (m.thin_rows.test(i) ? 1 : 0) << '\n';
  }
}

nlohmann::json matrix_to_json(const TransitionMatrix& m) {
  nlohmann::json j;
  j["quarter_from"] = to_string(m.from_quarter);
  j["quarter_to"] = to_string(m.to_quarter);
  j["filter"] = m.filter.describe();
  auto states = nlohmann::json::array();
  for (LaborState s : kAllStates) states.push_back(std::string(to_string(s)));
  j["states"] = states;
  j["entries"] = m.entries;
  j["row_counts"] = m.row_counts;
  j["fallback_rows"] = state_list(m.fallback_rows);
  j["thin_rows"] = state_list(m.thin_rows);
  return j;
}

void write_shares_csv(std::ostream& out, const StateShareTable& t) {
  out << "# quarter," << to_string(t.quarter) << '\n'
      << "# filter," << t.filter.describe() << '\n'
      << "# total_weight," << format_number(t.total_weight) << '\n'
      << "state,share,weighted_count\n";
  for (std::size_t s = 0; s < kNumStates; ++s) {
    out << to_string(state_at(s)) << ',' << format_number(t.shares[s]) << ','
        << format_number(t.n_obs[s]) << '\n';
  }
}

nlohmann::json shares_to_json(const StateShareTable& t) {
  nlohmann::json shares = nlohmann::json::object();
  nlohmann::json counts = nlohmann::json::object();
  for (std::size_t s = 0; s < kNumStates; ++s) {
    const std::string code(to_string(state_at(s)));
    shares[code] = t.shares[s];
    counts[code] = t.n_obs[s];
  }
  return {{"quarter", to_string(t.quarter)},
          {"filter", t.filter.describe()},
          {"total_weight", t.total_weight},
          {"shares", shares},
          {"weighted_counts", counts}};
}

FptReport build_fpt_report(const MarkovChain& chain, std::size_t source, std::size_t target,
                           int horizon, const FptOptions& options,
                           std::string matrix_source) {
  FptReport r;
  r.matrix_source = std::move(matrix_source);
  r.source_label = chain.label(source);
  r.target_label = chain.label(target);
  r.distribution = fpt_distribution(chain, source, target, horizon);
  r.series = efpt_series(chain, source, target, options);
  r.diagnostic = check_well_defined(chain, source, target, options);
  try {
    r.linear = efpt_linear(chain, source, target);
  } catch (const InfiniteEfptError& e) {
    r.linear_error = e.what();
  }
  return r;
}

void write_fpt_csv(std::ostream& out, const FptReport& r) {
  out << "# matrix,\"" << r.matrix_source << "\"\n"
      << "# source," << r.source_label << '\n'
      << "# target," << r.target_label << '\n'
      << "# horizon," << r.distribution.horizon << '\n'
      << "# covered_mass," << format_number(r.distribution.covered_mass) << '\n'
      << "# residual," << format_number(r.distribution.residual) << '\n'
      << "# efpt_series_quarters," << format_number(r.series.efpt_quarters) << '\n'
      << "# efpt_series_years," << format_number(r.series.efpt_years) << '\n'
      << "# efpt_series_converged," << (r.series.converged ? 1 : 0) << '\n'
      << "# efpt_series_terms," << r.series.terms << '\n';
  if (r.linear) {
    out << "# efpt_linear_quarters," << format_number(r.linear->efpt_quarters) << '\n'
        << "# efpt_linear_years," << format_number(r.linear->efpt_years) << '\n';
  } else {
    out << "# efpt_linear_error,\"" << r.linear_error << "\"\n";
  }
  out << "# verdict," << to_string(r.diagnostic.verdict) << '\n'
      << "# reachable," << (r.diagnostic.reachable ? 1 : 0) << '\n'
      << "# mass_at_horizon," << format_number(r.diagnostic.mass_at_horizon) << '\n';
  out << "n,f,cdf,survival\n";
  const auto cdf = fpt_cdf(r.distribution);
  const auto survival = fpt_survival(r.distribution);
  for (std::size_t k = 0; k < r.distribution.f.size(); ++k) {
    out << k + 1 << ',' << format_number(r.distribution.f[k]) << ',' << format_number(cdf[k])
        << ',' << format_number(survival[k]) << '\n';
  }
}

nlohmann::json fpt_to_json(const FptReport& r) {
  nlohmann::json j;
  j["matrix"] = r.matrix_source;
  j["source"] = r.source_label;
  j["target"] = r.target_label;
  j["horizon"] = r.distribution.horizon;
  j["covered_mass"] = r.distribution.covered_mass;
  j["residual"] = r.distribution.residual;
  j["f"] = r.distribution.f;
  j["cdf"] = fpt_cdf(r.distribution);
  j["survival"] = fpt_survival(r.distribution);
  j["efpt_series"] = efpt_to_json(r.series);
  if (r.linear) {
    j["efpt_linear"] = efpt_to_json(*r.linear);
  } else {
    j["efpt_linear"] = {{"error", r.linear_error}};
  }
  j["well_definedness"] = {{"verdict", std::string(to_string(r.diagnostic.verdict))},
                           {"reachable", r.diagnostic.reachable},
                           {"mass_at_horizon", r.diagnostic.mass_at_horizon},
                           {"horizon_used", r.diagnostic.horizon_used}};
  return j;
}

}  // namespace stwt
