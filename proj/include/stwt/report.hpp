#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "stwt/estimation.hpp"
#include "stwt/markov_fpt.hpp"

namespace stwt {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
/// Fixed two decimals, the published table style.
std::string format_two_decimals(double value);

void write_matrix_csv(std::ostream& out, const TransitionMatrix& m, bool pretty = false);
nlohmann::json matrix_to_json(const TransitionMatrix& m);

void write_shares_csv(std::ostream& out, const StateShareTable& t);
nlohmann::json shares_to_json(const StateShareTable& t);

/// Everything the fpt command reports for one (source, target) query.
struct FptReport {
  std::string matrix_source;
  std::string source_label;
  std::string target_label;
  FptDistribution distribution;
  EfptResult series;
  std::optional<EfptResult> linear;
  /// Set when the linear system reports an infinite EFPT.
  std::string linear_error;
  WellDefinedness diagnostic;
};

FptReport build_fpt_report(const MarkovChain& chain, std::size_t source, std::size_t target,
                           int horizon, const FptOptions& options,
                           std::string matrix_source);

/// Metadata as "# key,value" lines followed by an n,f,cdf,survival table.
void write_fpt_csv(std::ostream& out, const FptReport& r);
nlohmann::json fpt_to_json(const FptReport& r);

}  // namespace stwt
