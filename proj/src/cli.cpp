#include "stwt/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "stwt/estimation.hpp"
#include "stwt/fixtures.hpp"
#include "stwt/markov_fpt.hpp"
#include "stwt/panel_ingest.hpp"
#include "stwt/report.hpp"
#include "stwt/run_config.hpp"

namespace stwt {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string config_path;
  std::optional<double> epsilon;
  std::optional<int> max_horizon;
  std::optional<double> min_support;
  std::string format;
  std::string fallback_policy;
  std::string out_path;
  bool strict = false;

  std::string data_path;
  bool wave_rows = false;
  std::string rejects_path;
  std::string fixture;

  std::string age;
  std::string sex;
  std::string citizen;
  std::string region;
  std::string quarter;

  std::string from;
  std::string to;
  int horizon = 40;
  bool pretty = false;

  long long n = -1;
  std::uint64_t seed = 0;
  int quarters = 6;
  std::string initial_shares;
};

RunConfig resolve_config(const Args& a) {
  RunConfig cfg;
  if (!a.config_path.empty()) cfg = load_run_config(a.config_path, cfg);
  if (a.epsilon) set_epsilon(cfg, *a.epsilon);
  if (a.max_horizon) set_max_horizon(cfg, *a.max_horizon);
  if (a.min_support) set_min_support(cfg, *a.min_support);
  if (!a.format.empty()) cfg.format = parse_output_format(a.format);
  if (!a.fallback_policy.empty()) cfg.fallback_policy = parse_fallback_policy(a.fallback_policy);
  return cfg;
}

CohortFilter resolve_filter(const Args& a) {
  CohortFilter f;
  if (!a.age.empty()) {
    f.age_band = parse_age_band(a.age);
    if (!f.age_band) throw UsageError("unknown age band '" + a.age + "'");
  }
  if (!a.sex.empty()) {
    f.sex = parse_sex(a.sex);
    if (!f.sex) throw UsageError("unknown sex '" + a.sex + "'");
  }
  if (!a.citizen.empty()) {
    if (a.citizen != "0" && a.citizen != "1") {
      throw UsageError("citizen must be 0 or 1, got '" + a.citizen + "'");
    }
    f.citizen = a.citizen == "1";
  }
  if (!a.region.empty()) {
    f.region = parse_region(a.region);
    if (!f.region) throw UsageError("unknown region '" + a.region + "'");
  }
  return f;
}

QuarterId require_quarter(const std::string& text, const char* flag) {
  if (text.empty()) throw UsageError(std::string(flag) + " is required");
  const auto q = parse_quarter(text);
  if (!q) throw UsageError("invalid quarter '" + text + "', expected YYYY.Q");
  return *q;
}

LaborState require_state(const std::string& text, const char* flag) {
  if (text.empty()) throw UsageError(std::string(flag) + " is required");
  const auto s = parse_state(text);
  if (!s) throw UsageError("unknown state '" + text + "'");
  return *s;
}

const Fixture& require_fixture(const std::string& name) {
  const Fixture* f = find_fixture(name);
  if (!f) throw UsageError("unknown fixture '" + name + "' (see `stwt fixtures`)");
  return *f;
}

PanelDataset load_dataset(const Args& a, std::ostream& err) {
  ParseResult parsed =
      parse_panel_file(a.data_path, a.wave_rows ? PanelFormat::WaveRows : PanelFormat::PairRows);
  const auto& report = parsed.report;
  if (!report.empty()) {
    err << "warning: " << report.rejections.size() << " row(s) rejected in " << a.data_path
        << "; first: line " << report.rejections.front().line_number << ": "
        << report.rejections.front().reason << '\n';
  }
  if (report.filtered_out_of_age > 0) {
    err << "note: " << report.filtered_out_of_age << " row(s) outside ages 15-34 ignored\n";
  }
  if (!a.rejects_path.empty()) {
    std::ofstream rej(a.rejects_path);
    if (!rej) throw std::runtime_error("cannot write rejection report " + a.rejects_path);
    report.write_csv(rej);
  }
  return std::move(parsed.dataset);
}

// Writes to --out when given, otherwise to `out`.
template <typename Fn>
void emit(const Args& a, std::ostream& out, Fn&& write) {
  if (a.out_path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(a.out_path);
  if (!file) throw std::runtime_error("cannot open output file " + a.out_path);
  write(file);
  if (!file) throw std::runtime_error("failed writing " + a.out_path);
}

int report_empty_cohort(const EmptyCohortError& e, const Args& a, const RunConfig& cfg,
                        std::ostream& out, std::ostream& err) {
  err << e.what() << '\n';
  emit(a, out, [&](std::ostream& os) {
    if (cfg.format == OutputFormat::Json) {
      os << nlohmann::json{{"status", "empty_cohort"},
                           {"quarter", to_string(e.quarter())},
                           {"filter", e.filter().describe()}}
                .dump(2)
         << '\n';
    } else {
      os << "# status,empty_cohort\n# quarter," << to_string(e.quarter()) << "\n# filter,"
         << e.filter().describe() << '\n';
    }
  });
  return a.strict ? kExitDegenerate : kExitOk;
}

void warn_thin_rows(const TransitionMatrix& m, const RunConfig& cfg, std::ostream& err) {
  for (std::size_t i = 0; i < kNumStates; ++i) {
    if (m.thin_rows.test(i)) {
      err << "warning: row " << to_string(state_at(i)) << " has " << format_number(m.row_counts[i])
          << " weighted departures (< " << format_number(cfg.min_support) << ")\n";
    }
    if (m.fallback_rows.test(i)) {
      err << "note: row " << to_string(state_at(i))
          << " has no departures; uniform fallback applied\n";
    }
  }
}

int cmd_shares(const Args& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(a);
  if (a.data_path.empty()) throw UsageError("--data is required");
  const QuarterId q = require_quarter(a.quarter, "--quarter");
  const CohortFilter filter = resolve_filter(a);
  const PanelDataset data = load_dataset(a, err);
  try {
    const StateShareTable t = compute_shares(data, filter, q);
    emit(a, out, [&](std::ostream& os) {
      if (cfg.format == OutputFormat::Json) {
        os << shares_to_json(t).dump(2) << '\n';
      } else {
        write_shares_csv(os, t);
      }
    });
  } catch (const EmptyCohortError& e) {
    return report_empty_cohort(e, a, cfg, out, err);
  }
  return kExitOk;
}

int cmd_transitions(const Args& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(a);
  TransitionMatrix m;
  if (!a.fixture.empty()) {
    m = require_fixture(a.fixture).transition_matrix();
  } else {
    if (a.data_path.empty()) throw UsageError("either --data or --fixture is required");
    const QuarterId q = require_quarter(a.quarter, "--quarter");
    const CohortFilter filter = resolve_filter(a);
    const PanelDataset data = load_dataset(a, err);
    try {
      m = estimate_transition_matrix(data, filter, q, cfg.estimation_options());
    } catch (const EmptyCohortError& e) {
      return report_empty_cohort(e, a, cfg, out, err);
    }
    warn_thin_rows(m, cfg, err);
  }
  emit(a, out, [&](std::ostream& os) {
    if (cfg.format == OutputFormat::Json) {
      os << matrix_to_json(m).dump(2) << '\n';
    } else {
      write_matrix_csv(os, m, a.pretty);
    }
  });
  return kExitOk;
}

int cmd_fpt(const Args& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(a);
  const LaborState from = require_state(a.from, "--from");
  const LaborState to = require_state(a.to, "--to");
  if (a.horizon < 1) throw UsageError("--horizon must be >= 1");

  TransitionMatrix m;
  std::string source_desc;
  if (!a.fixture.empty()) {
    const Fixture& f = require_fixture(a.fixture);
    m = f.transition_matrix();
    source_desc = "fixture " + f.name;
  } else {
    if (a.data_path.empty()) throw UsageError("either --data or --fixture is required");
    const QuarterId q = require_quarter(a.quarter, "--quarter");
    const CohortFilter filter = resolve_filter(a);
    const PanelDataset data = load_dataset(a, err);
    try {
      m = estimate_transition_matrix(data, filter, q, cfg.estimation_options());
    } catch (const EmptyCohortError& e) {
      return report_empty_cohort(e, a, cfg, out, err);
    }
    warn_thin_rows(m, cfg, err);
    source_desc = a.data_path + " " + to_string(q) + " " + filter.describe();
  }
  m = apply_fallback_policy(std::move(m), cfg.fallback_policy);

  const MarkovChain chain = MarkovChain::from_transition_matrix(m);
  const FptReport r = build_fpt_report(chain, state_index(from), state_index(to), a.horizon,
                                       cfg.fpt_options(), source_desc);
  emit(a, out, [&](std::ostream& os) {
    if (cfg.format == OutputFormat::Json) {
      os << fpt_to_json(r).dump(2) << '\n';
    } else {
      write_fpt_csv(os, r);
    }
  });
  if (r.diagnostic.verdict != Verdict::WellDefined) {
    err << "warning: EFPT " << r.source_label << "->" << r.target_label << " is "
        << to_string(r.diagnostic.verdict);
    if (!r.linear_error.empty()) err << " (" << r.linear_error << ")";
    err << '\n';
    if (a.strict) return kExitDegenerate;
  }
  return kExitOk;
}

StateVector parse_initial_shares(const std::string& text) {
  StateVector shares{};
  if (text.empty()) {
    shares.fill(1.0 / static_cast<double>(kNumStates));
    return shares;
  }
  const auto fields = split_csv_record(text);
  if (fields.size() != kNumStates) {
    throw UsageError("--initial-shares needs 7 comma-separated values (SE,TE,PE,U,NLFET,EDU,FS)");
  }
  for (std::size_t k = 0; k < kNumStates; ++k) {
    try {
      shares[k] = std::stod(fields[k]);
    } catch (const std::exception&) {
      throw UsageError("invalid share '" + fields[k] + "'");
    }
  }
  return shares;
}

int cmd_simulate(const Args& a, std::ostream& out, std::ostream&) {
  if (a.fixture.empty()) throw UsageError("--fixture is required");
  if (a.n < 1) throw UsageError("--n must be >= 1");
  if (a.quarters < 1) throw UsageError("--quarters must be >= 1");
  const Fixture& f = require_fixture(a.fixture);

  SyntheticPanelParams params;
  params.truth = f.renormalized;
  params.initial_shares = parse_initial_shares(a.initial_shares);
  params.n_individuals = static_cast<std::size_t>(a.n);
  params.start_quarter = a.quarter.empty() ? f.from_quarter : require_quarter(a.quarter, "--quarter");
  params.n_quarters = a.quarters;
  params.seed = a.seed;
  params.demographics.age_band = f.age_band;
  if (!a.age.empty()) params.demographics.age_band = resolve_filter(a).age_band;

  PanelDataset data;
  try {
    data = generate_synthetic_panel(params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  emit(a, out, [&](std::ostream& os) { write_pair_rows(os, data.pairs); });
  return kExitOk;
}

int cmd_fixtures(const Args& a, std::ostream& out, std::ostream&) {
  const RunConfig cfg = resolve_config(a);
  emit(a, out, [&](std::ostream& os) {
    if (!a.fixture.empty()) {
      const Fixture& f = require_fixture(a.fixture);
      TransitionMatrix raw = f.transition_matrix();
      raw.entries = f.raw;
      if (cfg.format == OutputFormat::Json) {
        nlohmann::json j = matrix_to_json(f.transition_matrix());
        j["raw_entries"] = f.raw;
        j["name"] = f.name;
        j["provenance"] = f.provenance;
        os << j.dump(2) << '\n';
      } else {
        os << "# fixture," << f.name << "\n# provenance,\"" << f.provenance << "\"\n";
        write_matrix_csv(os, raw, true);
      }
      return;
    }
    if (cfg.format == OutputFormat::Json) {
      auto list = nlohmann::json::array();
      for (const auto& f : all_fixtures()) {
        list.push_back({{"name", f.name},
                        {"age_band", f.age_band ? std::string(to_string(*f.age_band)) : ""},
                        {"quarter_from", to_string(f.from_quarter)},
                        {"quarter_to", to_string(f.to_quarter)},
                        {"provenance", f.provenance}});
      }
      os << list.dump(2) << '\n';
    } else {
      os << "name,age_band,quarter_from,quarter_to,provenance\n";
      for (const auto& f : all_fixtures()) {
        os << f.name << ',' << (f.age_band ? to_string(*f.age_band) : "") << ','
           << to_string(f.from_quarter) << ',' << to_string(f.to_quarter) << ",\""
           << f.provenance << "\"\n";
      }
    }
  });
  return kExitOk;
}

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--config", a.config_path, "key=value file with run settings");
  cmd->add_option("--format", a.format, "Output format: csv or json");
  cmd->add_option("--out", a.out_path, "Write output to this file instead of stdout");
}

void add_data(CLI::App* cmd, Args& a) {
  cmd->add_option("--data", a.data_path, "Panel file (pair_rows CSV unless --wave-rows)");
  cmd->add_flag("--wave-rows", a.wave_rows, "Input file holds one row per interview wave");
  cmd->add_option("--rejects", a.rejects_path, "Write the rejection report CSV here");
}

void add_filter(CLI::App* cmd, Args& a) {
  cmd->add_option("--age", a.age, "Age band: teens, early, late, preadult");
  cmd->add_option("--sex", a.sex, "M or F");
  cmd->add_option("--citizen", a.citizen, "1 for Italian citizens, 0 otherwise");
  cmd->add_option("--region", a.region, "NORTH, CENTRE or SOUTH");
  cmd->add_option("--quarter", a.quarter, "Quarter YYYY.Q");
}

void add_estimation(CLI::App* cmd, Args& a) {
  cmd->add_option("--min-support", a.min_support, "Warn on rows with fewer weighted departures");
  cmd->add_flag("--strict", a.strict, "Nonzero exit on empty cohorts and divergent EFPT");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"School-to-work transition analytics: shares, transition matrices and "
               "first passage times from rotating-panel data",
               "stwt"};
  app.require_subcommand(1);
  Args a;

  auto* shares = app.add_subcommand("shares", "State shares of a cohort in one quarter");
  add_common(shares, a);
  add_data(shares, a);
  add_filter(shares, a);
  add_estimation(shares, a);

  auto* transitions =
      app.add_subcommand("transitions", "Quarter-on-quarter transition matrix of a cohort");
  add_common(transitions, a);
  add_data(transitions, a);
  add_filter(transitions, a);
  add_estimation(transitions, a);
  transitions->add_option("--fixture", a.fixture, "Print an embedded fixture instead");
  transitions->add_flag("--pretty", a.pretty, "Two-decimal cells, as in published tables");

  auto* fpt = app.add_subcommand("fpt", "First passage time distribution and expected time");
  add_common(fpt, a);
  add_data(fpt, a);
  add_filter(fpt, a);
  add_estimation(fpt, a);
  fpt->add_option("--fixture", a.fixture, "Embedded fixture matrix");
  fpt->add_option("--from", a.from, "Source state");
  fpt->add_option("--to", a.to, "Target state");
  fpt->add_option("--horizon", a.horizon, "Quarters of f/cdf to report")->capture_default_str();
  fpt->add_option("--epsilon", a.epsilon, "Residual mass at which the EFPT series stops");
  fpt->add_option("--max-horizon", a.max_horizon, "Hard cap on EFPT series terms");
  fpt->add_option("--fallback-policy", a.fallback_policy, "uniform or absorbing_fs");

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic pair_rows panel");
  add_common(simulate, a);
  simulate->add_option("--fixture", a.fixture, "Truth matrix");
  simulate->add_option("--n", a.n, "Number of individuals");
  simulate->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  simulate->add_option("--quarter", a.quarter, "First quarter (default: fixture's from-quarter)");
  simulate->add_option("--quarters", a.quarters, "Window length in quarters")->capture_default_str();
  simulate->add_option("--age", a.age, "Age band of synthetic individuals");
  simulate->add_option("--initial-shares", a.initial_shares,
                       "Seven comma-separated first-wave shares (default uniform)");

  auto* fixtures = app.add_subcommand("fixtures", "List embedded matrices");
  add_common(fixtures, a);
  fixtures->add_option("--fixture", a.fixture, "Show one fixture as printed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*shares) return cmd_shares(a, out, err);
    if (*transitions) return cmd_transitions(a, out, err);
    if (*fpt) return cmd_fpt(a, out, err);
    if (*simulate) return cmd_simulate(a, out, err);
    if (*fixtures) return cmd_fixtures(a, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitUsage;
}

}  // namespace stwt
