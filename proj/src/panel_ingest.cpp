#include "stwt/panel_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stwt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_double(std::string_view s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Field-level validation shared by both row formats. Returns an error
// string, or empty on success.
struct CommonFields {
  Demographics demographics;
  double weight = 1.0;
  bool admitted_age = true;
};

std::string parse_common(std::string_view age, std::string_view sex,
                         std::string_view citizen, std::string_view region,
                         std::string_view weight, CommonFields& out) {
  const auto age_value = parse_int(age);
  if (!age_value || *age_value < 0) return "invalid age '" + std::string(age) + "'";
  const auto sex_value = parse_sex(sex);
  if (!sex_value) return "invalid sex '" + std::string(sex) + "'";
  if (citizen != "0" && citizen != "1") {
    return "invalid citizen flag '" + std::string(citizen) + "'";
  }
  const auto region_value = parse_region(region);
  if (!region_value) return "invalid region '" + std::string(region) + "'";
  double w = 1.0;
  if (!weight.empty()) {
    const auto parsed = parse_double(weight);
    if (!parsed || !std::isfinite(*parsed)) {
      return "invalid weight '" + std::string(weight) + "'";
    }
    if (*parsed <= 0.0) return "nonpositive weight '" + std::string(weight) + "'";
    w = *parsed;
  }
  out.demographics = Demographics{*age_value, *sex_value, citizen == "1", *region_value};
  out.weight = w;
  out.admitted_age = is_admitted_age(*age_value);
  return {};
}

std::string parse_state_field(std::string_view text, const char* column,
                              LaborState& out) {
  const auto s = parse_state(text);
  if (!s) return std::string("unknown state code '") + std::string(text) + "' in " + column;
  out = *s;
  return {};
}

std::string parse_quarter_field(std::string_view text, const char* column,
                                QuarterId& out) {
  const auto q = parse_quarter(text);
  if (!q) return std::string("invalid quarter '") + std::string(text) + "' in " + column;
  out = *q;
  return {};
}

std::string parse_pair_record(const std::vector<std::string>& f, ObservationPair& pair,
                              bool& admitted) {
  if (f.size() != 9 && f.size() != 10) {
    return "expected 10 fields, found " + std::to_string(f.size());
  }
  std::string err;
  pair.person_id = std::string(trim(f[0]));
  if (pair.person_id.empty()) return "empty person_id";
  if (!(err = parse_quarter_field(trim(f[1]), "quarter_from", pair.quarter_from)).empty()) return err;
  if (!(err = parse_quarter_field(trim(f[2]), "quarter_to", pair.quarter_to)).empty()) return err;
  if (pair.quarter_to != quarter_successor(pair.quarter_from)) {
    return "quarter_to " + to_string(pair.quarter_to) + " does not follow quarter_from " +
           to_string(pair.quarter_from);
  }
  if (!(err = parse_state_field(trim(f[3]), "state_from", pair.state_from)).empty()) return err;
  if (!(err = parse_state_field(trim(f[4]), "state_to", pair.state_to)).empty()) return err;
  CommonFields common;
  err = parse_common(trim(f[5]), trim(f[6]), trim(f[7]), trim(f[8]),
                     f.size() == 10 ? trim(f[9]) : std::string_view{}, common);
  if (!err.empty()) return err;
  pair.demographics = common.demographics;
  pair.weight = common.weight;
  admitted = common.admitted_age;
  return {};
}

std::string parse_wave_record(const std::vector<std::string>& f, WaveRow& row,
                              bool& admitted) {
  if (f.size() != 7 && f.size() != 8) {
    return "expected 8 fields, found " + std::to_string(f.size());
  }
  std::string err;
  row.person_id = std::string(trim(f[0]));
  if (row.person_id.empty()) return "empty person_id";
  if (!(err = parse_quarter_field(trim(f[1]), "quarter", row.quarter)).empty()) return err;
  if (!(err = parse_state_field(trim(f[2]), "state", row.state)).empty()) return err;
  CommonFields common;
  err = parse_common(trim(f[3]), trim(f[4]), trim(f[5]), trim(f[6]),
                     f.size() == 8 ? trim(f[7]) : std::string_view{}, common);
  if (!err.empty()) return err;
  row.demographics = common.demographics;
  row.weight = common.weight;
  admitted = common.admitted_age;
  return {};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform on [0, 1) from the top 53 bits; portable across standard libraries.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <std::size_t N>
std::size_t draw_categorical(std::mt19937_64& rng, const std::array<double, N>& probs) {
  const double u = next_unit(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < N; ++k) {
    if (probs[k] <= 0.0) continue;
    cumulative += probs[k];
    last_positive = k;
    if (u < cumulative) return k;
  }
  return last_positive;
}

void validate_distribution(const StateVector& shares) {
  double sum = 0.0;
  for (double p : shares) {
    if (!(p >= 0.0)) throw std::invalid_argument("initial shares contain a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("initial shares sum to " + std::to_string(sum) + ", not 1");
  }
}

}  // namespace

void RejectionReport::write_csv(std::ostream& out) const {
  out << "line_number,reason\n";
  for (const auto& r : rejections) {
    out << r.line_number << ',' << quote_if_needed(r.reason) << '\n';
  }
}

PanelDataset PanelDataset::from_pairs(std::vector<ObservationPair> pairs,
                                      std::string provenance) {
  PanelDataset ds;
  ds.pairs = std::move(pairs);
  ds.provenance = std::move(provenance);
  for (const auto& p : ds.pairs) {
    if (!ds.quarter_range) {
      ds.quarter_range = std::make_pair(p.quarter_from, p.quarter_to);
    } else {
      ds.quarter_range->first = std::min(ds.quarter_range->first, p.quarter_from);
      ds.quarter_range->second = std::max(ds.quarter_range->second, p.quarter_to);
    }
  }
  return ds;
}

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r' || i + 1 != line.size()) {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

ParseResult parse_panel_stream(std::istream& in, PanelFormat format,
                               std::string provenance) {
  const std::string_view expected =
      format == PanelFormat::PairRows ? kPairRowsHeader : kWaveRowsHeader;
  std::string line;
  if (!std::getline(in, line)) throw PanelIoError(provenance + ": empty file, missing header");
  if (trim(line) != expected) {
    throw PanelIoError(provenance + ": unexpected header '" + std::string(trim(line)) +
                       "', expected '" + std::string(expected) + "'");
  }

  ParseResult result;
  std::vector<ObservationPair> pairs;
  std::vector<WaveRow> waves;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_record(line);
    bool admitted = true;
    std::string err;
    if (format == PanelFormat::PairRows) {
      ObservationPair pair;
      err = parse_pair_record(fields, pair, admitted);
      if (err.empty() && admitted) pairs.push_back(std::move(pair));
    } else {
      WaveRow row;
      row.source_line = line_number;
      err = parse_wave_record(fields, row, admitted);
      if (err.empty() && admitted) waves.push_back(std::move(row));
    }
    if (!err.empty()) {
      result.report.rejections.push_back({line_number, std::move(err)});
    } else if (!admitted) {
      ++result.report.filtered_out_of_age;
    }
  }
  if (in.bad()) throw PanelIoError(provenance + ": read error");

  if (format == PanelFormat::WaveRows) {
    LinkResult linked = link_waves(std::move(waves));
    pairs = std::move(linked.pairs);
    auto& rej = result.report.rejections;
    rej.insert(rej.end(), linked.rejections.begin(), linked.rejections.end());
    std::stable_sort(rej.begin(), rej.end(), [](const Rejection& a, const Rejection& b) {
      return a.line_number < b.line_number;
    });
  }
  result.dataset = PanelDataset::from_pairs(std::move(pairs), std::move(provenance));
  return result;
}

ParseResult parse_panel_file(const std::filesystem::path& path, PanelFormat format) {
  std::ifstream in(path);
  if (!in) throw PanelIoError("cannot open panel file " + path.string());
  return parse_panel_stream(in, format, path.string());
}

LinkResult link_waves(std::vector<WaveRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const WaveRow& a, const WaveRow& b) {
    if (a.person_id != b.person_id) return a.person_id < b.person_id;
    return a.quarter < b.quarter;
  });

  LinkResult result;
  std::vector<WaveRow> unique;
  unique.reserve(rows.size());
  for (std::size_t begin = 0; begin < rows.size();) {
    std::size_t end = begin + 1;
    while (end < rows.size() && rows[end].person_id == rows[begin].person_id &&
           rows[end].quarter == rows[begin].quarter) {
      ++end;
    }
    const bool conflicting =
        std::any_of(rows.begin() + static_cast<std::ptrdiff_t>(begin) + 1,
                    rows.begin() + static_cast<std::ptrdiff_t>(end),
                    [&](const WaveRow& r) { return r.state != rows[begin].state; });
    const std::string where =
        " for person " + rows[begin].person_id + " in " + to_string(rows[begin].quarter);
    if (conflicting) {
      for (std::size_t k = begin; k < end; ++k) {
        result.rejections.push_back({rows[k].source_line, "conflicting states" + where});
      }
    } else {
      unique.push_back(rows[begin]);
      for (std::size_t k = begin + 1; k < end; ++k) {
        result.rejections.push_back({rows[k].source_line, "duplicate row" + where});
      }
    }
    begin = end;
  }

  for (std::size_t k = 0; k + 1 < unique.size(); ++k) {
    const WaveRow& a = unique[k];
    const WaveRow& b = unique[k + 1];
    if (a.person_id != b.person_id || b.quarter != quarter_successor(a.quarter)) continue;
    result.pairs.push_back(ObservationPair{a.person_id, a.quarter, b.quarter, a.state,
                                           b.state, a.demographics, a.weight});
  }
  return result;
}

void write_pair_rows(std::ostream& out, const std::vector<ObservationPair>& pairs) {
  out << kPairRowsHeader << '\n';
  char weight_buf[64];
  for (const auto& p : pairs) {
    auto [end, ec] = std::to_chars(weight_buf, weight_buf + sizeof weight_buf, p.weight);
    out << quote_if_needed(p.person_id) << ',' << to_string(p.quarter_from) << ','
        << to_string(p.quarter_to) << ',' << to_string(p.state_from) << ','
        << to_string(p.state_to) << ',' << p.demographics.age_at_first_wave << ','
        << to_string(p.demographics.sex) << ','
        << (p.demographics.italian_citizen ? '1' : '0') << ','
        << to_string(p.demographics.macro_region) << ','
        << std::string_view(weight_buf, static_cast<std::size_t>(end - weight_buf)) << '\n';
  }
}

PanelDataset generate_synthetic_panel(const SyntheticPanelParams& params) {
  if (auto row = find_non_stochastic_row(params.truth)) {
    throw std::invalid_argument("truth matrix row " + std::string(to_string(state_at(*row))) +
                                " is not a probability distribution");
  }
  validate_distribution(params.initial_shares);
  if (params.n_individuals == 0) throw std::invalid_argument("n_individuals must be >= 1");
  if (params.n_quarters < 1) throw std::invalid_argument("n_quarters must be >= 1");

  const auto& demo = params.demographics;
  const AgeRange ages = demo.age_band ? age_range(*demo.age_band)
                                      : AgeRange{kMinAdmittedAge, kMaxAdmittedAge};
  constexpr std::array<int, 4> kObservedOffsets = {0, 1, 4, 5};
  constexpr int kRotationSpan = 6;
  const auto entry_positions =
      static_cast<std::size_t>(std::max(1, params.n_quarters - kRotationSpan + 1));
  const std::size_t id_width = std::to_string(params.n_individuals - 1).size();

  std::vector<ObservationPair> pairs;
  pairs.reserve(params.n_individuals * 2);
  for (std::size_t person = 0; person < params.n_individuals; ++person) {
    std::mt19937_64 rng(splitmix64(params.seed) ^ splitmix64(~static_cast<std::uint64_t>(person)));

    std::string id = std::to_string(person);
    id.insert(0, id_width - id.size(), '0');
    id.insert(0, "S");

    Demographics d;
    const double age_u = next_unit(rng);
    d.age_at_first_wave = ages.lo + static_cast<int>(age_u * (ages.hi - ages.lo + 1));
    d.sex = next_unit(rng) < demo.male_share ? Sex::Male : Sex::Female;
    d.italian_citizen = next_unit(rng) < demo.citizen_share;
    d.macro_region = static_cast<Region>(draw_categorical(rng, demo.region_shares));

    const int entry = static_cast<int>(person % entry_positions);
    std::array<LaborState, kRotationSpan> path{};
    path[0] = state_at(draw_categorical(rng, params.initial_shares));
    for (int t = 1; t < kRotationSpan; ++t) {
      path[t] = state_at(draw_categorical(rng, params.truth[state_index(path[t - 1])]));
    }

    for (int spell = 0; spell < 2; ++spell) {
      const int from_offset = kObservedOffsets[2 * spell];
      const int to_offset = kObservedOffsets[2 * spell + 1];
      if (entry + to_offset >= params.n_quarters) break;
      const QuarterId from = quarter_advance(params.start_quarter, entry + from_offset);
      pairs.push_back(ObservationPair{id, from, quarter_successor(from), path[from_offset],
                                      path[to_offset], d, 1.0});
    }
  }
  return PanelDataset::from_pairs(std::move(pairs),
                                  "synthetic panel (seed " + std::to_string(params.seed) + ", " +
                                      std::to_string(params.n_individuals) + " individuals)");
}

}  // namespace stwt
