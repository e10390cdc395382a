#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stwt/core_model.hpp"

namespace stwt {

/// One interview of one person in one quarter.
struct WaveRow {
  std::string person_id;
  QuarterId quarter;
  LaborState state = LaborState::EDU;
  Demographics demographics;
  double weight = 1.0;
  /// 1-based line in the source file, 0 when not read from a file.
  std::size_t source_line = 0;
};

/// A linked 3-month transition of one person.
struct ObservationPair {
  std::string person_id;
  QuarterId quarter_from;
  QuarterId quarter_to;
  LaborState state_from = LaborState::EDU;
  LaborState state_to = LaborState::EDU;
  Demographics demographics;
  double weight = 1.0;

  friend bool operator==(const ObservationPair&, const ObservationPair&) = default;
};

struct Rejection {
  std::size_t line_number = 0;
  std::string reason;
};

struct RejectionReport {
  std::vector<Rejection> rejections;
  /// Rows outside the admitted 15-34 age span. These are dropped, not rejected.
  std::size_t filtered_out_of_age = 0;

  bool empty() const noexcept { return rejections.empty(); }
  /// CSV with header "line_number,reason".
  void write_csv(std::ostream& out) const;
};

struct PanelDataset {
  std::vector<ObservationPair> pairs;
  std::string provenance;
  /// (min quarter_from, max quarter_to); empty for an empty dataset.
  std::optional<std::pair<QuarterId, QuarterId>> quarter_range;

  /// Builds a dataset and derives quarter_range from the pairs.
  static PanelDataset from_pairs(std::vector<ObservationPair> pairs,
                                 std::string provenance);
};

enum class PanelFormat { PairRows, WaveRows };

inline constexpr std::string_view kPairRowsHeader =
    "person_id,quarter_from,quarter_to,state_from,state_to,age,sex,citizen,region,weight";
inline constexpr std::string_view kWaveRowsHeader =
    "person_id,quarter,state,age,sex,citizen,region,weight";

/// Raised when a panel file cannot be read or its header does not match.
class PanelIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseResult {
  PanelDataset dataset;
  RejectionReport report;
};

ParseResult parse_panel_file(const std::filesystem::path& path, PanelFormat format);
ParseResult parse_panel_stream(std::istream& in, PanelFormat format,
                               std::string provenance);

struct LinkResult {
  std::vector<ObservationPair> pairs;
  std::vector<Rejection> rejections;
};

/// Emits one pair per (person, q, successor(q)) where both waves exist,
/// sorted by (person_id, quarter_from). Duplicate (person, quarter) rows with
/// different states are all rejected; exact repeats keep the first row.
LinkResult link_waves(std::vector<WaveRow> rows);

/// Splits one CSV record. Double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_record(std::string_view line);

/// Writes pairs in pair_rows format (header included).
void write_pair_rows(std::ostream& out, const std::vector<ObservationPair>& pairs);

/// Demographic mix for synthetic individuals. Each person's attributes are
/// drawn from their own random stream.
struct SyntheticDemographics {
  /// Restrict ages to one band; otherwise uniform over 15..34.
  std::optional<AgeBand> age_band;
  double male_share = 0.5;
  double citizen_share = 0.9;
  /// NORTH, CENTRE, SOUTH.
  std::array<double, 3> region_shares = {0.45, 0.20, 0.35};
};

struct SyntheticPanelParams {
  StateMatrix truth{};
  StateVector initial_shares{};
  std::size_t n_individuals = 1;
  QuarterId start_quarter{2019, 1};
  /// Length of the observation window in quarters.
  int n_quarters = 6;
  std::uint64_t seed = 0;
  SyntheticDemographics demographics;
};

/// Simulates a rotating panel: each person is interviewed in quarters
/// e, e+1, e+4, e+5 (two in, two out, two in), with entry quarters e
/// staggered round-robin over the window positions that fit a full
/// rotation. Waves falling past the window are dropped. The chain runs
/// through the unobserved quarters too.
/// Throws std::invalid_argument for a non-stochastic truth, initial shares
/// not summing to 1 within 1e-9, n_individuals == 0 or n_quarters < 1.
PanelDataset generate_synthetic_panel(const SyntheticPanelParams& params);

}  // namespace stwt
