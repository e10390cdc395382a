#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace stwt {

/// Labour-market states. The enumerator order is the canonical row/column
/// order of every transition matrix in the library.
enum class LaborState : std::uint8_t { SE, TE, PE, U, NLFET, EDU, FS };

inline constexpr std::size_t kNumStates = 7;

inline constexpr std::array<LaborState, kNumStates> kAllStates = {
    LaborState::SE, LaborState::TE,  LaborState::PE, LaborState::U,
    LaborState::NLFET, LaborState::EDU, LaborState::FS};

/// Dense 7x7 matrix indexed by state_index().
using StateMatrix = std::array<std::array<double, kNumStates>, kNumStates>;
using StateVector = std::array<double, kNumStates>;

constexpr std::size_t state_index(LaborState s) noexcept {
  return static_cast<std::size_t>(s);
}

/// Index of the first row that has a negative entry or whose sum differs
/// from 1 by more than tolerance; nullopt when the matrix is row-stochastic.
std::optional<std::size_t> find_non_stochastic_row(const StateMatrix& m,
                                                   double tolerance = 1e-9) noexcept;

/// Inverse of state_index(). Throws std::out_of_range for index >= 7.
LaborState state_at(std::size_t index);

std::string_view to_string(LaborState s) noexcept;

/// Case-insensitive. "NEET" is accepted as an alias of NLFET.
std::optional<LaborState> parse_state(std::string_view text);

/// Calendar quarter, ordered by (year, quarter).
struct QuarterId {
  int year = 1900;
  int quarter = 1;

  friend constexpr auto operator<=>(const QuarterId&, const QuarterId&) = default;
};

/// Validating constructor: year >= 1900, quarter in 1..4.
/// Throws std::invalid_argument otherwise.
QuarterId make_quarter(int year, int quarter);

/// Parses "YYYY.Q" (e.g. "2020.3").
std::optional<QuarterId> parse_quarter(std::string_view text);
std::string to_string(QuarterId q);

QuarterId quarter_successor(QuarterId q) noexcept;
QuarterId quarter_advance(QuarterId q, int steps) noexcept;

enum class AgeBand : std::uint8_t { Teens, EarlyYoung, LateYoung, PreAdults };

struct AgeRange {
  int lo;
  int hi;
};

inline constexpr int kMinAdmittedAge = 15;
inline constexpr int kMaxAdmittedAge = 34;

AgeRange age_range(AgeBand band) noexcept;
std::optional<AgeBand> age_band_of(int age) noexcept;
std::string_view to_string(AgeBand band) noexcept;
/// Accepts the CLI spellings (teens, early, late, preadult) and the
/// enumerator names (TEENS, EARLY_YOUNG, ...), case-insensitively.
std::optional<AgeBand> parse_age_band(std::string_view text);

enum class Sex : std::uint8_t { Male, Female };
std::string_view to_string(Sex s) noexcept;
std::optional<Sex> parse_sex(std::string_view text);

enum class Region : std::uint8_t { North, Centre, South };
std::string_view to_string(Region r) noexcept;
std::optional<Region> parse_region(std::string_view text);

struct Demographics {
  int age_at_first_wave = kMinAdmittedAge;
  Sex sex = Sex::Male;
  bool italian_citizen = true;
  Region macro_region = Region::North;

  friend bool operator==(const Demographics&, const Demographics&) = default;
};

constexpr bool is_admitted_age(int age) noexcept {
  return age >= kMinAdmittedAge && age <= kMaxAdmittedAge;
}

/// Conjunction of optional restrictions; an absent field does not restrict.
struct CohortFilter {
  std::optional<AgeBand> age_band;
  std::optional<Sex> sex;
  std::optional<bool> citizen;
  std::optional<Region> region;

  bool matches(const Demographics& d) const noexcept;
  bool is_all() const noexcept {
    return !age_band && !sex && !citizen && !region;
  }
  /// "All" for the empty filter, otherwise e.g. "age=EARLY_YOUNG;sex=F".
  std::string describe() const;

  friend bool operator==(const CohortFilter&, const CohortFilter&) = default;
};

}  // namespace stwt
