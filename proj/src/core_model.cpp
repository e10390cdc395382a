#include "stwt/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace stwt {

namespace {

std::string upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace

std::optional<std::size_t> find_non_stochastic_row(const StateMatrix& m,
                                                   double tolerance) noexcept {
  for (std::size_t i = 0; i < kNumStates; ++i) {
    double sum = 0.0;
    for (double p : m[i]) {
      if (!(p >= 0.0)) return i;
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) return i;
  }
  return std::nullopt;
}

LaborState state_at(std::size_t index) {
  if (index >= kNumStates) {
    throw std::out_of_range("state index out of range: " + std::to_string(index));
  }
  return kAllStates[index];
}

std::string_view to_string(LaborState s) noexcept {
  switch (s) {
    case LaborState::SE: return "SE";
    case LaborState::TE: return "TE";
    case LaborState::PE: return "PE";
    case LaborState::U: return "U";
    case LaborState::NLFET: return "NLFET";
    case LaborState::EDU: return "EDU";
    case LaborState::FS: return "FS";
  }
  return "?";
}

std::optional<LaborState> parse_state(std::string_view text) {
  const std::string code = upper(text);
  if (code == "NEET") return LaborState::NLFET;
  for (LaborState s : kAllStates) {
    if (code == to_string(s)) return s;
  }
  return std::nullopt;
}

QuarterId make_quarter(int year, int quarter) {
  if (year < 1900 || quarter < 1 || quarter > 4) {
    throw std::invalid_argument("invalid quarter " + std::to_string(year) + "." +
                                std::to_string(quarter));
  }
  return QuarterId{year, quarter};
}

std::optional<QuarterId> parse_quarter(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || dot + 2 != text.size()) return std::nullopt;
  int year = 0;
  const auto* first = text.data();
  const auto* last = text.data() + dot;
  auto [ptr, ec] = std::from_chars(first, last, year);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  const char qc = text[dot + 1];
  if (qc < '1' || qc > '4' || year < 1900) return std::nullopt;
  return QuarterId{year, qc - '0'};
}

std::string to_string(QuarterId q) {
  return std::to_string(q.year) + "." + std::to_string(q.quarter);
}

QuarterId quarter_successor(QuarterId q) noexcept {
  if (q.quarter == 4) return QuarterId{q.year + 1, 1};
  return QuarterId{q.year, q.quarter + 1};
}

QuarterId quarter_advance(QuarterId q, int steps) noexcept {
  const int linear = q.year * 4 + (q.quarter - 1) + steps;
  return QuarterId{linear / 4, linear % 4 + 1};
}

AgeRange age_range(AgeBand band) noexcept {
  switch (band) {
    case AgeBand::Teens: return {15, 19};
    case AgeBand::EarlyYoung: return {20, 24};
    case AgeBand::LateYoung: return {25, 29};
    case AgeBand::PreAdults: return {30, 34};
  }
  return {0, -1};
}

std::optional<AgeBand> age_band_of(int age) noexcept {
  for (AgeBand band : {AgeBand::Teens, AgeBand::EarlyYoung, AgeBand::LateYoung,
                       AgeBand::PreAdults}) {
    const AgeRange r = age_range(band);
    if (age >= r.lo && age <= r.hi) return band;
  }
  return std::nullopt;
}

std::string_view to_string(AgeBand band) noexcept {
  switch (band) {
    case AgeBand::Teens: return "TEENS";
    case AgeBand::EarlyYoung: return "EARLY_YOUNG";
    case AgeBand::LateYoung: return "LATE_YOUNG";
    case AgeBand::PreAdults: return "PRE_ADULTS";
  }
  return "?";
}

std::optional<AgeBand> parse_age_band(std::string_view text) {
  const std::string t = upper(text);
  if (t == "TEENS" || t == "TEEN") return AgeBand::Teens;
  if (t == "EARLY" || t == "EARLY_YOUNG") return AgeBand::EarlyYoung;
  if (t == "LATE" || t == "LATE_YOUNG") return AgeBand::LateYoung;
  if (t == "PREADULT" || t == "PREADULTS" || t == "PRE_ADULTS") return AgeBand::PreAdults;
  return std::nullopt;
}

std::string_view to_string(Sex s) noexcept { return s == Sex::Male ? "M" : "F"; }

std::optional<Sex> parse_sex(std::string_view text) {
  const std::string t = upper(text);
  if (t == "M") return Sex::Male;
  if (t == "F") return Sex::Female;
  return std::nullopt;
}

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::North: return "NORTH";
    case Region::Centre: return "CENTRE";
    case Region::South: return "SOUTH";
  }
  return "?";
}

std::optional<Region> parse_region(std::string_view text) {
  const std::string t = upper(text);
  if (t == "NORTH") return Region::North;
  if (t == "CENTRE") return Region::Centre;
  if (t == "SOUTH") return Region::South;
  return std::nullopt;
}

bool CohortFilter::matches(const Demographics& d) const noexcept {
  if (age_band) {
    const AgeRange r = age_range(*age_band);
    if (d.age_at_first_wave < r.lo || d.age_at_first_wave > r.hi) return false;
  }
  if (sex && d.sex != *sex) return false;
  if (citizen && d.italian_citizen != *citizen) return false;
  if (region && d.macro_region != *region) return false;
  return true;
}

std::string CohortFilter::describe() const {
  if (is_all()) return "All";
  std::string out;
  auto add = [&out](std::string_view key, std::string_view value) {
    if (!out.empty()) out += ';';
    out += key;
    out += '=';
    out += value;
  };
  if (age_band) add("age", to_string(*age_band));
  if (sex) add("sex", to_string(*sex));
  if (citizen) add("citizen", *citizen ? "1" : "0");
  if (region) add("region", to_string(*region));
  return out;
}

}  // namespace stwt
