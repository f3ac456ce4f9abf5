#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "engage/sessionizer.hpp"
#include "engage/types.hpp"

namespace engage::coursewide {

enum class Indicator { Immediacy = 0, Frequency, Diversity, Recency, Interval };
inline constexpr std::size_t kNumIndicators = 5;

// Raw full-course indicators for one student. Day-based values are undefined
// for students with no sessions.
struct RawIndicators {
  long sessions = 0;   // F~
  long diversity = 0;  // D~
  std::optional<std::int64_t> first_day;
  std::optional<std::int64_t> last_day;

  bool engaged() const { return sessions > 0; }
  std::optional<std::int64_t> immediacy() const {  // -min day
    if (!first_day) return std::nullopt;
    return -*first_day;
  }
  std::optional<std::int64_t> recency() const { return last_day; }
  std::optional<std::int64_t> interval() const {  // max - min
    if (!first_day) return std::nullopt;
    return *last_day - *first_day;
  }
};

// Computed over all of a student's sessions, general-only ones included.
RawIndicators coursewide_indicators(std::span<const sessionizer::Session* const> sessions,
                                    std::span<const EventField> activity_columns);

struct Row {
  std::string user;
  RawIndicators raw;
  std::array<double, kNumIndicators> scaled{};  // order: I, F, D, R, Int
  double score = 0;
};

double coursewide_score(const std::array<double, kNumIndicators>& scaled,
                        const std::array<double, kNumIndicators>& weights);

// Score restricted to a subset of indicators (same scaled values, partial sum).
double coursewide_variant(const std::array<double, kNumIndicators>& scaled,
                          std::span<const Indicator> subset,
                          const std::array<double, kNumIndicators>& weights);

struct Options {
  std::vector<EventField> activity_columns = {EventField::EventContext};
  std::array<double, kNumIndicators> weights = {1, 1, 1, 1, 1};
};

// Full-cohort table: raw indicators, min-max scaled values, and Y per student.
// Zero-session students carry raw F~ = D~ = 0 into the scaling population and
// get scaled 0 for the day-based indicators.
std::vector<Row> coursewide_table(const std::vector<sessionizer::Session>& sessions,
                                  const std::vector<std::string>& cohort_users,
                                  const Options& options = {});

}  // namespace engage::coursewide
