#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "engage/sessionizer.hpp"
#include "engage/types.hpp"

namespace engage::chapter_metric {

// Raw per-(student, chapter, week) indicators. frequency == 0 marks the row
// unengaged; immediacy and diversity are only meaningful when engaged.
struct RawIndicators {
  long frequency = 0;                      // session count
  std::optional<std::int64_t> immediacy;   // release_day - first_session_day, <= 0
  long diversity = 0;                      // distinct activities touched

  bool engaged() const { return frequency > 0; }
};

// Release-day proxy for a chapter: the cohort-wide minimum first-access day,
// frozen at the week the chapter is first observed.
struct ChapterRelease {
  int chapter = 0;
  std::int64_t release_day = 0;
  int observed_from_week = 0;
};

RawIndicators raw_indicators(std::span<const sessionizer::Session* const> sessions,
                             std::int64_t release_day,
                             std::span<const EventField> activity_columns);

// v -> (v - min) / (max - min); a constant population maps to all zeros.
// Throws EmptyPopulation on empty input.
std::vector<double> minmax_scale(std::span<const double> values);

// IDF = F + I + D for scaled inputs in [0,1].
double chapter_score(double frequency, double immediacy, double diversity);

// y = sum of w_k * IDF_k. Throws WeightMismatch when the weight vector is
// shorter than the chapter-score vector.
double engagement_score(std::span<const double> idf, std::span<const double> weights);

struct MetricOptions {
  std::vector<EventField> activity_columns = {EventField::EventContext};
  // Indexed by chapter number - 1; empty means every chapter weighs 1.
  std::vector<double> chapter_weights;
};

// Cumulative weekly engagement for the whole cohort. Students with no
// sessions stay in the cohort with a zero score.
struct WeeklySeries {
  std::vector<std::string> users;          // sorted
  std::vector<ChapterRelease> releases;    // ascending chapter number
  std::vector<double> weights;             // aligned with releases
  int num_weeks = 0;

  std::vector<std::vector<double>> scores;              // [user][week-1]
  std::vector<std::vector<std::vector<double>>> idf;    // [user][week-1][release_idx]

  int chapters_released_by(int week) const;
  double score_upper_bound(int week) const;  // 3 * K_t
};

WeeklySeries weekly_series(const std::vector<sessionizer::Session>& sessions,
                           const std::vector<std::string>& cohort_users,
                           const CourseCalendar& calendar,
                           const MetricOptions& options = {},
                           int up_to_week = 0 /* 0 = all weeks */);

}  // namespace engage::chapter_metric
