#pragma once

#include <optional>
#include <string>
#include <vector>

#include "engage/types.hpp"

namespace engage::sessionizer {

struct GapThreshold {
  enum class Source { Computed, Configured };
  double minutes = 0;  // in (0, 120]
  Source source = Source::Computed;
};

GapThreshold configured_threshold(double minutes);

// A chapter-attributed run of one student's events bounded by inactivity gaps.
// chapter == nullopt marks a general-only session, which the chapter metric
// excludes but the course-wide metric counts.
struct Session {
  std::string user;
  std::vector<LabeledEvent> events;  // non-empty, time-ordered
  std::int64_t start_day_offset = 0;
  int week = 0;
  std::optional<int> chapter;

  bool general_only() const { return !chapter.has_value(); }
};

// 95th percentile (nearest-rank) of positive same-user inter-event gaps,
// keeping only gaps within the two-hour window. Throws InsufficientData when
// no eligible gap exists.
GapThreshold compute_gap_threshold(const std::vector<LabeledEvent>& events);

// Splits one user's time-sorted events at gaps strictly above the threshold.
std::vector<std::vector<LabeledEvent>> split_by_inactivity(
    const std::vector<LabeledEvent>& user_events, const GapThreshold& threshold);

// Chapter attribution within raw sessions: the first chapter-labeled event
// fixes the chapter, a different chapter starts a new session, general events
// inherit the current chapter (a general prefix joins the first chapter seen).
std::vector<Session> attribute_chapter_sessions(
    const std::string& user, const std::vector<std::vector<LabeledEvent>>& raw_sessions);

// Full cohort: group by user, split, attribute. Output ordered by user then time.
std::vector<Session> sessionize(const std::vector<LabeledEvent>& events,
                                const GapThreshold& threshold);

}  // namespace engage::sessionizer
