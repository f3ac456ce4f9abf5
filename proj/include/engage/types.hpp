#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "engage/timeutil.hpp"

namespace engage {

// One VLE click record (Moodle-style activity log row).
struct LogEvent {
  Minutes time = 0;
  std::string user;
  std::string event_context;  // title of the link or resource accessed
  std::string component;      // resource/activity category
  std::string event_name;     // purpose of the click
  std::string description;

  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

enum class LabelKind { Chapter, General, Excluded };

struct ChapterLabel {
  LabelKind kind = LabelKind::General;
  int number = 0;  // valid when kind == Chapter

  static ChapterLabel chapter(int k) { return {LabelKind::Chapter, k}; }
  static ChapterLabel general() { return {LabelKind::General, 0}; }
  static ChapterLabel excluded() { return {LabelKind::Excluded, 0}; }

  bool is_chapter() const { return kind == LabelKind::Chapter; }
  bool is_general() const { return kind == LabelKind::General; }

  friend bool operator==(const ChapterLabel&, const ChapterLabel&) = default;
};

struct CourseCalendar {
  std::int64_t term_start_day = 0;  // days since epoch
  int num_weeks = 11;
  int week_length_days = 7;
  // Minute-of-week at which week t is measured; -1 means the default
  // (last minute of the final day of the week).
  int measurement_anchor_minute = -1;

  Minutes term_start_minutes() const { return term_start_day * kMinutesPerDay; }
  std::int64_t term_length_days() const {
    return static_cast<std::int64_t>(num_weeks) * week_length_days;
  }
  Minutes term_end_minutes() const {
    return (term_start_day + term_length_days()) * kMinutesPerDay;
  }
  int week_of_day_offset(std::int64_t day_offset) const {
    return static_cast<int>(day_offset / week_length_days) + 1;
  }
  int anchor_minute() const {
    return measurement_anchor_minute >= 0 ? measurement_anchor_minute
                                          : week_length_days * static_cast<int>(kMinutesPerDay) - 1;
  }
  // Inclusive cutoff instant for measuring as of week `t` (1-based).
  Minutes measurement_cutoff(int week) const {
    return term_start_minutes() +
           static_cast<Minutes>(week - 1) * week_length_days * kMinutesPerDay +
           anchor_minute();
  }
};

// How chapter labels are derived from resource text.
struct ChapterRules {
  std::string numeric_pattern = R"(chapter\s*(\d+))";  // case-insensitive, group 1
  std::map<std::string, ChapterLabel> overrides;       // exact title -> label
  std::vector<std::string> general_markers;            // component values forced General
};

struct LabeledEvent {
  LogEvent event;
  int week = 0;                  // 1..num_weeks
  std::int64_t day_offset = 0;   // days since term_start
  ChapterLabel chapter;
};

struct GradeRecord {
  std::string user;
  double final_grade = 0;
  std::optional<double> exam_grade;
  bool excluded = false;  // true iff final_grade == 0 (or exam_grade == 0)
};

// Column selectors for chapter text / activity identity.
enum class EventField { EventContext, Component, EventName, Description };

EventField event_field_from_name(const std::string& name);
std::string event_field_name(EventField field);
const std::string& field_value(const LogEvent& event, EventField field);

// Identity key of the activity an event touches, built from the configured
// column tuple (default: event_context alone).
std::string activity_key(const LogEvent& event, std::span<const EventField> columns);

// Log file format: delimiter, timestamp pattern, header-name mapping.
struct LogColumns {
  std::string time = "Time";
  std::string user = "User";
  std::string event_context = "Event.context";
  std::string component = "Component";
  std::string event_name = "Event.name";
  std::string description = "Description";
};

struct LogFormat {
  char delimiter = ',';
  std::string timestamp_format = "%Y-%m-%d %H:%M";
  LogColumns columns;
};

}  // namespace engage
