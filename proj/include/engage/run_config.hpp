#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "engage/cohort_sim.hpp"
#include "engage/coursewide_metric.hpp"
#include "engage/types.hpp"

namespace engage {

// Everything a pipeline run needs: paths, calendar, labeling rules, metric
// options and the simulation section. Loaded from a JSON config file; a few
// fields can be overridden from the command line.
struct RunConfig {
  std::filesystem::path log_path;
  std::filesystem::path grades_path;
  std::filesystem::path out_dir = ".";
  std::filesystem::path scores_path;      // defaults to out_dir/scores.csv
  std::filesystem::path coursewide_path;  // defaults to out_dir/coursewide.csv

  CourseCalendar calendar;
  ChapterRules rules;
  LogFormat log_format;
  EventField chapter_text_column = EventField::EventContext;
  std::vector<EventField> activity_columns = {EventField::EventContext};

  std::optional<double> threshold_minutes;
  std::vector<double> chapter_weights;
  std::array<double, coursewide::kNumIndicators> coursewide_weights = {1, 1, 1, 1, 1};
  std::vector<coursewide::Indicator> coursewide_indicators;  // empty = all five
  std::optional<int> as_of_week;
  bool write_idf_columns = true;
  bool write_sessions = false;

  sim::SimConfig simulate;

  std::filesystem::path scores_file() const {
    return scores_path.empty() ? out_dir / "scores.csv" : scores_path;
  }
  std::filesystem::path coursewide_file() const {
    return coursewide_path.empty() ? out_dir / "coursewide.csv" : coursewide_path;
  }
};

// Parses and validates a config document. Throws InvalidConfig / ConfigError
// with the offending key in the message.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// The archetype mix used when the config has no simulate.archetypes section:
// a four-profile cohort whose engagement couples to grades.
std::vector<sim::ArchetypeConfig> default_archetypes();

}  // namespace engage
