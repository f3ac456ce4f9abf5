#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "engage/types.hpp"

namespace engage::sim {

// One behavioural profile in the cohort mix. Rates and counts are means of
// per-student draws, so students inside an archetype still vary.
struct ArchetypeConfig {
  std::string name;
  double mix_weight = 0;
  double session_rate_mean = 1.0;        // sessions per chapter-week
  double session_rate_dispersion = 0.3;  // CV of the per-student rate
  double first_access_delay_mean_days = 1.0;
  double activity_breadth_mean = 3.0;    // distinct resources per chapter
  std::optional<int> dropout_week;       // stops emitting events from this week
};

// grade = clamp(base + coefficient * latent01 + noise, 0, 100)
struct GradeModel {
  double base_grade = 38;
  double engagement_coefficient = 55;
  double noise_scale = 4;
};

struct SimConfig {
  int students = 200;
  int chapters = 11;
  std::uint64_t seed = 1;
  std::vector<ArchetypeConfig> archetypes;
  GradeModel grade_model;
  double general_session_rate = 0.15;  // standalone general sessions per week
  double general_click_prob = 0.05;    // general click inside a chapter session
  double revision_decay = 0.5;         // weekly rate decay after first access
  std::vector<int> chapter_release_weeks;  // empty: chapter k opens week k
};

void validate(const SimConfig& config, const CourseCalendar& calendar);

struct StudentInfo {
  std::string user;
  std::string archetype;
  double latent = 0;  // latent engagement, min-max scaled over the cohort
};

struct SimResult {
  std::vector<LogEvent> events;       // time-sorted
  std::vector<GradeRecord> grades;    // user order
  std::vector<StudentInfo> students;  // user order
};

// Deterministic in (calendar, config): the seed fixes all randomness and
// students are generated from per-student derived seeds.
SimResult generate_cohort(const CourseCalendar& calendar, const SimConfig& config);

}  // namespace engage::sim
