#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "engage/cohort_sim.hpp"
#include "engage/timeutil.hpp"
#include "engage/types.hpp"

namespace testhelpers {

inline engage::CourseCalendar test_calendar(int num_weeks = 11) {
  engage::CourseCalendar cal;
  cal.term_start_day = engage::timeutil::parse_date("2024-01-01");
  cal.num_weeks = num_weeks;
  cal.week_length_days = 7;
  return cal;
}

inline engage::ChapterRules test_rules() {
  engage::ChapterRules rules;
  rules.general_markers = {"Forum", "System"};
  return rules;
}

// One labeled event at `minute` of the term with the given chapter label.
inline engage::LabeledEvent labeled_event(const std::string& user, std::int64_t minute,
                                          engage::ChapterLabel label,
                                          const std::string& context = "x",
                                          const engage::CourseCalendar& cal = test_calendar()) {
  engage::LabeledEvent le;
  le.event.time = cal.term_start_minutes() + minute;
  le.event.user = user;
  le.event.event_context = context;
  le.event.component = "File";
  le.event.event_name = "Course module viewed";
  le.day_offset = minute / engage::kMinutesPerDay;
  le.week = cal.week_of_day_offset(le.day_offset);
  le.chapter = label;
  return le;
}

// --- independent oracles (kept free of the implementation paths) ---------

// Average ranks by counting: rank(v) = #<v + (#==v + 1) / 2.
inline std::vector<double> rank_oracle(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

inline double spearman_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = rank_oracle(x);
  const auto ry = rank_oracle(y);
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= rx.size();
  my /= ry.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Exhaustive pair counting; positives flagged by LOW score.
inline double auc_oracle(const std::vector<double>& scores,
                         const std::vector<bool>& positive) {
  long double total = 0;
  long p = 0, n = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    ++p;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      if (scores[i] < scores[j]) total += 1;
      else if (scores[i] == scores[j]) total += 0.5;
    }
  }
  for (bool b : positive) n += b ? 0 : 1;
  return static_cast<double>(total / (static_cast<long double>(p) * n));
}

// Quadratic reference: session id of event i = number of boundary gaps at or
// before i, each boundary re-checked from scratch.
inline std::vector<std::size_t> splitter_oracle(const std::vector<std::int64_t>& times,
                                                double threshold_minutes) {
  std::vector<std::size_t> session_of(times.size(), 0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    std::size_t boundaries = 0;
    for (std::size_t k = 1; k <= i; ++k) {
      if (static_cast<double>(times[k] - times[k - 1]) > threshold_minutes) ++boundaries;
    }
    session_of[i] = boundaries;
  }
  return session_of;
}

// --- simulation configs used across suites --------------------------------

inline engage::sim::SimConfig coupled_config(std::uint64_t seed, int students = 200,
                                             int chapters = 11) {
  engage::sim::SimConfig cfg;
  cfg.students = students;
  cfg.chapters = chapters;
  cfg.seed = seed;
  cfg.archetypes = {
      {"keen", 0.25, 2.4, 0.45, 0.6, 5.5, std::nullopt},
      {"steady", 0.35, 1.4, 0.45, 1.5, 3.5, std::nullopt},
      {"lagging", 0.25, 0.7, 0.45, 4.0, 2.0, std::nullopt},
      {"minimal", 0.15, 0.3, 0.45, 6.0, 1.2, 9},
  };
  cfg.grade_model = {38, 55, 4};
  return cfg;
}

inline engage::sim::SimConfig null_config(std::uint64_t seed, int students = 200) {
  engage::sim::SimConfig cfg = coupled_config(seed, students);
  cfg.grade_model = {48, 0, 10};
  return cfg;
}

inline engage::sim::SimConfig single_chapter_config(std::uint64_t seed, int students = 60) {
  engage::sim::SimConfig cfg;
  cfg.students = students;
  cfg.chapters = 1;
  cfg.seed = seed;
  cfg.archetypes = {
      {"keen", 0.4, 2.5, 0.35, 0.5, 5.0, std::nullopt},
      {"steady", 0.4, 1.8, 0.40, 1.5, 3.0, std::nullopt},
      {"lagging", 0.2, 1.2, 0.45, 3.0, 2.0, std::nullopt},
  };
  cfg.grade_model = {40, 40, 5};
  cfg.general_session_rate = 0;   // no general-only sessions
  cfg.general_click_prob = 0;     // keeps every session chapter-attributed
  return cfg;
}

}  // namespace testhelpers
