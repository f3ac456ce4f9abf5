#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "engage/chapter_metric.hpp"
#include "engage/coursewide_metric.hpp"
#include "engage/evaluation.hpp"
#include "engage/run_config.hpp"
#include "engage/sessionizer.hpp"

namespace engage::pipeline {

// In-memory result of the scoring stages; the run_* functions below write the
// corresponding artifacts to config.out_dir.
struct ScoreResult {
  chapter_metric::WeeklySeries series;
  sessionizer::GapThreshold threshold{};
  std::vector<sessionizer::Session> sessions;
  std::vector<std::string> excluded_users;
  std::size_t events_parsed = 0;
  std::size_t events_labeled = 0;
  int as_of_week = 0;
};

ScoreResult compute_scores(const RunConfig& config);

struct CoursewideResult {
  std::vector<coursewide::Row> rows;
  sessionizer::GapThreshold threshold{};
};

CoursewideResult compute_coursewide(const RunConfig& config);

// CLI entry points. Each writes deterministic artifacts into config.out_dir.
void run_simulate(const RunConfig& config);
void run_score(const RunConfig& config);
void run_score_coursewide(const RunConfig& config);
void run_evaluate(const RunConfig& config);
void run_report(const RunConfig& config);

// Readers for the artifacts evaluate consumes (exposed for tests).
struct ScoresFile {
  std::vector<std::string> users;                  // sorted
  std::vector<std::vector<double>> weekly_scores;  // [week-1][user]
};
ScoresFile read_scores_csv(const std::filesystem::path& path);
std::vector<std::pair<std::string, double>> read_coursewide_csv(
    const std::filesystem::path& path);

}  // namespace engage::pipeline
