#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "engage/errors.hpp"
#include "engage/pipeline.hpp"
#include "engage/run_config.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string log_path;
  std::string grades_path;
  std::string scores_path;
  std::string coursewide_path;
  int as_of_week = 0;
  double threshold_minutes = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool write_sessions = false;
  std::vector<std::string> indicators;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
}

engage::RunConfig build_config(const CommonArgs& args) {
  engage::RunConfig cfg = engage::load_run_config(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (!args.log_path.empty()) cfg.log_path = args.log_path;
  if (!args.grades_path.empty()) cfg.grades_path = args.grades_path;
  if (!args.scores_path.empty()) cfg.scores_path = args.scores_path;
  if (!args.coursewide_path.empty()) cfg.coursewide_path = args.coursewide_path;
  if (args.as_of_week != 0) {
    if (args.as_of_week < 1 || args.as_of_week > cfg.calendar.num_weeks) {
      throw engage::InvalidConfigError(
          "--as-of-week " + std::to_string(args.as_of_week) + " outside [1, " +
          std::to_string(cfg.calendar.num_weeks) + "]");
    }
    cfg.as_of_week = args.as_of_week;
  }
  if (args.threshold_minutes != 0) {
    if (!(args.threshold_minutes > 0) || args.threshold_minutes > 120) {
      throw engage::InvalidConfigError("--threshold-minutes must be in (0, 120]");
    }
    cfg.threshold_minutes = args.threshold_minutes;
  }
  if (args.seed_set) cfg.simulate.seed = args.seed;
  if (args.write_sessions) cfg.write_sessions = true;
  if (!args.indicators.empty()) {
    cfg.coursewide_indicators.clear();
    for (const std::string& name : args.indicators) {
      if (name == "immediacy") cfg.coursewide_indicators.push_back(engage::coursewide::Indicator::Immediacy);
      else if (name == "frequency") cfg.coursewide_indicators.push_back(engage::coursewide::Indicator::Frequency);
      else if (name == "diversity") cfg.coursewide_indicators.push_back(engage::coursewide::Indicator::Diversity);
      else if (name == "recency") cfg.coursewide_indicators.push_back(engage::coursewide::Indicator::Recency);
      else if (name == "interval") cfg.coursewide_indicators.push_back(engage::coursewide::Indicator::Interval);
      else throw engage::InvalidConfigError("unknown indicator \"" + name + "\"");
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chapter-aligned VLE engagement metrics and evaluation"};
  app.require_subcommand(1);

  CommonArgs args;

  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic cohort");
  add_common(simulate, args);
  simulate->add_option("--seed", args.seed, "simulation seed")
      ->each([&](const std::string&) { args.seed_set = true; });

  CLI::App* score = app.add_subcommand("score", "Compute weekly engagement scores");
  add_common(score, args);
  score->add_option("--log", args.log_path, "activity log CSV");
  score->add_option("--grades", args.grades_path, "grades CSV (applies exclusions)");
  score->add_option("--as-of-week", args.as_of_week, "score with data up to this week");
  score->add_option("--threshold-minutes", args.threshold_minutes,
                    "pin the inactivity threshold");
  score->add_flag("--sessions", args.write_sessions, "also write sessions.csv");

  CLI::App* coursewide =
      app.add_subcommand("score-coursewide", "Compute the course-wide metric");
  add_common(coursewide, args);
  coursewide->add_option("--log", args.log_path, "activity log CSV");
  coursewide->add_option("--grades", args.grades_path, "grades CSV (applies exclusions)");
  coursewide->add_option("--threshold-minutes", args.threshold_minutes,
                         "pin the inactivity threshold");
  coursewide->add_option("--indicators", args.indicators,
                         "restrict the score to these indicators")
      ->delimiter(',');

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate scores against grades");
  add_common(evaluate, args);
  evaluate->add_option("--scores", args.scores_path, "scores CSV from `score`");
  evaluate->add_option("--coursewide", args.coursewide_path,
                       "coursewide CSV from `score-coursewide`");
  evaluate->add_option("--grades", args.grades_path, "grades CSV");

  CLI::App* report =
      app.add_subcommand("report", "score + score-coursewide + evaluate in one run");
  add_common(report, args);
  report->add_option("--log", args.log_path, "activity log CSV");
  report->add_option("--grades", args.grades_path, "grades CSV");
  report->add_option("--threshold-minutes", args.threshold_minutes,
                     "pin the inactivity threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const engage::RunConfig cfg = build_config(args);
    if (simulate->parsed()) engage::pipeline::run_simulate(cfg);
    if (score->parsed()) engage::pipeline::run_score(cfg);
    if (coursewide->parsed()) engage::pipeline::run_score_coursewide(cfg);
    if (evaluate->parsed()) engage::pipeline::run_evaluate(cfg);
    if (report->parsed()) engage::pipeline::run_report(cfg);
    return 0;
  } catch (const engage::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
