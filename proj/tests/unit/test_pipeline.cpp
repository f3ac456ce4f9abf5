#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "engage/errors.hpp"
#include "engage/evaluation.hpp"
#include "engage/ingest.hpp"
#include "engage/pipeline.hpp"
#include "engage/run_config.hpp"
#include "helpers.hpp"

using namespace engage;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("engage_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string config_json(const fs::path& dir, std::uint64_t seed = 1, int students = 30,
                        int chapters = 4) {
  std::ostringstream os;
  os << R"({
  "calendar": {"term_start": "2024-01-01", "num_weeks": 11},
  "rules": {"general_markers": ["Forum", "System"]},
  "paths": {
    "log": ")" << (dir / "log.csv").string() << R"(",
    "grades": ")" << (dir / "grades.csv").string() << R"(",
    "out_dir": ")" << dir.string() << R"("
  },
  "simulate": {"seed": )" << seed << R"(, "students": )" << students
     << R"(, "chapters": )" << chapters << R"(}
})";
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run config validation") {
  CHECK_THROWS_AS(parse_run_config("not json"), InvalidConfigError);
  CHECK_THROWS_AS(parse_run_config("{}"), InvalidConfigError);  // calendar required
  CHECK_THROWS_AS(
      parse_run_config(R"({"calendar": {"term_start": "2024-01-01"}, "as_of_week": 0})"),
      InvalidConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"calendar": {"term_start": "2024-01-01"}, "as_of_week": 12})"),
      InvalidConfigError);
  CHECK_THROWS_AS(
      parse_run_config(
          R"({"calendar": {"term_start": "2024-01-01"}, "threshold_minutes": 200})"),
      InvalidConfigError);
  const auto cfg = parse_run_config(R"({"calendar": {"term_start": "2024-01-01"}})");
  CHECK(cfg.calendar.num_weeks == 11);
  CHECK(cfg.calendar.week_length_days == 7);
  CHECK_FALSE(cfg.simulate.archetypes.empty());
}

TEST_CASE("simulate -> score -> evaluate round trip") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path));
  pipeline::run_simulate(cfg);
  CHECK(fs::exists(dir.path / "log.csv"));
  CHECK(fs::exists(dir.path / "grades.csv"));
  CHECK(fs::exists(dir.path / "manifest.json"));

  pipeline::run_score(cfg);
  CHECK(fs::exists(dir.path / "scores.csv"));
  CHECK(fs::exists(dir.path / "score_manifest.json"));

  pipeline::run_score_coursewide(cfg);
  CHECK(fs::exists(dir.path / "coursewide.csv"));

  pipeline::run_evaluate(cfg);
  CHECK(fs::exists(dir.path / "report.json"));
  CHECK(fs::exists(dir.path / "alignment_series.csv"));
  CHECK(fs::exists(dir.path / "grade_rho_series.csv"));
  CHECK(fs::exists(dir.path / "quintile_summary.csv"));
  CHECK(fs::exists(dir.path / "classification_series.csv"));

  // scores within bounds, full cohort
  const auto scores = pipeline::read_scores_csv(dir.path / "scores.csv");
  CHECK(scores.users.size() == 30);
  REQUIRE(scores.weekly_scores.size() == 11);
  for (const auto& week : scores.weekly_scores) {
    for (double y : week) {
      CHECK(y >= 0.0);
      CHECK(y <= 3.0 * 4);
    }
  }
}

TEST_CASE("pipeline is deterministic byte for byte") {
  TempDir a, b;
  for (const auto* dir : {&a.path, &b.path}) {
    RunConfig cfg = parse_run_config(config_json(*dir, 7));
    pipeline::run_simulate(cfg);
    pipeline::run_report(cfg);
  }
  for (const char* name :
       {"log.csv", "grades.csv", "manifest.json", "scores.csv", "coursewide.csv",
        "report.json", "alignment_series.csv", "grade_rho_series.csv",
        "quintile_summary.csv", "classification_series.csv", "score_manifest.json"}) {
    CHECK_MESSAGE(slurp(a.path / name) == slurp(b.path / name), name);
  }
}

TEST_CASE("as-of-week truncation keeps later weeks out of the score file") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 3));
  pipeline::run_simulate(cfg);
  cfg.as_of_week = 2;
  pipeline::run_score(cfg);
  const auto scores = pipeline::read_scores_csv(dir.path / "scores.csv");
  CHECK(scores.weekly_scores.size() == 2);
}

TEST_CASE("evaluate reports a cohort mismatch naming the student") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 5, 20, 3));
  pipeline::run_simulate(cfg);
  pipeline::run_score(cfg);
  pipeline::run_score_coursewide(cfg);

  // drop one student from the grades file
  const std::string grades = slurp(dir.path / "grades.csv");
  std::istringstream in(grades);
  std::ostringstream out;
  std::string line;
  std::string dropped;
  int row = 0;
  while (std::getline(in, line)) {
    if (row++ == 1) {
      dropped = line.substr(0, line.find(','));
      continue;
    }
    out << line << '\n';
  }
  {
    std::ofstream g(dir.path / "grades.csv", std::ios::binary);
    g << out.str();
  }
  CHECK_THROWS_WITH_AS(pipeline::run_evaluate(cfg), doctest::Contains(dropped.c_str()),
                       CohortMismatchError);
}

TEST_CASE("evaluate without grades is a missing-grades error") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 5, 20, 3));
  pipeline::run_simulate(cfg);
  pipeline::run_score(cfg);
  pipeline::run_score_coursewide(cfg);
  cfg.grades_path.clear();
  CHECK_THROWS_AS(pipeline::run_evaluate(cfg), MissingGradesError);
}

TEST_CASE("score manifest carries threshold and release metadata") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 11));
  pipeline::run_simulate(cfg);
  cfg.write_sessions = true;
  pipeline::run_score(cfg);
  const std::string manifest = slurp(dir.path / "score_manifest.json");
  CHECK(manifest.find("\"threshold\"") != std::string::npos);
  CHECK(manifest.find("\"releases\"") != std::string::npos);
  CHECK(manifest.find("\"cohort_size\"") != std::string::npos);
  CHECK(fs::exists(dir.path / "sessions.csv"));

  // computed thresholds stay within the two-hour window
  const auto result = pipeline::compute_scores(cfg);
  CHECK(result.threshold.minutes > 0);
  CHECK(result.threshold.minutes <= 120);
}

TEST_CASE("configured threshold is honoured end to end") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 2));
  pipeline::run_simulate(cfg);
  cfg.threshold_minutes = 30;
  const auto result = pipeline::compute_scores(cfg);
  CHECK(result.threshold.minutes == 30);
  CHECK(result.threshold.source == sessionizer::GapThreshold::Source::Configured);
}

TEST_CASE("alignment and grade correlations behave on a coupled cohort") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 21, 120, 11));
  pipeline::run_simulate(cfg);
  const auto scores = pipeline::compute_scores(cfg);
  const auto cw = pipeline::compute_coursewide(cfg);

  std::map<std::string, double> y_of;
  for (const auto& row : cw.rows) y_of.emplace(row.user, row.score);
  std::ifstream grades_in(dir.path / "grades.csv");
  const auto grade_records = ingest::read_grades(grades_in);
  std::map<std::string, double> grade_of;
  for (const auto& g : grade_records) grade_of.emplace(g.user, g.final_grade);

  const auto& series = scores.series;
  std::vector<std::vector<double>> weekly(series.num_weeks);
  std::vector<double> coursewide, grades;
  for (std::size_t u = 0; u < series.users.size(); ++u) {
    for (int t = 1; t <= series.num_weeks; ++t) {
      weekly[t - 1].push_back(series.scores[u][t - 1]);
    }
    coursewide.push_back(y_of.at(series.users[u]));
    grades.push_back(grade_of.at(series.users[u]));
  }

  const auto alignment = evaluation::alignment_series(weekly, coursewide);
  REQUIRE(alignment.front().has_value());
  REQUIRE(alignment.back().has_value());
  CHECK(*alignment.back() > *alignment.front());  // accumulates toward the reference
  CHECK(*alignment.back() > 0.8);

  const auto grade_rho = evaluation::grade_correlation_series(weekly, grades, coursewide);
  for (int t = 6; t <= 11; ++t) {
    REQUIRE(grade_rho.weekly[t - 1].has_value());
    CHECK(*grade_rho.weekly[t - 1] > 0.3);  // engagement-driven grades from mid-course
  }
}

TEST_CASE("an empty log scores a silent cohort as all zeros") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 1, 12, 3));
  cfg.simulate.archetypes = {{"silent", 1.0, 0.0, 0.0, 0.0, 0.0, std::nullopt}};
  cfg.simulate.general_session_rate = 0;
  pipeline::run_simulate(cfg);

  // header-only log
  std::ifstream log_in(dir.path / "log.csv");
  std::string line;
  int lines = 0;
  while (std::getline(log_in, line)) ++lines;
  CHECK(lines == 1);

  // no eligible gaps: a computed threshold is impossible
  CHECK_THROWS_AS(pipeline::compute_scores(cfg), InsufficientDataError);

  // with a configured threshold the cohort scores zero everywhere
  cfg.threshold_minutes = 20;
  const auto result = pipeline::compute_scores(cfg);
  CHECK(result.series.users.size() == 12);
  for (const auto& per_week : result.series.scores) {
    for (double y : per_week) CHECK(y == 0.0);
  }
}

TEST_CASE("measurement anchor bounds the as-of cutoff inside the week") {
  TempDir dir;
  {
    std::ofstream log(dir.path / "log.csv", std::ios::binary);
    log << "Time,User,Event.context,Component,Event.name,Description\n"
           "2024-01-01 10:00,s1,Chapter 1 Notes,File,viewed,d\n"   // day 0
           "2024-01-08 10:00,s1,Chapter 2 Notes,File,viewed,d\n"   // week 2, day 1
           "2024-01-09 10:00,s1,Chapter 2 Quiz,Quiz,viewed,d\n";   // week 2, day 2
  }
  std::ostringstream os;
  os << R"({"calendar": {"term_start": "2024-01-01", "num_weeks": 4,
            "measurement_anchor_minute": )" << (kMinutesPerDay - 1) << R"(},
        "paths": {"log": ")" << (dir.path / "log.csv").string()
     << R"(", "out_dir": ")" << dir.path.string() << R"("}})";
  RunConfig cfg = parse_run_config(os.str());
  cfg.threshold_minutes = 30;
  cfg.as_of_week = 2;
  const auto result = pipeline::compute_scores(cfg);
  // the week-2 anchor sits at the end of day 1, so the day-2 event is out
  CHECK(result.events_labeled == 2);
}

TEST_CASE("computed thresholds on simulated cohorts land in a plausible range") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 8, 80, 8));
  pipeline::run_simulate(cfg);
  const auto result = pipeline::compute_scores(cfg);
  CHECK(result.threshold.source == sessionizer::GapThreshold::Source::Computed);
  CHECK(result.threshold.minutes >= 5);
  CHECK(result.threshold.minutes <= 30);
}

TEST_CASE("score without a grades file uses the log's own cohort") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 6, 25, 3));
  pipeline::run_simulate(cfg);
  cfg.grades_path.clear();
  const auto result = pipeline::compute_scores(cfg);
  CHECK(result.series.users.size() > 0);
  CHECK(result.series.users.size() <= 25);  // silent students never appear in the log
  CHECK(result.excluded_users.empty());
}

TEST_CASE("excluded (grade zero) students vanish from the cohort") {
  TempDir dir;
  RunConfig cfg = parse_run_config(config_json(dir.path, 4, 15, 3));
  pipeline::run_simulate(cfg);

  // force one student's grade to zero
  std::istringstream in(slurp(dir.path / "grades.csv"));
  std::ostringstream out;
  std::string line;
  int row = 0;
  std::string zeroed;
  while (std::getline(in, line)) {
    if (row++ == 1) {
      zeroed = line.substr(0, line.find(','));
      out << zeroed << ",0\n";
      continue;
    }
    out << line << '\n';
  }
  {
    std::ofstream g(dir.path / "grades.csv", std::ios::binary);
    g << out.str();
  }
  const auto result = pipeline::compute_scores(cfg);
  CHECK(result.series.users.size() == 14);
  for (const auto& user : result.series.users) CHECK(user != zeroed);
  CHECK(result.excluded_users == std::vector<std::string>{zeroed});
}
