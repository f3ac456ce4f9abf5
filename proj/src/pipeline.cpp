#include "engage/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "engage/cohort_sim.hpp"
#include "engage/csv.hpp"
#include "engage/errors.hpp"
#include "engage/ingest.hpp"

namespace engage::pipeline {

using nlohmann::ordered_json;

namespace {

std::ifstream open_input(const std::filesystem::path& path, const std::string& what) {
  if (path.empty()) throw InputError("no " + what + " path given");
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + what + " file " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path().empty() ? "."
                                                                 : path.parent_path());
  std::ofstream out(path, std::ios::binary);  // '\n' endings on every platform
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

struct LoadedCohort {
  std::vector<LabeledEvent> events;   // exclusions applied
  std::vector<std::string> cohort;    // retained users (grades roster + log users)
  std::vector<std::string> excluded;
  std::map<std::string, double> grades;  // retained only
  std::size_t events_parsed = 0;
};

LoadedCohort load_cohort(const RunConfig& config) {
  LoadedCohort out;
  auto log_in = open_input(config.log_path, "log");
  auto events = ingest::parse_log(log_in, config.log_format);
  out.events_parsed = events.size();
  auto labeled = ingest::label_events(events, config.calendar, config.rules,
                                      config.chapter_text_column);

  std::set<std::string> cohort;
  if (!config.grades_path.empty()) {
    auto grades_in = open_input(config.grades_path, "grades");
    auto grades = ingest::read_grades(grades_in, config.log_format.delimiter);
    auto excl = ingest::apply_exclusions(grades);
    for (const GradeRecord& g : excl.retained) {
      cohort.insert(g.user);
      out.grades.emplace(g.user, g.final_grade);
    }
    out.excluded.assign(excl.excluded_users.begin(), excl.excluded_users.end());
    std::erase_if(labeled, [&](const LabeledEvent& le) {
      return excl.excluded_users.count(le.event.user) > 0;
    });
  }
  for (const LabeledEvent& le : labeled) cohort.insert(le.event.user);
  out.cohort.assign(cohort.begin(), cohort.end());
  out.events = std::move(labeled);
  return out;
}

sessionizer::GapThreshold resolve_threshold(const RunConfig& config,
                                            const std::vector<LabeledEvent>& events) {
  if (config.threshold_minutes) {
    return sessionizer::configured_threshold(*config.threshold_minutes);
  }
  return sessionizer::compute_gap_threshold(events);
}

void truncate_to_week(std::vector<LabeledEvent>& events, const CourseCalendar& cal,
                      int week) {
  const Minutes cutoff = cal.measurement_cutoff(week);
  std::erase_if(events, [&](const LabeledEvent& le) { return le.event.time > cutoff; });
}

void write_sessions_csv(const std::filesystem::path& path,
                        const std::vector<sessionizer::Session>& sessions) {
  auto out = open_output(path);
  csv::write_row(out, std::vector<std::string>{"user", "session_index", "chapter", "week",
                                               "start_day_offset", "n_events"});
  std::string prev_user;
  long index = 0;
  for (const sessionizer::Session& s : sessions) {
    if (s.user != prev_user) {
      prev_user = s.user;
      index = 0;
    }
    ++index;
    csv::write_row(out, std::vector<std::string>{
                            s.user, std::to_string(index),
                            s.chapter ? std::to_string(*s.chapter) : "general",
                            std::to_string(s.week), std::to_string(s.start_day_offset),
                            std::to_string(s.events.size())});
  }
}

ordered_json threshold_json(const sessionizer::GapThreshold& threshold) {
  return {{"minutes", threshold.minutes},
          {"source", threshold.source == sessionizer::GapThreshold::Source::Configured
                         ? "configured"
                         : "computed"}};
}

}  // namespace

ScoreResult compute_scores(const RunConfig& config) {
  ScoreResult result;
  result.as_of_week = config.as_of_week.value_or(config.calendar.num_weeks);

  LoadedCohort cohort = load_cohort(config);
  result.events_parsed = cohort.events_parsed;
  truncate_to_week(cohort.events, config.calendar, result.as_of_week);
  result.events_labeled = cohort.events.size();
  result.excluded_users = std::move(cohort.excluded);

  result.threshold = resolve_threshold(config, cohort.events);
  result.sessions = sessionizer::sessionize(cohort.events, result.threshold);

  chapter_metric::MetricOptions options;
  options.activity_columns = config.activity_columns;
  options.chapter_weights = config.chapter_weights;
  result.series = chapter_metric::weekly_series(result.sessions, cohort.cohort,
                                                config.calendar, options,
                                                result.as_of_week);
  return result;
}

CoursewideResult compute_coursewide(const RunConfig& config) {
  CoursewideResult result;
  LoadedCohort cohort = load_cohort(config);

  result.threshold = resolve_threshold(config, cohort.events);
  auto sessions = sessionizer::sessionize(cohort.events, result.threshold);

  coursewide::Options options;
  options.activity_columns = config.activity_columns;
  options.weights = config.coursewide_weights;
  result.rows = coursewide::coursewide_table(sessions, cohort.cohort, options);
  if (!config.coursewide_indicators.empty()) {
    for (coursewide::Row& row : result.rows) {
      row.score = coursewide::coursewide_variant(row.scaled, config.coursewide_indicators,
                                                 options.weights);
    }
  }
  return result;
}

void run_simulate(const RunConfig& config) {
  sim::SimResult sim = sim::generate_cohort(config.calendar, config.simulate);

  // activity log, shaped exactly like the ingest input
  {
    auto out = open_output(config.out_dir / "log.csv");
    const LogColumns& c = config.log_format.columns;
    csv::write_row(out,
                   std::vector<std::string>{c.time, c.user, c.event_context, c.component,
                                            c.event_name, c.description},
                   config.log_format.delimiter);
    for (const LogEvent& ev : sim.events) {
      csv::write_row(
          out,
          std::vector<std::string>{
              timeutil::format_timestamp(ev.time, config.log_format.timestamp_format),
              ev.user, ev.event_context, ev.component, ev.event_name, ev.description},
          config.log_format.delimiter);
    }
  }
  {
    auto out = open_output(config.out_dir / "grades.csv");
    csv::write_row(out, std::vector<std::string>{"user", "final_grade"},
                   config.log_format.delimiter);
    for (const GradeRecord& g : sim.grades) {
      csv::write_row(out,
                     std::vector<std::string>{g.user, csv::format_double(g.final_grade)},
                     config.log_format.delimiter);
    }
  }
  {
    ordered_json manifest;
    manifest["seed"] = config.simulate.seed;
    manifest["students"] = config.simulate.students;
    manifest["chapters"] = config.simulate.chapters;
    manifest["events"] = sim.events.size();
    manifest["term_start"] = timeutil::format_date(config.calendar.term_start_day);
    manifest["num_weeks"] = config.calendar.num_weeks;
    ordered_json archetypes = ordered_json::array();
    for (const sim::ArchetypeConfig& a : config.simulate.archetypes) {
      archetypes.push_back({{"name", a.name},
                            {"mix_weight", a.mix_weight},
                            {"session_rate_mean", a.session_rate_mean},
                            {"session_rate_dispersion", a.session_rate_dispersion},
                            {"first_access_delay_mean_days", a.first_access_delay_mean_days},
                            {"activity_breadth_mean", a.activity_breadth_mean},
                            {"dropout_week", a.dropout_week ? ordered_json(*a.dropout_week)
                                                            : ordered_json(nullptr)}});
    }
    manifest["archetypes"] = std::move(archetypes);
    manifest["grade_model"] = {
        {"base_grade", config.simulate.grade_model.base_grade},
        {"engagement_coefficient", config.simulate.grade_model.engagement_coefficient},
        {"noise_scale", config.simulate.grade_model.noise_scale}};
    ordered_json students = ordered_json::array();
    for (const sim::StudentInfo& s : sim.students) {
      students.push_back(
          {{"user", s.user}, {"archetype", s.archetype}, {"latent", s.latent}});
    }
    manifest["cohort"] = std::move(students);
    auto out = open_output(config.out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
}

void run_score(const RunConfig& config) {
  ScoreResult result = compute_scores(config);
  const auto& series = result.series;

  {
    auto out = open_output(config.scores_file());
    std::vector<std::string> header = {"user", "week", "y"};
    if (config.write_idf_columns) {
      for (const chapter_metric::ChapterRelease& r : series.releases) {
        header.push_back("idf_" + std::to_string(r.chapter));
      }
    }
    csv::write_row(out, header);
    std::vector<std::string> row;
    for (std::size_t u = 0; u < series.users.size(); ++u) {
      for (int t = 1; t <= series.num_weeks; ++t) {
        row.clear();
        row.push_back(series.users[u]);
        row.push_back(std::to_string(t));
        row.push_back(csv::format_double(series.scores[u][t - 1]));
        if (config.write_idf_columns) {
          for (std::size_t c = 0; c < series.releases.size(); ++c) {
            row.push_back(csv::format_double(series.idf[u][t - 1][c]));
          }
        }
        csv::write_row(out, row);
      }
    }
  }

  if (config.write_sessions) {
    write_sessions_csv(config.out_dir / "sessions.csv", result.sessions);
  }

  {
    ordered_json manifest;
    manifest["as_of_week"] = result.as_of_week;
    manifest["threshold"] = threshold_json(result.threshold);
    manifest["cohort_size"] = series.users.size();
    manifest["events_parsed"] = result.events_parsed;
    manifest["events_in_term"] = result.events_labeled;
    manifest["sessions"] = result.sessions.size();
    std::size_t general_only = 0;
    for (const auto& s : result.sessions) general_only += s.general_only() ? 1 : 0;
    manifest["general_only_sessions"] = general_only;
    ordered_json releases = ordered_json::array();
    for (std::size_t c = 0; c < series.releases.size(); ++c) {
      releases.push_back({{"chapter", series.releases[c].chapter},
                          {"release_day", series.releases[c].release_day},
                          {"observed_from_week", series.releases[c].observed_from_week},
                          {"weight", series.weights[c]}});
    }
    manifest["releases"] = std::move(releases);
    manifest["excluded_users"] = result.excluded_users;
    auto out = open_output(config.out_dir / "score_manifest.json");
    out << manifest.dump(2) << '\n';
  }
}

void run_score_coursewide(const RunConfig& config) {
  CoursewideResult result = compute_coursewide(config);
  auto out = open_output(config.coursewide_file());
  csv::write_row(out, std::vector<std::string>{
                          "user", "raw_immediacy", "raw_frequency", "raw_diversity",
                          "raw_recency", "raw_interval", "immediacy", "frequency",
                          "diversity", "recency", "interval", "score"});
  const auto opt_str = [](const std::optional<std::int64_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const coursewide::Row& row : result.rows) {
    csv::write_row(out, std::vector<std::string>{
                            row.user, opt_str(row.raw.immediacy()),
                            std::to_string(row.raw.sessions),
                            std::to_string(row.raw.diversity), opt_str(row.raw.recency()),
                            opt_str(row.raw.interval()), csv::format_double(row.scaled[0]),
                            csv::format_double(row.scaled[1]),
                            csv::format_double(row.scaled[2]),
                            csv::format_double(row.scaled[3]),
                            csv::format_double(row.scaled[4]),
                            csv::format_double(row.score)});
  }
}

ScoresFile read_scores_csv(const std::filesystem::path& path) {
  auto in = open_input(path, "scores");
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next_row(row)) throw InputError("scores file " + path.string() + " is empty");
  if (row.size() < 3 || row[0] != "user" || row[1] != "week" || row[2] != "y") {
    throw InputError("scores file " + path.string() +
                     " does not start with a user,week,y header");
  }
  std::map<std::string, std::map<int, double>> table;
  int max_week = 0;
  while (reader.next_row(row)) {
    if (row.size() < 3) {
      throw InputError("scores row at line " + std::to_string(reader.row_line()) +
                       " is too short");
    }
    const int week = static_cast<int>(csv::parse_double(row[1], "week"));
    if (week < 1) throw InputError("scores row with week " + row[1]);
    max_week = std::max(max_week, week);
    table[row[0]][week] = csv::parse_double(row[2], "y");
  }
  if (table.empty()) throw InputError("scores file " + path.string() + " has no rows");

  ScoresFile out;
  out.weekly_scores.assign(max_week, {});
  for (const auto& [user, weeks] : table) {
    out.users.push_back(user);
  }
  for (int t = 1; t <= max_week; ++t) {
    auto& column = out.weekly_scores[t - 1];
    column.reserve(out.users.size());
    for (const std::string& user : out.users) {
      const auto& weeks = table.at(user);
      auto it = weeks.find(t);
      if (it == weeks.end()) {
        throw InputError("scores file is missing week " + std::to_string(t) +
                         " for user " + user);
      }
      column.push_back(it->second);
    }
  }
  return out;
}

std::vector<std::pair<std::string, double>> read_coursewide_csv(
    const std::filesystem::path& path) {
  auto in = open_input(path, "coursewide scores");
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next_row(row)) {
    throw InputError("coursewide file " + path.string() + " is empty");
  }
  std::size_t c_user = row.size(), c_score = row.size();
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] == "user") c_user = i;
    if (row[i] == "score") c_score = i;
  }
  if (c_user >= row.size() || c_score >= row.size()) {
    throw InputError("coursewide file " + path.string() + " needs user and score columns");
  }
  std::vector<std::pair<std::string, double>> out;
  while (reader.next_row(row)) {
    if (row.size() <= std::max(c_user, c_score)) {
      throw InputError("coursewide row at line " + std::to_string(reader.row_line()) +
                       " is too short");
    }
    out.emplace_back(row[c_user], csv::parse_double(row[c_score], "score"));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void write_report_files(const RunConfig& config,
                        const evaluation::EvaluationReport& report) {
  const int num_weeks = static_cast<int>(report.weeks.size());
  const auto opt = [](const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  const auto opt_csv = [](const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
  };

  ordered_json j;
  j["cohort_size"] = report.cohort_size;
  j["weeks"] = num_weeks;
  j["coursewide_grade_rho"] = opt(report.coursewide_grade_rho);
  ordered_json weeks = ordered_json::array();
  for (const evaluation::WeekEvaluation& we : report.weeks) {
    ordered_json wj;
    wj["week"] = we.week;
    wj["alignment_rho"] = opt(we.alignment_rho);
    wj["grade_rho"] = opt(we.grade_rho);
    ordered_json quintiles = ordered_json::array();
    for (std::size_t g = 0; g < 5; ++g) {
      const evaluation::BoxSummary& box = we.quintiles[g];
      quintiles.push_back({{"quintile", evaluation::quintile_name(
                                            static_cast<evaluation::Quintile>(g))},
                           {"n", box.n},
                           {"median", box.median},
                           {"q1", box.q1},
                           {"q3", box.q3},
                           {"whisker_low", box.whisker_low},
                           {"whisker_high", box.whisker_high},
                           {"below_50", box.below_50},
                           {"below_40", box.below_40}});
    }
    wj["quintiles"] = std::move(quintiles);
    const auto classification = [&](const evaluation::WeekClassification& c) {
      return ordered_json{{"auc", opt(c.auc)},
                          {"recall", opt(c.rp.recall)},
                          {"precision", opt(c.rp.precision)},
                          {"flagged", c.rp.counts.flagged},
                          {"true_positive", c.rp.counts.true_positive},
                          {"false_positive", c.rp.counts.false_positive},
                          {"false_negative", c.rp.counts.false_negative},
                          {"positives_total", c.rp.counts.positives_total}};
    };
    wj["at_50"] = classification(we.at_50);
    wj["at_40"] = classification(we.at_40);
    weeks.push_back(std::move(wj));
  }
  j["by_week"] = std::move(weeks);
  {
    auto out = open_output(config.out_dir / "report.json");
    out << j.dump(2) << '\n';
  }

  {
    auto out = open_output(config.out_dir / "alignment_series.csv");
    csv::write_row(out, std::vector<std::string>{"week", "rho"});
    for (const auto& we : report.weeks) {
      csv::write_row(out, std::vector<std::string>{std::to_string(we.week),
                                                   opt_csv(we.alignment_rho)});
    }
  }
  {
    auto out = open_output(config.out_dir / "grade_rho_series.csv");
    csv::write_row(out, std::vector<std::string>{"week", "weekly_rho", "coursewide_rho"});
    for (const auto& we : report.weeks) {
      csv::write_row(out, std::vector<std::string>{std::to_string(we.week),
                                                   opt_csv(we.grade_rho),
                                                   opt_csv(report.coursewide_grade_rho)});
    }
  }
  {
    auto out = open_output(config.out_dir / "quintile_summary.csv");
    csv::write_row(out, std::vector<std::string>{"week", "quintile", "n", "median", "q1",
                                                 "q3", "whisker_low", "whisker_high",
                                                 "below_50", "below_40"});
    for (const auto& we : report.weeks) {
      for (std::size_t g = 0; g < 5; ++g) {
        const evaluation::BoxSummary& box = we.quintiles[g];
        csv::write_row(
            out, std::vector<std::string>{
                     std::to_string(we.week),
                     evaluation::quintile_name(static_cast<evaluation::Quintile>(g)),
                     std::to_string(box.n), csv::format_double(box.median),
                     csv::format_double(box.q1), csv::format_double(box.q3),
                     csv::format_double(box.whisker_low),
                     csv::format_double(box.whisker_high), std::to_string(box.below_50),
                     std::to_string(box.below_40)});
      }
    }
  }
  {
    auto out = open_output(config.out_dir / "classification_series.csv");
    csv::write_row(out, std::vector<std::string>{
                            "week", "threshold", "auc", "recall", "precision", "flagged",
                            "true_positive", "false_positive", "false_negative",
                            "positives_total"});
    for (const auto& we : report.weeks) {
      for (const auto* c : {&we.at_50, &we.at_40}) {
        csv::write_row(out, std::vector<std::string>{
                                std::to_string(we.week),
                                csv::format_double(c->rp.counts.threshold), opt_csv(c->auc),
                                opt_csv(c->rp.recall), opt_csv(c->rp.precision),
                                std::to_string(c->rp.counts.flagged),
                                std::to_string(c->rp.counts.true_positive),
                                std::to_string(c->rp.counts.false_positive),
                                std::to_string(c->rp.counts.false_negative),
                                std::to_string(c->rp.counts.positives_total)});
      }
    }
  }
}

}  // namespace

void run_evaluate(const RunConfig& config) {
  if (config.grades_path.empty()) {
    throw MissingGradesError("evaluate needs a grades file (--grades)");
  }
  ScoresFile scores = read_scores_csv(config.scores_file());
  auto coursewide = read_coursewide_csv(config.coursewide_file());

  auto grades_in = open_input(config.grades_path, "grades");
  auto grade_records = ingest::read_grades(grades_in, config.log_format.delimiter);
  auto excl = ingest::apply_exclusions(grade_records);
  std::map<std::string, double> grade_of;
  for (const GradeRecord& g : excl.retained) grade_of.emplace(g.user, g.final_grade);

  // the scored cohort is authoritative; both other inputs must match it
  std::map<std::string, double> coursewide_of(coursewide.begin(), coursewide.end());
  for (const std::string& user : scores.users) {
    if (!coursewide_of.count(user)) {
      throw CohortMismatchError(user, "has weekly scores but no course-wide score");
    }
    if (!grade_of.count(user)) {
      throw CohortMismatchError(user, "has scores but no (retained) grade");
    }
  }
  for (const auto& [user, y] : coursewide_of) {
    if (!std::binary_search(scores.users.begin(), scores.users.end(), user)) {
      throw CohortMismatchError(user, "has a course-wide score but no weekly scores");
    }
  }
  for (const auto& [user, g] : grade_of) {
    if (!std::binary_search(scores.users.begin(), scores.users.end(), user)) {
      throw CohortMismatchError(user, "is in the grades roster but was never scored");
    }
  }

  evaluation::EvaluationInput input;
  input.users = scores.users;
  input.weekly_scores = std::move(scores.weekly_scores);
  for (const std::string& user : input.users) {
    input.coursewide_scores.push_back(coursewide_of.at(user));
    input.grades.push_back(grade_of.at(user));
  }
  const auto report = evaluation::evaluate(input);
  write_report_files(config, report);
}

void run_report(const RunConfig& config) {
  RunConfig staged = config;
  staged.as_of_week.reset();  // the report always covers the full term
  run_score(staged);
  run_score_coursewide(staged);
  run_evaluate(staged);
}

}  // namespace engage::pipeline
