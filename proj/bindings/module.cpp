#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <sstream>

#include "engage/chapter_metric.hpp"
#include "engage/cohort_sim.hpp"
#include "engage/coursewide_metric.hpp"
#include "engage/csv.hpp"
#include "engage/errors.hpp"
#include "engage/evaluation.hpp"
#include "engage/ingest.hpp"
#include "engage/pipeline.hpp"
#include "engage/run_config.hpp"
#include "engage/sessionizer.hpp"
#include "engage/timeutil.hpp"
#include "engage/types.hpp"

namespace py = pybind11;
using namespace engage;

namespace {

std::vector<const sessionizer::Session*> session_ptrs(
    const std::vector<sessionizer::Session>& sessions) {
  std::vector<const sessionizer::Session*> out;
  out.reserve(sessions.size());
  for (const auto& s : sessions) out.push_back(&s);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Chapter-aligned VLE engagement metrics from activity logs";
  m.attr("__version__") = "0.1.0";

  py::register_exception<InputError>(m, "InputError");
  py::register_exception<ConfigError>(m, "ConfigError");

  // --- domain types ---------------------------------------------------
  py::class_<LogEvent>(m, "LogEvent")
      .def(py::init<>())
      .def_readwrite("time", &LogEvent::time)
      .def_readwrite("user", &LogEvent::user)
      .def_readwrite("event_context", &LogEvent::event_context)
      .def_readwrite("component", &LogEvent::component)
      .def_readwrite("event_name", &LogEvent::event_name)
      .def_readwrite("description", &LogEvent::description);

  py::enum_<LabelKind>(m, "LabelKind")
      .value("CHAPTER", LabelKind::Chapter)
      .value("GENERAL", LabelKind::General)
      .value("EXCLUDED", LabelKind::Excluded);

  py::class_<ChapterLabel>(m, "ChapterLabel")
      .def_static("chapter", &ChapterLabel::chapter)
      .def_static("general", &ChapterLabel::general)
      .def_static("excluded", &ChapterLabel::excluded)
      .def_readonly("kind", &ChapterLabel::kind)
      .def_readonly("number", &ChapterLabel::number)
      .def("is_chapter", &ChapterLabel::is_chapter);

  py::class_<CourseCalendar>(m, "CourseCalendar")
      .def(py::init<>())
      .def_readwrite("term_start_day", &CourseCalendar::term_start_day)
      .def_readwrite("num_weeks", &CourseCalendar::num_weeks)
      .def_readwrite("week_length_days", &CourseCalendar::week_length_days)
      .def_readwrite("measurement_anchor_minute", &CourseCalendar::measurement_anchor_minute)
      .def("measurement_cutoff", &CourseCalendar::measurement_cutoff);

  py::class_<ChapterRules>(m, "ChapterRules")
      .def(py::init<>())
      .def_readwrite("numeric_pattern", &ChapterRules::numeric_pattern)
      .def_readwrite("overrides", &ChapterRules::overrides)
      .def_readwrite("general_markers", &ChapterRules::general_markers);

  py::class_<LabeledEvent>(m, "LabeledEvent")
      .def_readonly("event", &LabeledEvent::event)
      .def_readonly("week", &LabeledEvent::week)
      .def_readonly("day_offset", &LabeledEvent::day_offset)
      .def_readonly("chapter", &LabeledEvent::chapter);

  py::class_<GradeRecord>(m, "GradeRecord")
      .def(py::init<>())
      .def_readwrite("user", &GradeRecord::user)
      .def_readwrite("final_grade", &GradeRecord::final_grade)
      .def_readwrite("exam_grade", &GradeRecord::exam_grade)
      .def_readwrite("excluded", &GradeRecord::excluded);

  py::enum_<EventField>(m, "EventField")
      .value("EVENT_CONTEXT", EventField::EventContext)
      .value("COMPONENT", EventField::Component)
      .value("EVENT_NAME", EventField::EventName)
      .value("DESCRIPTION", EventField::Description);

  // --- ingest ----------------------------------------------------------
  m.def("parse_date", &timeutil::parse_date, "YYYY-MM-DD to days since epoch");
  m.def(
      "parse_log_text",
      [](const std::string& text) {
        std::istringstream in(text);
        return ingest::parse_log(in);
      },
      py::arg("text"), "Parse a CSV activity log from a string");
  m.def(
      "parse_log_file",
      [](const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open " + path.string());
        return ingest::parse_log(in);
      },
      py::arg("path"));
  m.def("label_events", &ingest::label_events, py::arg("events"), py::arg("calendar"),
        py::arg("rules"), py::arg("chapter_text") = EventField::EventContext);
  m.def("apply_rules", &ingest::apply_rules);
  m.def(
      "apply_exclusions",
      [](const std::vector<GradeRecord>& grades) {
        auto r = ingest::apply_exclusions(grades);
        return py::make_tuple(r.retained,
                              std::vector<std::string>(r.excluded_users.begin(),
                                                       r.excluded_users.end()));
      },
      py::arg("grades"), "Returns (retained_records, excluded_users)");

  // --- sessionizer -----------------------------------------------------
  py::class_<sessionizer::GapThreshold>(m, "GapThreshold")
      .def_readonly("minutes", &sessionizer::GapThreshold::minutes)
      .def_property_readonly("source", [](const sessionizer::GapThreshold& t) {
        return t.source == sessionizer::GapThreshold::Source::Configured ? "configured"
                                                                         : "computed";
      });

  py::class_<sessionizer::Session>(m, "Session")
      .def_readonly("user", &sessionizer::Session::user)
      .def_readonly("events", &sessionizer::Session::events)
      .def_readonly("start_day_offset", &sessionizer::Session::start_day_offset)
      .def_readonly("week", &sessionizer::Session::week)
      .def_readonly("chapter", &sessionizer::Session::chapter)
      .def("general_only", &sessionizer::Session::general_only);

  m.def("configured_threshold", &sessionizer::configured_threshold, py::arg("minutes"));
  m.def("compute_gap_threshold", &sessionizer::compute_gap_threshold, py::arg("events"));
  m.def("split_by_inactivity", &sessionizer::split_by_inactivity, py::arg("user_events"),
        py::arg("threshold"));
  m.def("attribute_chapter_sessions", &sessionizer::attribute_chapter_sessions,
        py::arg("user"), py::arg("raw_sessions"));
  m.def("sessionize", &sessionizer::sessionize, py::arg("events"), py::arg("threshold"));

  // --- chapter metric --------------------------------------------------
  py::class_<chapter_metric::RawIndicators>(m, "RawIndicators")
      .def_readonly("frequency", &chapter_metric::RawIndicators::frequency)
      .def_readonly("immediacy", &chapter_metric::RawIndicators::immediacy)
      .def_readonly("diversity", &chapter_metric::RawIndicators::diversity)
      .def("engaged", &chapter_metric::RawIndicators::engaged);

  py::class_<chapter_metric::ChapterRelease>(m, "ChapterRelease")
      .def_readonly("chapter", &chapter_metric::ChapterRelease::chapter)
      .def_readonly("release_day", &chapter_metric::ChapterRelease::release_day)
      .def_readonly("observed_from_week", &chapter_metric::ChapterRelease::observed_from_week);

  py::class_<chapter_metric::MetricOptions>(m, "MetricOptions")
      .def(py::init<>())
      .def_readwrite("activity_columns", &chapter_metric::MetricOptions::activity_columns)
      .def_readwrite("chapter_weights", &chapter_metric::MetricOptions::chapter_weights);

  py::class_<chapter_metric::WeeklySeries>(m, "WeeklySeries")
      .def_readonly("users", &chapter_metric::WeeklySeries::users)
      .def_readonly("releases", &chapter_metric::WeeklySeries::releases)
      .def_readonly("weights", &chapter_metric::WeeklySeries::weights)
      .def_readonly("num_weeks", &chapter_metric::WeeklySeries::num_weeks)
      .def_readonly("scores", &chapter_metric::WeeklySeries::scores)
      .def_readonly("idf", &chapter_metric::WeeklySeries::idf)
      .def("chapters_released_by", &chapter_metric::WeeklySeries::chapters_released_by)
      .def("score_upper_bound", &chapter_metric::WeeklySeries::score_upper_bound);

  m.def(
      "raw_indicators",
      [](const std::vector<sessionizer::Session>& sessions, std::int64_t release_day,
         const std::vector<EventField>& columns) {
        return chapter_metric::raw_indicators(session_ptrs(sessions), release_day, columns);
      },
      py::arg("sessions"), py::arg("release_day"),
      py::arg("activity_columns") = std::vector<EventField>{EventField::EventContext});
  m.def(
      "minmax_scale",
      [](const std::vector<double>& v) { return chapter_metric::minmax_scale(v); },
      py::arg("values"));
  m.def("chapter_score", &chapter_metric::chapter_score, py::arg("frequency"),
        py::arg("immediacy"), py::arg("diversity"));
  m.def(
      "engagement_score",
      [](const std::vector<double>& idf, const std::vector<double>& weights) {
        return chapter_metric::engagement_score(idf, weights);
      },
      py::arg("idf"), py::arg("weights"));
  m.def("weekly_series", &chapter_metric::weekly_series, py::arg("sessions"),
        py::arg("cohort_users"), py::arg("calendar"),
        py::arg("options") = chapter_metric::MetricOptions{}, py::arg("up_to_week") = 0);

  // --- course-wide metric ----------------------------------------------
  py::enum_<coursewide::Indicator>(m, "Indicator")
      .value("IMMEDIACY", coursewide::Indicator::Immediacy)
      .value("FREQUENCY", coursewide::Indicator::Frequency)
      .value("DIVERSITY", coursewide::Indicator::Diversity)
      .value("RECENCY", coursewide::Indicator::Recency)
      .value("INTERVAL", coursewide::Indicator::Interval);

  py::class_<coursewide::RawIndicators>(m, "CoursewideRaw")
      .def_readonly("sessions", &coursewide::RawIndicators::sessions)
      .def_readonly("diversity", &coursewide::RawIndicators::diversity)
      .def_readonly("first_day", &coursewide::RawIndicators::first_day)
      .def_readonly("last_day", &coursewide::RawIndicators::last_day)
      .def("engaged", &coursewide::RawIndicators::engaged)
      .def("immediacy", &coursewide::RawIndicators::immediacy)
      .def("recency", &coursewide::RawIndicators::recency)
      .def("interval", &coursewide::RawIndicators::interval);

  py::class_<coursewide::Row>(m, "CoursewideRow")
      .def_readonly("user", &coursewide::Row::user)
      .def_readonly("raw", &coursewide::Row::raw)
      .def_readonly("scaled", &coursewide::Row::scaled)
      .def_readonly("score", &coursewide::Row::score);

  py::class_<coursewide::Options>(m, "CoursewideOptions")
      .def(py::init<>())
      .def_readwrite("activity_columns", &coursewide::Options::activity_columns)
      .def_readwrite("weights", &coursewide::Options::weights);

  m.def(
      "coursewide_indicators",
      [](const std::vector<sessionizer::Session>& sessions,
         const std::vector<EventField>& columns) {
        return coursewide::coursewide_indicators(session_ptrs(sessions), columns);
      },
      py::arg("sessions"),
      py::arg("activity_columns") = std::vector<EventField>{EventField::EventContext});
  m.def("coursewide_score", &coursewide::coursewide_score, py::arg("scaled"),
        py::arg("weights"));
  m.def(
      "coursewide_variant",
      [](const std::array<double, coursewide::kNumIndicators>& scaled,
         const std::vector<coursewide::Indicator>& subset,
         const std::array<double, coursewide::kNumIndicators>& weights) {
        return coursewide::coursewide_variant(scaled, subset, weights);
      },
      py::arg("scaled"), py::arg("subset"),
      py::arg("weights") = std::array<double, coursewide::kNumIndicators>{1, 1, 1, 1, 1});
  m.def("coursewide_table", &coursewide::coursewide_table, py::arg("sessions"),
        py::arg("cohort_users"), py::arg("options") = coursewide::Options{});

  // --- evaluation --------------------------------------------------------
  py::enum_<evaluation::Quintile>(m, "Quintile")
      .value("VERY_LOW", evaluation::Quintile::VeryLow)
      .value("LOW", evaluation::Quintile::Low)
      .value("MODERATE", evaluation::Quintile::Moderate)
      .value("HIGH", evaluation::Quintile::High)
      .value("VERY_HIGH", evaluation::Quintile::VeryHigh);

  py::class_<evaluation::QuintileAssignment>(m, "QuintileAssignment")
      .def_readonly("week", &evaluation::QuintileAssignment::week)
      .def_readonly("members", &evaluation::QuintileAssignment::members)
      .def_readonly("sizes", &evaluation::QuintileAssignment::sizes)
      .def_readonly("group_of", &evaluation::QuintileAssignment::group_of);

  py::class_<evaluation::BoxSummary>(m, "BoxSummary")
      .def_readonly("n", &evaluation::BoxSummary::n)
      .def_readonly("median", &evaluation::BoxSummary::median)
      .def_readonly("q1", &evaluation::BoxSummary::q1)
      .def_readonly("q3", &evaluation::BoxSummary::q3)
      .def_readonly("whisker_low", &evaluation::BoxSummary::whisker_low)
      .def_readonly("whisker_high", &evaluation::BoxSummary::whisker_high)
      .def_readonly("below_50", &evaluation::BoxSummary::below_50)
      .def_readonly("below_40", &evaluation::BoxSummary::below_40);

  py::class_<evaluation::ConfusionCounts>(m, "ConfusionCounts")
      .def_readonly("flagged", &evaluation::ConfusionCounts::flagged)
      .def_readonly("true_positive", &evaluation::ConfusionCounts::true_positive)
      .def_readonly("false_positive", &evaluation::ConfusionCounts::false_positive)
      .def_readonly("false_negative", &evaluation::ConfusionCounts::false_negative)
      .def_readonly("positives_total", &evaluation::ConfusionCounts::positives_total)
      .def_readonly("threshold", &evaluation::ConfusionCounts::threshold);

  py::class_<evaluation::RecallPrecision>(m, "RecallPrecision")
      .def_readonly("counts", &evaluation::RecallPrecision::counts)
      .def_readonly("recall", &evaluation::RecallPrecision::recall)
      .def_readonly("precision", &evaluation::RecallPrecision::precision);

  py::class_<evaluation::WeekClassification>(m, "WeekClassification")
      .def_readonly("auc", &evaluation::WeekClassification::auc)
      .def_readonly("rp", &evaluation::WeekClassification::rp);

  py::class_<evaluation::WeekEvaluation>(m, "WeekEvaluation")
      .def_readonly("week", &evaluation::WeekEvaluation::week)
      .def_readonly("alignment_rho", &evaluation::WeekEvaluation::alignment_rho)
      .def_readonly("grade_rho", &evaluation::WeekEvaluation::grade_rho)
      .def_readonly("quintiles", &evaluation::WeekEvaluation::quintiles)
      .def_readonly("at_50", &evaluation::WeekEvaluation::at_50)
      .def_readonly("at_40", &evaluation::WeekEvaluation::at_40);

  py::class_<evaluation::EvaluationReport>(m, "EvaluationReport")
      .def_readonly("cohort_size", &evaluation::EvaluationReport::cohort_size)
      .def_readonly("coursewide_grade_rho",
                    &evaluation::EvaluationReport::coursewide_grade_rho)
      .def_readonly("weeks", &evaluation::EvaluationReport::weeks);

  py::class_<evaluation::EvaluationInput>(m, "EvaluationInput")
      .def(py::init<>())
      .def_readwrite("users", &evaluation::EvaluationInput::users)
      .def_readwrite("weekly_scores", &evaluation::EvaluationInput::weekly_scores)
      .def_readwrite("coursewide_scores", &evaluation::EvaluationInput::coursewide_scores)
      .def_readwrite("grades", &evaluation::EvaluationInput::grades);

  m.def(
      "average_ranks",
      [](const std::vector<double>& v) { return evaluation::average_ranks(v); },
      py::arg("values"));
  m.def(
      "spearman_rho",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return evaluation::spearman_rho(x, y);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "assign_quintiles",
      [](const std::vector<double>& scores, const std::vector<std::string>& users,
         int week) { return evaluation::assign_quintiles(scores, users, week); },
      py::arg("scores"), py::arg("users"), py::arg("week") = 0);
  m.def(
      "quintile_grade_summary",
      [](const evaluation::QuintileAssignment& a, const std::vector<double>& grades) {
        return evaluation::quintile_grade_summary(a, grades);
      },
      py::arg("assignment"), py::arg("grades"));
  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<bool>& positive) {
        std::vector<std::uint8_t> flags(positive.begin(), positive.end());
        return evaluation::roc_auc(scores, flags);
      },
      py::arg("scores"), py::arg("positive"));
  m.def(
      "recall_precision",
      [](const evaluation::QuintileAssignment& a, const std::vector<double>& grades,
         double threshold) { return evaluation::recall_precision(a, grades, threshold); },
      py::arg("assignment"), py::arg("grades"), py::arg("threshold"));
  py::class_<evaluation::GradeCorrelationSeries>(m, "GradeCorrelationSeries")
      .def_readonly("weekly", &evaluation::GradeCorrelationSeries::weekly)
      .def_readonly("coursewide", &evaluation::GradeCorrelationSeries::coursewide);

  m.def(
      "alignment_series",
      [](const std::vector<std::vector<double>>& weekly, const std::vector<double>& y) {
        return evaluation::alignment_series(weekly, y);
      },
      py::arg("weekly_scores"), py::arg("coursewide_scores"));
  m.def(
      "grade_correlation_series",
      [](const std::vector<std::vector<double>>& weekly, const std::vector<double>& grades,
         const std::vector<double>& y) {
        return evaluation::grade_correlation_series(weekly, grades, y);
      },
      py::arg("weekly_scores"), py::arg("grades"), py::arg("coursewide_scores"));
  m.def("evaluate", &evaluation::evaluate, py::arg("input"));

  // --- simulation --------------------------------------------------------
  py::class_<sim::ArchetypeConfig>(m, "ArchetypeConfig")
      .def(py::init<>())
      .def_readwrite("name", &sim::ArchetypeConfig::name)
      .def_readwrite("mix_weight", &sim::ArchetypeConfig::mix_weight)
      .def_readwrite("session_rate_mean", &sim::ArchetypeConfig::session_rate_mean)
      .def_readwrite("session_rate_dispersion", &sim::ArchetypeConfig::session_rate_dispersion)
      .def_readwrite("first_access_delay_mean_days",
                     &sim::ArchetypeConfig::first_access_delay_mean_days)
      .def_readwrite("activity_breadth_mean", &sim::ArchetypeConfig::activity_breadth_mean)
      .def_readwrite("dropout_week", &sim::ArchetypeConfig::dropout_week);

  py::class_<sim::GradeModel>(m, "GradeModel")
      .def(py::init<>())
      .def_readwrite("base_grade", &sim::GradeModel::base_grade)
      .def_readwrite("engagement_coefficient", &sim::GradeModel::engagement_coefficient)
      .def_readwrite("noise_scale", &sim::GradeModel::noise_scale);

  py::class_<sim::SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("students", &sim::SimConfig::students)
      .def_readwrite("chapters", &sim::SimConfig::chapters)
      .def_readwrite("seed", &sim::SimConfig::seed)
      .def_readwrite("archetypes", &sim::SimConfig::archetypes)
      .def_readwrite("grade_model", &sim::SimConfig::grade_model)
      .def_readwrite("general_session_rate", &sim::SimConfig::general_session_rate)
      .def_readwrite("general_click_prob", &sim::SimConfig::general_click_prob)
      .def_readwrite("revision_decay", &sim::SimConfig::revision_decay)
      .def_readwrite("chapter_release_weeks", &sim::SimConfig::chapter_release_weeks);

  py::class_<sim::StudentInfo>(m, "StudentInfo")
      .def_readonly("user", &sim::StudentInfo::user)
      .def_readonly("archetype", &sim::StudentInfo::archetype)
      .def_readonly("latent", &sim::StudentInfo::latent);

  py::class_<sim::SimResult>(m, "SimResult")
      .def_readonly("events", &sim::SimResult::events)
      .def_readonly("grades", &sim::SimResult::grades)
      .def_readonly("students", &sim::SimResult::students);

  m.def("default_archetypes", &default_archetypes);
  m.def("generate_cohort", &sim::generate_cohort, py::arg("calendar"), py::arg("config"));

  // --- pipeline ------------------------------------------------------------
  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("log_path", &RunConfig::log_path)
      .def_readwrite("grades_path", &RunConfig::grades_path)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("scores_path", &RunConfig::scores_path)
      .def_readwrite("coursewide_path", &RunConfig::coursewide_path)
      .def_readwrite("calendar", &RunConfig::calendar)
      .def_readwrite("rules", &RunConfig::rules)
      .def_readwrite("threshold_minutes", &RunConfig::threshold_minutes)
      .def_readwrite("chapter_weights", &RunConfig::chapter_weights)
      .def_readwrite("as_of_week", &RunConfig::as_of_week)
      .def_readwrite("write_idf_columns", &RunConfig::write_idf_columns)
      .def_readwrite("write_sessions", &RunConfig::write_sessions)
      .def_readwrite("simulate", &RunConfig::simulate);

  m.def("parse_run_config", &parse_run_config, py::arg("json_text"));
  m.def("load_run_config", &load_run_config, py::arg("path"));
  m.def("run_simulate", &pipeline::run_simulate, py::arg("config"));
  m.def("run_score", &pipeline::run_score, py::arg("config"));
  m.def("run_score_coursewide", &pipeline::run_score_coursewide, py::arg("config"));
  m.def("run_evaluate", &pipeline::run_evaluate, py::arg("config"));
  m.def("run_report", &pipeline::run_report, py::arg("config"));
}
