#include "engage/run_config.hpp"

#include <fstream>
#include <json.hpp>

#include "engage/errors.hpp"

namespace engage {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& key) {
  if (!j.is_object()) throw InvalidConfigError("\"" + key + "\" must be an object");
}

double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw InvalidConfigError("\"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw InvalidConfigError("\"" + key + "\" must be an integer");
  }
  return j.at(key).get<int>();
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw InvalidConfigError("\"" + key + "\" must be a string");
  return j.at(key).get<std::string>();
}

ChapterLabel parse_override_label(const json& value, const std::string& title) {
  if (value.is_number_integer()) {
    const int k = value.get<int>();
    if (k < 1) {
      throw InvalidConfigError("override for \"" + title + "\": chapter number must be >= 1");
    }
    return ChapterLabel::chapter(k);
  }
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "general") return ChapterLabel::general();
    if (s == "excluded") return ChapterLabel::excluded();
    throw InvalidConfigError("override for \"" + title +
                             "\": expected chapter number, \"general\" or \"excluded\"");
  }
  throw InvalidConfigError("override for \"" + title + "\" has an unsupported type");
}

void parse_calendar(const json& j, CourseCalendar& cal) {
  expect_object(j, "calendar");
  if (!j.contains("term_start")) {
    throw InvalidConfigError("calendar.term_start is required (YYYY-MM-DD)");
  }
  cal.term_start_day = timeutil::parse_date(j.at("term_start").get<std::string>());
  cal.num_weeks = get_int(j, "num_weeks", 11);
  cal.week_length_days = get_int(j, "week_length_days", 7);
  cal.measurement_anchor_minute = get_int(j, "measurement_anchor_minute", -1);
  if (cal.num_weeks < 1) throw InvalidConfigError("calendar.num_weeks must be >= 1");
  if (cal.week_length_days < 1) {
    throw InvalidConfigError("calendar.week_length_days must be >= 1");
  }
  if (cal.measurement_anchor_minute >= cal.week_length_days * kMinutesPerDay) {
    throw InvalidConfigError("calendar.measurement_anchor_minute is past the week end");
  }
}

void parse_log_format(const json& j, LogFormat& fmt) {
  expect_object(j, "log_format");
  const std::string delim = get_string(j, "delimiter", std::string(1, fmt.delimiter));
  if (delim.size() != 1) throw InvalidConfigError("log_format.delimiter must be one character");
  fmt.delimiter = delim[0];
  fmt.timestamp_format = get_string(j, "timestamp_format", fmt.timestamp_format);
  if (j.contains("columns")) {
    const json& c = j.at("columns");
    expect_object(c, "log_format.columns");
    fmt.columns.time = get_string(c, "time", fmt.columns.time);
    fmt.columns.user = get_string(c, "user", fmt.columns.user);
    fmt.columns.event_context = get_string(c, "event_context", fmt.columns.event_context);
    fmt.columns.component = get_string(c, "component", fmt.columns.component);
    fmt.columns.event_name = get_string(c, "event_name", fmt.columns.event_name);
    fmt.columns.description = get_string(c, "description", fmt.columns.description);
  }
}

void parse_rules(const json& j, ChapterRules& rules) {
  expect_object(j, "rules");
  rules.numeric_pattern = get_string(j, "numeric_pattern", rules.numeric_pattern);
  if (j.contains("overrides")) {
    const json& o = j.at("overrides");
    expect_object(o, "rules.overrides");
    for (auto it = o.begin(); it != o.end(); ++it) {
      rules.overrides[it.key()] = parse_override_label(it.value(), it.key());
    }
  }
  if (j.contains("general_markers")) {
    for (const json& m : j.at("general_markers")) {
      rules.general_markers.push_back(m.get<std::string>());
    }
  }
}

coursewide::Indicator indicator_from_name(const std::string& name) {
  if (name == "immediacy") return coursewide::Indicator::Immediacy;
  if (name == "frequency") return coursewide::Indicator::Frequency;
  if (name == "diversity") return coursewide::Indicator::Diversity;
  if (name == "recency") return coursewide::Indicator::Recency;
  if (name == "interval") return coursewide::Indicator::Interval;
  throw InvalidConfigError("unknown course-wide indicator \"" + name + "\"");
}

void parse_simulate(const json& j, sim::SimConfig& sim) {
  expect_object(j, "simulate");
  sim.students = get_int(j, "students", sim.students);
  sim.chapters = get_int(j, "chapters", sim.chapters);
  if (j.contains("seed")) sim.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("archetypes")) {
    sim.archetypes.clear();
    for (const json& a : j.at("archetypes")) {
      sim::ArchetypeConfig arch;
      arch.name = get_string(a, "name", "archetype");
      arch.mix_weight = get_number(a, "mix_weight", 0.0);
      arch.session_rate_mean = get_number(a, "session_rate_mean", arch.session_rate_mean);
      arch.session_rate_dispersion =
          get_number(a, "session_rate_dispersion", arch.session_rate_dispersion);
      arch.first_access_delay_mean_days =
          get_number(a, "first_access_delay_mean_days", arch.first_access_delay_mean_days);
      arch.activity_breadth_mean =
          get_number(a, "activity_breadth_mean", arch.activity_breadth_mean);
      if (a.contains("dropout_week") && !a.at("dropout_week").is_null()) {
        arch.dropout_week = a.at("dropout_week").get<int>();
      }
      sim.archetypes.push_back(std::move(arch));
    }
  }
  if (j.contains("grade_model")) {
    const json& g = j.at("grade_model");
    sim.grade_model.base_grade = get_number(g, "base_grade", sim.grade_model.base_grade);
    sim.grade_model.engagement_coefficient =
        get_number(g, "engagement_coefficient", sim.grade_model.engagement_coefficient);
    sim.grade_model.noise_scale = get_number(g, "noise_scale", sim.grade_model.noise_scale);
  }
  sim.general_session_rate = get_number(j, "general_session_rate", sim.general_session_rate);
  sim.general_click_prob = get_number(j, "general_click_prob", sim.general_click_prob);
  sim.revision_decay = get_number(j, "revision_decay", sim.revision_decay);
  if (j.contains("chapter_release_weeks") && !j.at("chapter_release_weeks").is_null()) {
    sim.chapter_release_weeks.clear();
    for (const json& w : j.at("chapter_release_weeks")) {
      sim.chapter_release_weeks.push_back(w.get<int>());
    }
  }
}

}  // namespace

std::vector<sim::ArchetypeConfig> default_archetypes() {
  std::vector<sim::ArchetypeConfig> mix(4);
  mix[0] = {"keen", 0.25, 2.4, 0.45, 0.6, 5.5, std::nullopt};
  mix[1] = {"steady", 0.35, 1.4, 0.45, 1.5, 3.5, std::nullopt};
  mix[2] = {"lagging", 0.25, 0.7, 0.45, 4.0, 2.0, std::nullopt};
  mix[3] = {"minimal", 0.15, 0.3, 0.45, 6.0, 1.2, 9};
  return mix;
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidConfigError("config root must be a JSON object");

  RunConfig cfg;
  if (j.contains("calendar")) {
    parse_calendar(j.at("calendar"), cfg.calendar);
  } else {
    throw InvalidConfigError("config needs a \"calendar\" section with term_start");
  }
  if (j.contains("log_format")) parse_log_format(j.at("log_format"), cfg.log_format);
  if (j.contains("rules")) parse_rules(j.at("rules"), cfg.rules);

  cfg.chapter_text_column =
      event_field_from_name(get_string(j, "chapter_text_column", "event_context"));
  if (j.contains("activity_columns")) {
    cfg.activity_columns.clear();
    for (const json& c : j.at("activity_columns")) {
      cfg.activity_columns.push_back(event_field_from_name(c.get<std::string>()));
    }
    if (cfg.activity_columns.empty()) {
      throw InvalidConfigError("activity_columns must not be empty");
    }
  }

  if (j.contains("threshold_minutes") && !j.at("threshold_minutes").is_null()) {
    cfg.threshold_minutes = j.at("threshold_minutes").get<double>();
    if (!(*cfg.threshold_minutes > 0) || *cfg.threshold_minutes > 120) {
      throw InvalidConfigError("threshold_minutes must be in (0, 120]");
    }
  }
  if (j.contains("chapter_weights")) {
    for (const json& w : j.at("chapter_weights")) {
      const double v = w.get<double>();
      if (v < 0) throw InvalidConfigError("chapter_weights must be non-negative");
      cfg.chapter_weights.push_back(v);
    }
  }
  if (j.contains("coursewide_weights")) {
    const json& w = j.at("coursewide_weights");
    expect_object(w, "coursewide_weights");
    cfg.coursewide_weights[0] = get_number(w, "immediacy", 1);
    cfg.coursewide_weights[1] = get_number(w, "frequency", 1);
    cfg.coursewide_weights[2] = get_number(w, "diversity", 1);
    cfg.coursewide_weights[3] = get_number(w, "recency", 1);
    cfg.coursewide_weights[4] = get_number(w, "interval", 1);
  }
  if (j.contains("coursewide_indicators")) {
    for (const json& name : j.at("coursewide_indicators")) {
      cfg.coursewide_indicators.push_back(indicator_from_name(name.get<std::string>()));
    }
  }
  if (j.contains("as_of_week") && !j.at("as_of_week").is_null()) {
    cfg.as_of_week = j.at("as_of_week").get<int>();
  }
  cfg.write_idf_columns = j.value("write_idf_columns", cfg.write_idf_columns);
  cfg.write_sessions = j.value("write_sessions", cfg.write_sessions);

  if (j.contains("paths")) {
    const json& p = j.at("paths");
    expect_object(p, "paths");
    cfg.log_path = get_string(p, "log", "");
    cfg.grades_path = get_string(p, "grades", "");
    cfg.out_dir = get_string(p, "out_dir", ".");
    cfg.scores_path = get_string(p, "scores", "");
    cfg.coursewide_path = get_string(p, "coursewide", "");
  }

  if (j.contains("simulate")) parse_simulate(j.at("simulate"), cfg.simulate);
  if (cfg.simulate.archetypes.empty()) cfg.simulate.archetypes = default_archetypes();

  if (cfg.as_of_week && (*cfg.as_of_week < 1 || *cfg.as_of_week > cfg.calendar.num_weeks)) {
    throw InvalidConfigError("as_of_week " + std::to_string(*cfg.as_of_week) +
                             " outside [1, " + std::to_string(cfg.calendar.num_weeks) + "]");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfigError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

}  // namespace engage
