#include "engage/ingest.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <regex>

#include "engage/csv.hpp"
#include "engage/errors.hpp"

namespace engage::ingest {

namespace {

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw MissingColumnError(name);
}

std::regex compile_pattern(const std::string& pattern) {
  std::regex re;
  try {
    re.assign(pattern, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw ConfigError("bad chapter pattern \"" + pattern + "\": " + e.what());
  }
  if (re.mark_count() < 1) {
    throw ConfigError("chapter pattern \"" + pattern +
                      "\" needs a capture group for the chapter number");
  }
  return re;
}

}  // namespace

std::vector<LogEvent> parse_log(std::istream& in, const LogFormat& format) {
  csv::Reader reader(in, format.delimiter);
  std::vector<std::string> row;
  if (!reader.next_row(row)) {
    throw InputError("log stream is empty (no header row)");
  }
  const std::size_t c_time = column_index(row, format.columns.time);
  const std::size_t c_user = column_index(row, format.columns.user);
  const std::size_t c_context = column_index(row, format.columns.event_context);
  const std::size_t c_component = column_index(row, format.columns.component);
  const std::size_t c_name = column_index(row, format.columns.event_name);
  const std::size_t c_desc = column_index(row, format.columns.description);
  const std::size_t needed =
      std::max({c_time, c_user, c_context, c_component, c_name, c_desc}) + 1;

  std::vector<LogEvent> events;
  while (reader.next_row(row)) {
    if (row.size() < needed) {
      throw InputError("row at line " + std::to_string(reader.row_line()) + " has " +
                       std::to_string(row.size()) + " fields, expected at least " +
                       std::to_string(needed));
    }
    LogEvent ev;
    if (!timeutil::try_parse_timestamp(row[c_time], format.timestamp_format, ev.time)) {
      throw BadTimestampError(reader.row_line(), row[c_time]);
    }
    ev.user = row[c_user];
    if (ev.user.empty()) throw EmptyUserError(reader.row_line());
    ev.event_context = row[c_context];
    ev.component = row[c_component];
    ev.event_name = row[c_name];
    ev.description = row[c_desc];
    events.push_back(std::move(ev));
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const LogEvent& a, const LogEvent& b) { return a.time < b.time; });
  return events;
}

ChapterLabel apply_rules(const std::string& chapter_text, const std::string& component,
                         const ChapterRules& rules) {
  if (auto it = rules.overrides.find(chapter_text); it != rules.overrides.end()) {
    return it->second;
  }
  for (const auto& marker : rules.general_markers) {
    if (component == marker) return ChapterLabel::general();
  }
  const std::regex re = compile_pattern(rules.numeric_pattern);
  std::smatch m;
  if (std::regex_search(chapter_text, m, re) && m.size() > 1 && m[1].matched) {
    try {
      const int k = std::stoi(m[1].str());
      if (k > 0) return ChapterLabel::chapter(k);
    } catch (const std::exception&) {
      // number too large for a chapter; fall through to General
    }
  }
  return ChapterLabel::general();
}

std::vector<LabeledEvent> label_events(const std::vector<LogEvent>& events,
                                       const CourseCalendar& calendar,
                                       const ChapterRules& rules,
                                       EventField chapter_text) {
  const std::regex re = compile_pattern(rules.numeric_pattern);
  const Minutes start = calendar.term_start_minutes();
  const std::int64_t term_days = calendar.term_length_days();

  std::vector<LabeledEvent> out;
  out.reserve(events.size());
  for (const LogEvent& ev : events) {
    if (ev.time < start) continue;
    const std::int64_t day = (ev.time - start) / kMinutesPerDay;
    if (day >= term_days) continue;

    ChapterLabel label;
    const std::string& text = field_value(ev, chapter_text);
    if (auto it = rules.overrides.find(text); it != rules.overrides.end()) {
      label = it->second;
    } else {
      bool general_marker = false;
      for (const auto& marker : rules.general_markers) {
        if (ev.component == marker) {
          general_marker = true;
          break;
        }
      }
      if (general_marker) {
        label = ChapterLabel::general();
      } else {
        std::smatch m;
        label = ChapterLabel::general();
        if (std::regex_search(text, m, re) && m.size() > 1 && m[1].matched) {
          try {
            const int k = std::stoi(m[1].str());
            if (k > 0) label = ChapterLabel::chapter(k);
          } catch (const std::exception&) {
          }
        }
      }
    }
    if (label.kind == LabelKind::Excluded) continue;

    LabeledEvent le;
    le.event = ev;
    le.day_offset = day;
    le.week = calendar.week_of_day_offset(day);
    le.chapter = label;
    out.push_back(std::move(le));
  }
  return out;
}

std::vector<GradeRecord> read_grades(std::istream& in, char delimiter) {
  csv::Reader reader(in, delimiter);
  std::vector<std::string> row;
  if (!reader.next_row(row)) {
    throw MissingGradesError("grades stream is empty (no header row)");
  }
  const std::size_t c_user = column_index(row, "user");
  const std::size_t c_grade = column_index(row, "final_grade");
  std::size_t c_exam = row.size();  // sentinel: absent
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] == "exam_grade") c_exam = i;
  }

  std::vector<GradeRecord> grades;
  while (reader.next_row(row)) {
    const std::size_t needed = std::max(c_user, c_grade) + 1;
    if (row.size() < needed) {
      throw InputError("grades row at line " + std::to_string(reader.row_line()) +
                       " has " + std::to_string(row.size()) + " fields");
    }
    GradeRecord g;
    g.user = row[c_user];
    if (g.user.empty()) throw EmptyUserError(reader.row_line());
    g.final_grade = csv::parse_double(row[c_grade], "final_grade");
    if (g.final_grade < 0 || g.final_grade > 100) {
      throw InputError("grades row at line " + std::to_string(reader.row_line()) +
                       ": final_grade " + row[c_grade] + " outside [0,100]");
    }
    if (c_exam < row.size() && !row[c_exam].empty()) {
      g.exam_grade = csv::parse_double(row[c_exam], "exam_grade");
    }
    g.excluded = g.final_grade == 0 || (g.exam_grade && *g.exam_grade == 0);
    grades.push_back(std::move(g));
  }
  return grades;
}

ExclusionResult apply_exclusions(const std::vector<GradeRecord>& grades) {
  std::map<std::string, GradeRecord> by_user;
  for (const GradeRecord& g : grades) {
    auto [it, inserted] = by_user.emplace(g.user, g);
    if (!inserted) {
      const GradeRecord& seen = it->second;
      if (seen.final_grade != g.final_grade || seen.exam_grade != g.exam_grade) {
        throw DuplicateUserError(g.user);
      }
    }
  }
  ExclusionResult result;
  for (auto& [user, g] : by_user) {
    if (g.excluded) {
      result.excluded_users.insert(user);
    } else {
      result.retained.push_back(std::move(g));
    }
  }
  return result;
}

}  // namespace engage::ingest
