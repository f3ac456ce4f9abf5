#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "engage/types.hpp"

namespace engage::ingest {

// Parses a delimiter-separated activity log with a header row. Events are
// returned in ascending time order; input order is preserved among equal
// timestamps. Blank lines are skipped; structurally short rows, unparseable
// timestamps and empty users are errors naming the offending row.
std::vector<LogEvent> parse_log(std::istream& in, const LogFormat& format = {});

// Labels each event with week, day offset and chapter. Events outside the
// term window are dropped; so are events an override maps to Excluded.
// `chapter_text` selects the column chapter labels are extracted from.
std::vector<LabeledEvent> label_events(const std::vector<LogEvent>& events,
                                       const CourseCalendar& calendar,
                                       const ChapterRules& rules,
                                       EventField chapter_text = EventField::EventContext);

// Applies the label rules to one title/component pair. Exposed for tests and
// rule debugging.
ChapterLabel apply_rules(const std::string& chapter_text, const std::string& component,
                         const ChapterRules& rules);

// Grades file: header row with columns user, final_grade and optionally
// exam_grade. Sets the exclusion flag per record.
std::vector<GradeRecord> read_grades(std::istream& in, char delimiter = ',');

struct ExclusionResult {
  std::vector<GradeRecord> retained;      // sorted by user, deduplicated
  std::set<std::string> excluded_users;
};

// Splits grade records into retained and excluded (grade-zero) users.
// Identical duplicate records collapse; conflicting ones are an error.
ExclusionResult apply_exclusions(const std::vector<GradeRecord>& grades);

}  // namespace engage::ingest
