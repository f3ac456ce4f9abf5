#include "engage/sessionizer.hpp"

#include <algorithm>
#include <map>

#include "engage/errors.hpp"

namespace engage::sessionizer {

namespace {
constexpr double kGapWindowMinutes = 120.0;
}

GapThreshold configured_threshold(double minutes) {
  if (!(minutes > 0) || minutes > kGapWindowMinutes) {
    throw ConfigError("gap threshold must be in (0, 120] minutes, got " +
                      std::to_string(minutes));
  }
  return {minutes, GapThreshold::Source::Configured};
}

GapThreshold compute_gap_threshold(const std::vector<LabeledEvent>& events) {
  std::map<std::string, Minutes> last_seen;
  std::vector<std::int64_t> gaps;
  for (const LabeledEvent& le : events) {
    auto it = last_seen.find(le.event.user);
    if (it != last_seen.end()) {
      const std::int64_t gap = le.event.time - it->second;
      if (gap > 0 && gap <= static_cast<std::int64_t>(kGapWindowMinutes)) {
        gaps.push_back(gap);
      }
      it->second = le.event.time;
    } else {
      last_seen.emplace(le.event.user, le.event.time);
    }
  }
  if (gaps.empty()) {
    throw InsufficientDataError(
        "no eligible inactivity gaps to compute a threshold from; "
        "configure threshold_minutes explicitly");
  }
  std::sort(gaps.begin(), gaps.end());
  // nearest-rank: 1-based index ceil(0.95*n), in exact integer arithmetic
  const std::size_t n = gaps.size();
  const std::size_t idx = (95 * n + 99) / 100;
  return {static_cast<double>(gaps[idx - 1]), GapThreshold::Source::Computed};
}

std::vector<std::vector<LabeledEvent>> split_by_inactivity(
    const std::vector<LabeledEvent>& user_events, const GapThreshold& threshold) {
  std::vector<std::vector<LabeledEvent>> sessions;
  for (std::size_t i = 0; i < user_events.size(); ++i) {
    const bool new_session =
        i == 0 || static_cast<double>(user_events[i].event.time -
                                      user_events[i - 1].event.time) > threshold.minutes;
    if (new_session) sessions.emplace_back();
    sessions.back().push_back(user_events[i]);
  }
  return sessions;
}

namespace {

Session make_session(const std::string& user, std::vector<LabeledEvent> events,
                     std::optional<int> chapter) {
  Session s;
  s.user = user;
  s.start_day_offset = events.front().day_offset;
  s.week = events.front().week;
  s.chapter = chapter;
  s.events = std::move(events);
  return s;
}

}  // namespace

std::vector<Session> attribute_chapter_sessions(
    const std::string& user, const std::vector<std::vector<LabeledEvent>>& raw_sessions) {
  std::vector<Session> out;
  for (const auto& raw : raw_sessions) {
    if (raw.empty()) continue;
    std::vector<LabeledEvent> pending_general;
    std::vector<LabeledEvent> current;
    std::optional<int> current_chapter;
    for (const LabeledEvent& le : raw) {
      if (!le.chapter.is_chapter()) {
        if (current_chapter) {
          current.push_back(le);  // inherit the running chapter
        } else {
          pending_general.push_back(le);
        }
        continue;
      }
      const int k = le.chapter.number;
      if (!current_chapter) {
        current = std::move(pending_general);
        pending_general.clear();
        current.push_back(le);
        current_chapter = k;
      } else if (k == *current_chapter) {
        current.push_back(le);
      } else {
        // a new chapter appears: close the running session
        out.push_back(make_session(user, std::move(current), current_chapter));
        current.clear();
        current.push_back(le);
        current_chapter = k;
      }
    }
    if (current_chapter) {
      out.push_back(make_session(user, std::move(current), current_chapter));
    } else if (!pending_general.empty()) {
      out.push_back(make_session(user, std::move(pending_general), std::nullopt));
    }
  }
  return out;
}

std::vector<Session> sessionize(const std::vector<LabeledEvent>& events,
                                const GapThreshold& threshold) {
  std::map<std::string, std::vector<LabeledEvent>> by_user;
  for (const LabeledEvent& le : events) {
    by_user[le.event.user].push_back(le);
  }
  std::vector<Session> out;
  for (const auto& [user, user_events] : by_user) {
    auto raw = split_by_inactivity(user_events, threshold);
    auto attributed = attribute_chapter_sessions(user, raw);
    out.insert(out.end(), std::make_move_iterator(attributed.begin()),
               std::make_move_iterator(attributed.end()));
  }
  return out;
}

}  // namespace engage::sessionizer
