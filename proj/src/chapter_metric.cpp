#include "engage/chapter_metric.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "engage/errors.hpp"

namespace engage::chapter_metric {

RawIndicators raw_indicators(std::span<const sessionizer::Session* const> sessions,
                             std::int64_t release_day,
                             std::span<const EventField> activity_columns) {
  RawIndicators raw;
  if (sessions.empty()) return raw;

  std::int64_t first_day = sessions.front()->start_day_offset;
  std::unordered_set<std::string> activities;
  for (const sessionizer::Session* s : sessions) {
    raw.frequency += 1;
    first_day = std::min(first_day, s->start_day_offset);
    for (const LabeledEvent& le : s->events) {
      activities.insert(activity_key(le.event, activity_columns));
    }
  }
  raw.immediacy = release_day - first_day;
  raw.diversity = static_cast<long>(activities.size());
  return raw;
}

std::vector<double> minmax_scale(std::span<const double> values) {
  if (values.empty()) throw EmptyPopulationError();
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it;
  const double hi = *max_it;
  std::vector<double> out(values.size(), 0.0);
  if (hi == lo) return out;  // constant distribution carries no ranking signal
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - lo) / (hi - lo);
  }
  return out;
}

double chapter_score(double frequency, double immediacy, double diversity) {
  return frequency + immediacy + diversity;
}

double engagement_score(std::span<const double> idf, std::span<const double> weights) {
  if (weights.size() < idf.size()) {
    throw WeightMismatchError("weight vector has " + std::to_string(weights.size()) +
                              " entries for " + std::to_string(idf.size()) +
                              " released chapters");
  }
  double y = 0;
  for (std::size_t i = 0; i < idf.size(); ++i) {
    y += weights[i] * idf[i];
  }
  return y;
}

int WeeklySeries::chapters_released_by(int week) const {
  int k = 0;
  for (const ChapterRelease& r : releases) {
    if (r.observed_from_week <= week) ++k;
  }
  return k;
}

double WeeklySeries::score_upper_bound(int week) const {
  double bound = 0;
  for (std::size_t i = 0; i < releases.size(); ++i) {
    if (releases[i].observed_from_week <= week) bound += 3.0 * weights[i];
  }
  return bound;
}

namespace {

// Incremental per-(chapter, user) cumulative state, advanced week by week.
struct UserChapterState {
  std::vector<const sessionizer::Session*> sessions;  // ordered by week
  std::size_t next = 0;
  long frequency = 0;
  std::int64_t first_day = 0;
  std::unordered_set<std::string> activities;
  std::optional<std::int64_t> immediacy;  // cached once engaged

  void advance(int week, std::int64_t release_day,
               std::span<const EventField> activity_columns) {
    while (next < sessions.size() && sessions[next]->week <= week) {
      const sessionizer::Session* s = sessions[next];
      if (frequency == 0 || s->start_day_offset < first_day) {
        first_day = s->start_day_offset;
      }
      ++frequency;
      for (const LabeledEvent& le : s->events) {
        activities.insert(activity_key(le.event, activity_columns));
      }
      ++next;
    }
    if (frequency > 0 && !immediacy) {
      immediacy = release_day - first_day;  // fixed once observed
    }
  }
};

}  // namespace

WeeklySeries weekly_series(const std::vector<sessionizer::Session>& sessions,
                           const std::vector<std::string>& cohort_users,
                           const CourseCalendar& calendar,
                           const MetricOptions& options, int up_to_week) {
  WeeklySeries series;
  series.users = cohort_users;
  std::sort(series.users.begin(), series.users.end());
  series.users.erase(std::unique(series.users.begin(), series.users.end()),
                     series.users.end());
  const int num_weeks = up_to_week > 0 ? up_to_week : calendar.num_weeks;
  if (num_weeks < 1 || num_weeks > calendar.num_weeks) {
    throw ConfigError("week " + std::to_string(up_to_week) + " outside [1, " +
                      std::to_string(calendar.num_weeks) + "]");
  }
  series.num_weeks = num_weeks;

  std::unordered_map<std::string, std::size_t> user_index;
  for (std::size_t i = 0; i < series.users.size(); ++i) {
    user_index.emplace(series.users[i], i);
  }

  // Group chapter sessions: chapter -> user -> ordered session list.
  std::map<int, std::map<std::size_t, std::vector<const sessionizer::Session*>>> chapters;
  for (const sessionizer::Session& s : sessions) {
    if (s.general_only() || s.week > num_weeks) continue;
    auto it = user_index.find(s.user);
    if (it == user_index.end()) {
      throw InternalError("session user " + s.user + " not in cohort");
    }
    chapters[*s.chapter][it->second].push_back(&s);
  }

  // Release proxy, frozen at the chapter's first observed week.
  for (auto& [chapter, per_user] : chapters) {
    ChapterRelease release;
    release.chapter = chapter;
    release.observed_from_week = num_weeks + 1;
    for (auto& [uidx, list] : per_user) {
      std::stable_sort(list.begin(), list.end(),
                       [](const sessionizer::Session* a, const sessionizer::Session* b) {
                         return a->week < b->week;
                       });
      release.observed_from_week = std::min(release.observed_from_week, list.front()->week);
    }
    release.release_day = std::numeric_limits<std::int64_t>::max();
    for (const auto& [uidx, list] : per_user) {
      for (const sessionizer::Session* s : list) {
        if (s->week > release.observed_from_week) break;
        release.release_day = std::min(release.release_day, s->start_day_offset);
      }
    }
    series.releases.push_back(release);
  }

  // Weights, validated against every released chapter.
  for (const ChapterRelease& r : series.releases) {
    double w = 1.0;
    if (!options.chapter_weights.empty()) {
      if (static_cast<std::size_t>(r.chapter) > options.chapter_weights.size()) {
        throw WeightMismatchError("no weight for chapter " + std::to_string(r.chapter) +
                                  " (weight vector has " +
                                  std::to_string(options.chapter_weights.size()) +
                                  " entries)");
      }
      w = options.chapter_weights[r.chapter - 1];
      if (w < 0) {
        throw ConfigError("chapter weight for chapter " + std::to_string(r.chapter) +
                          " is negative");
      }
    }
    series.weights.push_back(w);
  }

  const std::size_t num_users = series.users.size();
  const std::size_t num_chapters = series.releases.size();
  series.scores.assign(num_users, std::vector<double>(num_weeks, 0.0));
  series.idf.assign(num_users,
                    std::vector<std::vector<double>>(
                        num_weeks, std::vector<double>(num_chapters, 0.0)));

  std::span<const EventField> cols(options.activity_columns);

  std::size_t chapter_idx = 0;
  for (auto& [chapter, per_user] : chapters) {
    const ChapterRelease& release = series.releases[chapter_idx];
    std::vector<std::pair<std::size_t, UserChapterState>> states;
    states.reserve(per_user.size());
    for (auto& [uidx, list] : per_user) {
      UserChapterState st;
      st.sessions = std::move(list);
      states.emplace_back(uidx, std::move(st));
    }

    std::vector<std::size_t> engaged;
    std::vector<double> f, im, d;
    for (int t = 1; t <= num_weeks; ++t) {
      engaged.clear();
      f.clear();
      im.clear();
      d.clear();
      for (std::size_t si = 0; si < states.size(); ++si) {
        UserChapterState& st = states[si].second;
        st.advance(t, release.release_day, cols);
        if (st.frequency == 0) continue;
        engaged.push_back(si);
        f.push_back(static_cast<double>(st.frequency));
        im.push_back(static_cast<double>(*st.immediacy));
        d.push_back(static_cast<double>(st.activities.size()));
      }
      if (engaged.empty()) continue;  // chapter not released by week t
      const auto fs = minmax_scale(f);
      const auto is = minmax_scale(im);
      const auto ds = minmax_scale(d);
      for (std::size_t j = 0; j < engaged.size(); ++j) {
        const std::size_t uidx = states[engaged[j]].first;
        series.idf[uidx][t - 1][chapter_idx] = chapter_score(fs[j], is[j], ds[j]);
      }
    }
    ++chapter_idx;
  }

  for (std::size_t u = 0; u < num_users; ++u) {
    for (int t = 1; t <= num_weeks; ++t) {
      series.scores[u][t - 1] =
          engagement_score(series.idf[u][t - 1], series.weights);
    }
  }
  return series;
}

}  // namespace engage::chapter_metric
