#include "engage/coursewide_metric.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "engage/chapter_metric.hpp"
#include "engage/errors.hpp"

namespace engage::coursewide {

RawIndicators coursewide_indicators(std::span<const sessionizer::Session* const> sessions,
                                    std::span<const EventField> activity_columns) {
  RawIndicators raw;
  if (sessions.empty()) return raw;
  std::int64_t first = sessions.front()->start_day_offset;
  std::int64_t last = first;
  std::unordered_set<std::string> activities;
  for (const sessionizer::Session* s : sessions) {
    raw.sessions += 1;
    first = std::min(first, s->start_day_offset);
    last = std::max(last, s->start_day_offset);
    for (const LabeledEvent& le : s->events) {
      activities.insert(activity_key(le.event, activity_columns));
    }
  }
  raw.first_day = first;
  raw.last_day = last;
  raw.diversity = static_cast<long>(activities.size());
  return raw;
}

double coursewide_score(const std::array<double, kNumIndicators>& scaled,
                        const std::array<double, kNumIndicators>& weights) {
  double y = 0;
  for (std::size_t i = 0; i < kNumIndicators; ++i) {
    y += weights[i] * scaled[i];
  }
  return y;
}

double coursewide_variant(const std::array<double, kNumIndicators>& scaled,
                          std::span<const Indicator> subset,
                          const std::array<double, kNumIndicators>& weights) {
  if (subset.empty()) throw EmptySubsetError();
  double y = 0;
  for (Indicator ind : subset) {
    const auto i = static_cast<std::size_t>(ind);
    y += weights[i] * scaled[i];
  }
  return y;
}

std::vector<Row> coursewide_table(const std::vector<sessionizer::Session>& sessions,
                                  const std::vector<std::string>& cohort_users,
                                  const Options& options) {
  std::vector<std::string> users = cohort_users;
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < users.size(); ++i) index.emplace(users[i], i);

  std::vector<std::vector<const sessionizer::Session*>> per_user(users.size());
  for (const sessionizer::Session& s : sessions) {
    auto it = index.find(s.user);
    if (it == index.end()) throw InternalError("session user " + s.user + " not in cohort");
    per_user[it->second].push_back(&s);
  }

  std::vector<Row> rows(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    rows[i].user = users[i];
    rows[i].raw = coursewide_indicators(per_user[i], options.activity_columns);
  }

  // Count-based indicators scale over the whole cohort (zero-session students
  // enter with raw 0); day-based ones scale over engaged students only and
  // zero-session students get scaled 0.
  std::vector<double> freq, div;
  std::vector<double> imm, rec, inter;
  std::vector<std::size_t> engaged;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    freq.push_back(static_cast<double>(rows[i].raw.sessions));
    div.push_back(static_cast<double>(rows[i].raw.diversity));
    if (rows[i].raw.engaged()) {
      engaged.push_back(i);
      imm.push_back(static_cast<double>(*rows[i].raw.immediacy()));
      rec.push_back(static_cast<double>(*rows[i].raw.recency()));
      inter.push_back(static_cast<double>(*rows[i].raw.interval()));
    }
  }
  if (!rows.empty()) {
    const auto freq_s = chapter_metric::minmax_scale(freq);
    const auto div_s = chapter_metric::minmax_scale(div);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].scaled[static_cast<std::size_t>(Indicator::Frequency)] = freq_s[i];
      rows[i].scaled[static_cast<std::size_t>(Indicator::Diversity)] = div_s[i];
    }
  }
  if (!engaged.empty()) {
    const auto imm_s = chapter_metric::minmax_scale(imm);
    const auto rec_s = chapter_metric::minmax_scale(rec);
    const auto inter_s = chapter_metric::minmax_scale(inter);
    for (std::size_t j = 0; j < engaged.size(); ++j) {
      rows[engaged[j]].scaled[static_cast<std::size_t>(Indicator::Immediacy)] = imm_s[j];
      rows[engaged[j]].scaled[static_cast<std::size_t>(Indicator::Recency)] = rec_s[j];
      rows[engaged[j]].scaled[static_cast<std::size_t>(Indicator::Interval)] = inter_s[j];
    }
  }
  for (Row& row : rows) {
    row.score = coursewide_score(row.scaled, options.weights);
  }
  return rows;
}

}  // namespace engage::coursewide
