#include <doctest.h>

#include <random>
#include <set>

#include "engage/chapter_metric.hpp"
#include "engage/errors.hpp"
#include "helpers.hpp"

using namespace engage;
using namespace engage::chapter_metric;
using testhelpers::labeled_event;
using testhelpers::test_calendar;

namespace {

sessionizer::Session make_session(const std::string& user, int chapter, std::int64_t day,
                                  const std::vector<std::string>& activities) {
  sessionizer::Session s;
  s.user = user;
  s.chapter = chapter;
  s.start_day_offset = day;
  s.week = static_cast<int>(day / 7) + 1;
  std::int64_t minute = day * kMinutesPerDay + 540;
  for (const std::string& act : activities) {
    s.events.push_back(labeled_event(user, minute++, ChapterLabel::chapter(chapter), act));
  }
  return s;
}

const std::vector<EventField> kContextOnly = {EventField::EventContext};

}  // namespace

TEST_CASE("raw_indicators") {
  SUBCASE("single session on the release day") {
    const auto s = make_session("s1", 1, 10, {"a"});
    const std::vector<const sessionizer::Session*> sessions = {&s};
    const auto raw = raw_indicators(sessions, 10, kContextOnly);
    CHECK(raw.frequency == 1);
    CHECK(raw.immediacy == 0);
    CHECK(raw.diversity == 1);
    CHECK(raw.engaged());
  }
  SUBCASE("two sessions, set-union diversity") {
    const auto s1 = make_session("s1", 1, 12, {"a", "b"});
    const auto s2 = make_session("s1", 1, 15, {"b", "c"});
    const std::vector<const sessionizer::Session*> sessions = {&s1, &s2};
    const auto raw = raw_indicators(sessions, 10, kContextOnly);
    CHECK(raw.frequency == 2);
    CHECK(raw.immediacy == -2);
    CHECK(raw.diversity == 3);

    // independent set-union oracle
    std::set<std::string> expected;
    for (const auto* s : sessions) {
      for (const auto& le : s->events) expected.insert(le.event.event_context);
    }
    CHECK(raw.diversity == static_cast<long>(expected.size()));
  }
  SUBCASE("no sessions is unengaged") {
    const auto raw = raw_indicators({}, 0, kContextOnly);
    CHECK_FALSE(raw.engaged());
    CHECK_FALSE(raw.immediacy.has_value());
  }
  SUBCASE("activity identity honours the column tuple") {
    auto s = make_session("s1", 1, 0, {"a", "a"});
    s.events[0].event.component = "File";
    s.events[1].event.component = "Quiz";
    const std::vector<const sessionizer::Session*> sessions = {&s};
    const std::vector<EventField> both = {EventField::EventContext, EventField::Component};
    CHECK(raw_indicators(sessions, 0, kContextOnly).diversity == 1);
    CHECK(raw_indicators(sessions, 0, both).diversity == 2);
  }
}

TEST_CASE("minmax_scale") {
  SUBCASE("affine map") {
    const auto out = minmax_scale(std::vector<double>{2, 4, 6});
    CHECK(out == std::vector<double>{0, 0.5, 1});
  }
  SUBCASE("degenerate population maps to zero") {
    const auto out = minmax_scale(std::vector<double>{5, 5, 5});
    CHECK(out == std::vector<double>{0, 0, 0});
  }
  SUBCASE("empty population") {
    CHECK_THROWS_AS(minmax_scale(std::vector<double>{}), EmptyPopulationError);
  }
  SUBCASE("rank order preserved on 200 random values (rank oracle)") {
    std::mt19937 rng(3);
    std::vector<double> values(200);
    for (double& v : values) v = static_cast<double>(rng() % 1000) / 7.0;
    const auto scaled = minmax_scale(values);
    const auto r_in = testhelpers::rank_oracle(values);
    const auto r_out = testhelpers::rank_oracle(scaled);
    CHECK(r_in == r_out);
    for (double v : scaled) {
      CHECK(v >= 0);
      CHECK(v <= 1);
    }
    // a non-degenerate population always attains both extremes
    CHECK(*std::min_element(scaled.begin(), scaled.end()) == 0.0);
    CHECK(*std::max_element(scaled.begin(), scaled.end()) == 1.0);
  }
}

TEST_CASE("chapter_score sums the three scaled indicators") {
  CHECK(chapter_score(1, 1, 1) == 3.0);
  CHECK(chapter_score(0, 0, 0) == 0.0);
  CHECK(chapter_score(0.2, 0.5, 0.3) == doctest::Approx(1.0));
}

TEST_CASE("engagement_score") {
  CHECK(engagement_score(std::vector<double>{1.5, 0.5}, std::vector<double>{1, 1}) == 2.0);
  CHECK(engagement_score(std::vector<double>{0, 0, 0}, std::vector<double>{1, 1, 1}) == 0.0);
  CHECK(engagement_score(std::vector<double>{1, 2}, std::vector<double>{2, 0.5}) == 3.0);
  CHECK_THROWS_AS(engagement_score(std::vector<double>{1, 2}, std::vector<double>{1}),
                  WeightMismatchError);
}

TEST_CASE("weekly_series: single engaged student degenerates to zero") {
  const auto s = make_session("s1", 1, 0, {"a"});
  const auto series = weekly_series({s}, {"s1"}, test_calendar(3));
  REQUIRE(series.users == std::vector<std::string>{"s1"});
  for (int t = 1; t <= 3; ++t) {
    CHECK(series.scores[0][t - 1] == 0.0);
  }
}

TEST_CASE("weekly_series: hand-computed two-student instance") {
  std::vector<sessionizer::Session> sessions;
  sessions.push_back(make_session("A", 1, 0, {"a", "b"}));
  sessions.push_back(make_session("A", 1, 7, {"c"}));
  sessions.push_back(make_session("B", 1, 8, {"a"}));
  const auto series = weekly_series(sessions, {"A", "B"}, test_calendar(3));

  REQUIRE(series.releases.size() == 1);
  CHECK(series.releases[0].chapter == 1);
  CHECK(series.releases[0].release_day == 0);
  CHECK(series.releases[0].observed_from_week == 1);

  // week 1: only A engaged, all scalings degenerate
  CHECK(series.scores[0][0] == 0.0);
  CHECK(series.scores[1][0] == 0.0);
  // weeks 2..3: A dominates on every raw indicator
  // A: F=2, I=0, D=3; B: F=1, I=-8, D=1 -> A scales to (1,1,1), B to (0,0,0)
  for (int t = 2; t <= 3; ++t) {
    CHECK(series.scores[0][t - 1] == 3.0);
    CHECK(series.scores[1][t - 1] == 0.0);
  }
}

TEST_CASE("weekly_series: chapter released in week 3 scores zero before") {
  std::vector<sessionizer::Session> sessions;
  sessions.push_back(make_session("A", 3, 15, {"a"}));  // week 3
  sessions.push_back(make_session("B", 3, 16, {"b"}));
  sessions.push_back(make_session("A", 1, 0, {"x"}));
  sessions.push_back(make_session("B", 1, 1, {"y"}));
  const auto series = weekly_series(sessions, {"A", "B"}, test_calendar(4));

  REQUIRE(series.releases.size() == 2);
  const std::size_t ch3 = 1;  // releases are ascending by chapter
  CHECK(series.releases[ch3].chapter == 3);
  CHECK(series.releases[ch3].observed_from_week == 3);
  for (std::size_t u = 0; u < 2; ++u) {
    for (int t = 1; t <= 2; ++t) {
      CHECK(series.idf[u][t - 1][ch3] == 0.0);
    }
  }
  CHECK(series.chapters_released_by(2) == 1);
  CHECK(series.chapters_released_by(3) == 2);
}

TEST_CASE("weekly_series: unknown cohort users get zero scores everywhere") {
  const auto s = make_session("A", 1, 0, {"a"});
  const auto t = make_session("B", 1, 2, {"b"});
  const auto series = weekly_series({s, t}, {"A", "B", "silent"}, test_calendar(2));
  REQUIRE(series.users.size() == 3);
  const auto idx = std::find(series.users.begin(), series.users.end(), "silent") -
                   series.users.begin();
  for (int w = 1; w <= 2; ++w) {
    CHECK(series.scores[static_cast<std::size_t>(idx)][w - 1] == 0.0);
  }
}

TEST_CASE("weekly_series: weight homogeneity preserves ranking") {
  std::mt19937 rng(17);
  std::vector<sessionizer::Session> sessions;
  std::vector<std::string> users;
  for (int u = 0; u < 12; ++u) {
    const std::string user = "u" + std::to_string(10 + u);
    users.push_back(user);
    for (int k = 1; k <= 3; ++k) {
      const int n = static_cast<int>(rng() % 4);
      for (int s = 0; s < n; ++s) {
        const auto day = static_cast<std::int64_t>((k - 1) * 7 + rng() % 14);
        if (day >= 28) continue;
        sessions.push_back(make_session(user, k, day,
                                        {"a" + std::to_string(rng() % 5)}));
      }
    }
  }
  const auto cal = test_calendar(4);
  MetricOptions unit_weights;
  unit_weights.chapter_weights = {1, 1, 1};
  MetricOptions doubled;
  doubled.chapter_weights = {2, 2, 2};
  const auto a = weekly_series(sessions, users, cal, unit_weights);
  const auto b = weekly_series(sessions, users, cal, doubled);
  for (std::size_t u = 0; u < users.size(); ++u) {
    for (int t = 1; t <= 4; ++t) {
      CHECK(b.scores[u][t - 1] == doctest::Approx(2.0 * a.scores[u][t - 1]));
    }
  }
}

TEST_CASE("weekly_series: sparse chapter numbering") {
  std::vector<sessionizer::Session> sessions;
  sessions.push_back(make_session("A", 2, 0, {"a"}));
  sessions.push_back(make_session("B", 2, 1, {"b"}));
  sessions.push_back(make_session("A", 5, 8, {"c"}));
  sessions.push_back(make_session("B", 5, 9, {"d"}));
  MetricOptions options;
  options.chapter_weights = {1, 1, 1, 1, 0.5};  // indexed by chapter number
  const auto series = weekly_series(sessions, {"A", "B"}, test_calendar(3), options);
  REQUIRE(series.releases.size() == 2);
  CHECK(series.releases[0].chapter == 2);
  CHECK(series.releases[1].chapter == 5);
  CHECK(series.weights == std::vector<double>{1, 0.5});
  CHECK(series.chapters_released_by(1) == 1);
  CHECK(series.chapters_released_by(2) == 2);
  // A leads chapter 5 on immediacy only; F and D are tied (degenerate -> 0)
  CHECK(series.scores[0][2] == doctest::Approx(1.0 + 0.5 * 1.0));
}

TEST_CASE("weekly_series: missing chapter weight is an error") {
  const auto s = make_session("A", 5, 0, {"a"});
  const auto t = make_session("B", 5, 1, {"b"});
  MetricOptions options;
  options.chapter_weights = {1, 1};  // chapters 1..2 only
  CHECK_THROWS_AS(weekly_series({s, t}, {"A", "B"}, test_calendar(2), options),
                  WeightMismatchError);
}

TEST_CASE("weekly_series bounds and raw monotonicity on a simulated cohort") {
  const auto cal = test_calendar();
  const auto cfg = testhelpers::coupled_config(5, 60, 6);
  const auto sim = engage::sim::generate_cohort(cal, cfg);

  std::vector<LabeledEvent> labeled;
  for (const LogEvent& ev : sim.events) {
    LabeledEvent le;
    le.event = ev;
    le.day_offset = (ev.time - cal.term_start_minutes()) / kMinutesPerDay;
    le.week = cal.week_of_day_offset(le.day_offset);
    le.chapter = ChapterLabel::general();
    if (ev.event_context.rfind("Chapter ", 0) == 0) {
      le.chapter = ChapterLabel::chapter(std::stoi(ev.event_context.substr(8)));
    }
    labeled.push_back(le);
  }
  std::vector<std::string> users;
  for (const auto& g : sim.grades) users.push_back(g.user);
  const auto sessions = sessionizer::sessionize(labeled, sessionizer::configured_threshold(25));
  const auto series = weekly_series(sessions, users, cal);

  for (std::size_t u = 0; u < series.users.size(); ++u) {
    for (int t = 1; t <= series.num_weeks; ++t) {
      const double y = series.scores[u][t - 1];
      CHECK(y >= 0.0);
      CHECK(y <= series.score_upper_bound(t));
      for (double idf : series.idf[u][t - 1]) {
        CHECK(idf >= 0.0);
        CHECK(idf <= 3.0);
      }
    }
  }
}
