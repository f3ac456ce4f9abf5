#include <doctest.h>

#include <cmath>
#include <map>

#include "engage/cohort_sim.hpp"
#include "engage/errors.hpp"
#include "engage/evaluation.hpp"
#include "helpers.hpp"

using namespace engage;
using namespace engage::sim;
using testhelpers::test_calendar;

TEST_CASE("generate_cohort is deterministic in the seed") {
  const auto cal = test_calendar();
  const auto cfg = testhelpers::coupled_config(42, 30, 5);
  const auto a = generate_cohort(cal, cfg);
  const auto b = generate_cohort(cal, cfg);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i] == b.events[i]);
  }
  REQUIRE(a.grades.size() == b.grades.size());
  for (std::size_t i = 0; i < a.grades.size(); ++i) {
    CHECK(a.grades[i].final_grade == b.grades[i].final_grade);
  }
}

TEST_CASE("different seeds differ") {
  const auto cal = test_calendar();
  const auto a = generate_cohort(cal, testhelpers::coupled_config(1, 30, 5));
  const auto b = generate_cohort(cal, testhelpers::coupled_config(2, 30, 5));
  bool same = a.events.size() == b.events.size();
  if (same) {
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      if (!(a.events[i] == b.events[i])) {
        same = false;
        break;
      }
    }
  }
  CHECK_FALSE(same);
}

TEST_CASE("a fully silent cohort emits no events and grades near base") {
  const auto cal = test_calendar();
  SimConfig cfg;
  cfg.students = 25;
  cfg.chapters = 5;
  cfg.seed = 9;
  cfg.archetypes = {{"silent", 1.0, 0.0, 0.0, 0.0, 0.0, std::nullopt}};
  cfg.grade_model = {55, 30, 4};
  cfg.general_session_rate = 0;
  const auto result = generate_cohort(cal, cfg);
  CHECK(result.events.empty());
  REQUIRE(result.grades.size() == 25);
  for (const auto& g : result.grades) {
    CHECK(g.final_grade == doctest::Approx(55).epsilon(0.5));  // base + noise only
    CHECK(g.final_grade >= 0);
    CHECK(g.final_grade <= 100);
  }
  for (const auto& s : result.students) CHECK(s.latent == 0.0);
}

TEST_CASE("timestamps stay inside the term and are sorted per student") {
  const auto cal = test_calendar();
  const auto result = generate_cohort(cal, testhelpers::coupled_config(3, 40, 11));
  std::map<std::string, Minutes> last;
  for (const auto& ev : result.events) {
    CHECK(ev.time >= cal.term_start_minutes());
    CHECK(ev.time < cal.term_end_minutes());
    auto it = last.find(ev.user);
    if (it != last.end()) CHECK(ev.time >= it->second);
    last[ev.user] = ev.time;
  }
}

TEST_CASE("zero engagement coefficient decouples grades from latent engagement") {
  const auto cal = test_calendar();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto result = generate_cohort(cal, testhelpers::null_config(seed, 150));
    std::vector<double> latent, grades;
    for (std::size_t i = 0; i < result.students.size(); ++i) {
      latent.push_back(result.students[i].latent);
      grades.push_back(result.grades[i].final_grade);
    }
    CHECK(std::abs(evaluation::spearman_rho(latent, grades)) < 0.25);
  }
}

TEST_CASE("higher-rate archetypes emit more events on average") {
  const auto cal = test_calendar();
  SimConfig cfg;
  cfg.students = 120;
  cfg.chapters = 6;
  cfg.archetypes = {{"busy", 0.5, 2.5, 0.3, 1.0, 4.0, std::nullopt},
                    {"quiet", 0.5, 0.6, 0.3, 1.0, 4.0, std::nullopt}};
  cfg.grade_model = {40, 40, 5};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.seed = seed;
    const auto result = generate_cohort(cal, cfg);
    std::map<std::string, std::string> archetype_of;
    for (const auto& s : result.students) archetype_of[s.user] = s.archetype;
    std::map<std::string, std::pair<double, int>> events_by_archetype;
    for (const auto& s : result.students) {
      events_by_archetype[s.archetype].second++;
    }
    for (const auto& ev : result.events) {
      events_by_archetype[archetype_of[ev.user]].first += 1;
    }
    const auto busy = events_by_archetype["busy"];
    const auto quiet = events_by_archetype["quiet"];
    REQUIRE(busy.second > 0);
    REQUIRE(quiet.second > 0);
    CHECK(busy.first / busy.second > quiet.first / quiet.second);
  }
}

TEST_CASE("invalid configurations are rejected") {
  const auto cal = test_calendar();
  SimConfig cfg = testhelpers::coupled_config(1, 10, 3);
  SUBCASE("mix weights must sum to one") {
    cfg.archetypes[0].mix_weight = 0.9;
    CHECK_THROWS_AS(validate(cfg, cal), InvalidConfigError);
  }
  SUBCASE("negative rate") {
    cfg.archetypes[0].session_rate_mean = -1;
    CHECK_THROWS_AS(validate(cfg, cal), InvalidConfigError);
  }
  SUBCASE("release weeks must match chapter count") {
    cfg.chapter_release_weeks = {1, 2};
    CHECK_THROWS_AS(validate(cfg, cal), InvalidConfigError);
  }
  SUBCASE("release week outside the term") {
    cfg.chapter_release_weeks = {1, 2, 99};
    CHECK_THROWS_AS(validate(cfg, cal), InvalidConfigError);
  }
  SUBCASE("no archetypes") {
    cfg.archetypes.clear();
    CHECK_THROWS_AS(validate(cfg, cal), InvalidConfigError);
  }
}
