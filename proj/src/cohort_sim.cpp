#include "engage/cohort_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "engage/errors.hpp"

namespace engage::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::mt19937_64 student_rng(std::uint64_t seed, int student, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 1) ^
                                    splitmix64(static_cast<std::uint64_t>(student) << 17)));
}

struct Resource {
  std::string title;
  std::string component;
  std::string event_name;
};

std::vector<Resource> chapter_pool(int chapter) {
  const std::string k = std::to_string(chapter);
  return {
      {"Chapter " + k + " Notes", "File", "Course module viewed"},
      {"Chapter " + k + " Slides", "File", "Course module viewed"},
      {"Chapter " + k + " Lecture Video", "Page", "Course module viewed"},
      {"Chapter " + k + " Quiz", "Quiz", "Quiz attempt started"},
      {"Chapter " + k + " Problem Sheet", "File", "Course module viewed"},
      {"Chapter " + k + " Solutions", "File", "Course module viewed"},
      {"Chapter " + k + " Reading", "URL", "Course module viewed"},
      {"Chapter " + k + " Worked Examples", "Page", "Course module viewed"},
  };
}

const std::vector<Resource>& general_pool() {
  static const std::vector<Resource> pool = {
      {"Course announcements", "Forum", "Discussion viewed"},
      {"Course forum", "Forum", "Discussion viewed"},
      {"Course handbook", "File", "Course module viewed"},
      {"Module homepage", "System", "Course viewed"},
  };
  return pool;
}

long poisson(std::mt19937_64& rng, double mean) {
  if (mean <= 0) return 0;
  std::poisson_distribution<long> dist(mean);
  return dist(rng);
}

}  // namespace

void validate(const SimConfig& config, const CourseCalendar& calendar) {
  if (config.students < 0) throw InvalidConfigError("students must be >= 0");
  if (config.chapters < 1) throw InvalidConfigError("chapters must be >= 1");
  if (config.archetypes.empty()) {
    throw InvalidConfigError("at least one archetype is required");
  }
  double mix = 0;
  for (const ArchetypeConfig& a : config.archetypes) {
    if (a.mix_weight < 0) throw InvalidConfigError("archetype mix weight < 0");
    if (a.session_rate_mean < 0 || a.session_rate_dispersion < 0 ||
        a.first_access_delay_mean_days < 0 || a.activity_breadth_mean < 0) {
      throw InvalidConfigError("archetype \"" + a.name + "\" has a negative parameter");
    }
    if (a.dropout_week && *a.dropout_week < 1) {
      throw InvalidConfigError("archetype \"" + a.name + "\" dropout week < 1");
    }
    mix += a.mix_weight;
  }
  if (std::abs(mix - 1.0) > 1e-9) {
    throw InvalidConfigError("archetype mix weights must sum to 1");
  }
  if (config.general_session_rate < 0 || config.general_click_prob < 0 ||
      config.general_click_prob > 1) {
    throw InvalidConfigError("general activity parameters out of range");
  }
  if (config.revision_decay < 0 || config.revision_decay > 1) {
    throw InvalidConfigError("revision_decay must be in [0,1]");
  }
  if (!config.chapter_release_weeks.empty()) {
    if (config.chapter_release_weeks.size() != static_cast<std::size_t>(config.chapters)) {
      throw InvalidConfigError("chapter_release_weeks must have one entry per chapter");
    }
    for (int w : config.chapter_release_weeks) {
      if (w < 1 || w > calendar.num_weeks) {
        throw InvalidConfigError("chapter release week " + std::to_string(w) +
                                 " outside [1, " + std::to_string(calendar.num_weeks) + "]");
      }
    }
  }
  if (config.grade_model.noise_scale < 0) {
    throw InvalidConfigError("grade noise_scale must be >= 0");
  }
}

SimResult generate_cohort(const CourseCalendar& calendar, const SimConfig& config) {
  validate(config, calendar);

  const int num_weeks = calendar.num_weeks;
  const int week_days = calendar.week_length_days;
  const std::int64_t term_days = calendar.term_length_days();
  const Minutes term_start = calendar.term_start_minutes();
  const Minutes term_end = calendar.term_end_minutes();

  int width = 1;
  for (int v = config.students; v >= 10; v /= 10) ++width;
  const auto user_id = [&](int i) {
    std::string digits = std::to_string(i + 1);
    return "S" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
  };

  SimResult result;
  std::vector<double> latent_raw(config.students, 0.0);

  for (int i = 0; i < config.students; ++i) {
    auto rng = student_rng(config.seed, i, 0x01);
    const std::string user = user_id(i);

    // archetype by cumulative mix weight
    double pick = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const ArchetypeConfig* arch = &config.archetypes.back();
    for (const ArchetypeConfig& a : config.archetypes) {
      if (pick < a.mix_weight) {
        arch = &a;
        break;
      }
      pick -= a.mix_weight;
    }

    double rate = arch->session_rate_mean;
    if (arch->session_rate_dispersion > 0 && rate > 0) {
      const double cv = arch->session_rate_dispersion;
      std::gamma_distribution<double> gamma(1.0 / (cv * cv), rate * cv * cv);
      rate = gamma(rng);
    }
    const double delay_scale =
        arch->first_access_delay_mean_days *
        std::uniform_real_distribution<double>(0.6, 1.4)(rng);
    const long breadth = 1 + poisson(rng, std::max(0.0, arch->activity_breadth_mean - 1.0));
    const int active_last_week =
        arch->dropout_week ? std::min(num_weeks, *arch->dropout_week - 1) : num_weeks;

    long chapter_sessions = 0;
    std::set<std::string> touched;
    double delay_sum = 0;
    long engaged_chapters = 0;

    std::vector<LogEvent> events;
    const auto emit_burst = [&](std::int64_t day, const std::vector<const Resource*>& pool,
                                long n_events) {
      Minutes t = term_start + day * kMinutesPerDay +
                  std::uniform_int_distribution<int>(8 * 60, 22 * 60)(rng);
      bool paused = false;
      for (long e = 0; e < n_events; ++e) {
        if (t >= term_end) break;
        const Resource* res;
        if (!pool.empty() &&
            std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= config.general_click_prob) {
          res = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        } else {
          const auto& gp = general_pool();
          res = &gp[std::uniform_int_distribution<std::size_t>(0, gp.size() - 1)(rng)];
        }
        LogEvent ev;
        ev.time = t;
        ev.user = user;
        ev.event_context = res->title;
        ev.component = res->component;
        ev.event_name = res->event_name;
        ev.description = "The user with id '" + user + "' viewed the '" + res->title + "'.";
        events.push_back(std::move(ev));
        touched.insert(res->title);
        long gap = std::uniform_int_distribution<long>(0, 5)(rng);
        if (!paused && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.15) {
          gap = std::uniform_int_distribution<long>(8, 20)(rng);
          paused = true;
        }
        t += gap;
      }
    };

    if (rate > 0) {
      for (int k = 1; k <= config.chapters; ++k) {
        const int release_week = config.chapter_release_weeks.empty()
                                     ? std::min(k, num_weeks)
                                     : config.chapter_release_weeks[k - 1];
        if (release_week > active_last_week) continue;
        const std::int64_t release_day = static_cast<std::int64_t>(release_week - 1) * week_days;
        std::int64_t delay = 0;
        if (delay_scale > 0) {
          delay = static_cast<std::int64_t>(
              std::exponential_distribution<double>(1.0 / delay_scale)(rng));
        }
        const std::int64_t first_day = release_day + delay;
        if (first_day >= term_days) continue;
        const int first_week = calendar.week_of_day_offset(first_day);
        if (first_week > active_last_week) continue;

        ++engaged_chapters;
        delay_sum += static_cast<double>(delay);

        // the student's personal selection of this chapter's resources
        auto pool = chapter_pool(k);
        std::vector<const Resource*> selected;
        std::vector<std::size_t> order(pool.size());
        for (std::size_t j = 0; j < pool.size(); ++j) order[j] = j;
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(breadth), pool.size());
        for (std::size_t j = 0; j < take; ++j) selected.push_back(&pool[order[j]]);

        for (int w = first_week; w <= active_last_week; ++w) {
          const double mult = std::pow(config.revision_decay, std::max(0, w - first_week));
          long n = poisson(rng, rate * mult);
          if (w == first_week) n = std::max<long>(1, n);
          for (long s = 0; s < n; ++s) {
            std::int64_t day;
            if (w == first_week && s == 0) {
              day = first_day;
            } else {
              const std::int64_t week_start = static_cast<std::int64_t>(w - 1) * week_days;
              std::int64_t lo = week_start;
              if (w == first_week) lo = first_day;
              const std::int64_t hi = std::min<std::int64_t>(week_start + week_days - 1, term_days - 1);
              day = std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
            }
            // session touches a subset of the selected resources
            std::vector<const Resource*> session_pool;
            const std::size_t s_take = std::min<std::size_t>(
                selected.size(), 1 + static_cast<std::size_t>(poisson(rng, 1.0)));
            std::vector<const Resource*> shuffled = selected;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            session_pool.assign(shuffled.begin(), shuffled.begin() + static_cast<long>(s_take));
            const long n_events = 2 + poisson(rng, 2.0);
            emit_burst(day, session_pool, n_events);
            ++chapter_sessions;
          }
        }
      }
    }

    // standalone general-only sessions (forums, handbook, homepage)
    if (config.general_session_rate > 0) {
      for (int w = 1; w <= active_last_week; ++w) {
        const long n = poisson(rng, config.general_session_rate);
        for (long s = 0; s < n; ++s) {
          const std::int64_t week_start = static_cast<std::int64_t>(w - 1) * week_days;
          const std::int64_t hi = std::min<std::int64_t>(week_start + week_days - 1, term_days - 1);
          const std::int64_t day =
              std::uniform_int_distribution<std::int64_t>(week_start, hi)(rng);
          const auto& gp = general_pool();
          std::vector<const Resource*> session_pool;
          session_pool.push_back(
              &gp[std::uniform_int_distribution<std::size_t>(0, gp.size() - 1)(rng)]);
          emit_burst(day, session_pool, 1 + poisson(rng, 0.8));
        }
      }
    }

    const double mean_delay =
        engaged_chapters > 0 ? delay_sum / static_cast<double>(engaged_chapters) : 0.0;
    latent_raw[i] = static_cast<double>(chapter_sessions) +
                    0.5 * static_cast<double>(touched.size()) - 0.15 * mean_delay;

    StudentInfo info;
    info.user = user;
    info.archetype = arch->name;
    result.students.push_back(std::move(info));
    result.events.insert(result.events.end(), std::make_move_iterator(events.begin()),
                         std::make_move_iterator(events.end()));
  }

  // Latent engagement on [0,1] as the student's relative standing (average
  // rank scaled to [0,1]); a flat cohort carries no signal and maps to 0.
  std::vector<double> latent01(latent_raw.size(), 0.0);
  if (config.students > 1) {
    const auto [mn, mx] = std::minmax_element(latent_raw.begin(), latent_raw.end());
    if (*mx > *mn) {
      std::vector<int> order(latent_raw.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return latent_raw[a] < latent_raw[b];
      });
      std::size_t i = 0;
      while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && latent_raw[order[j]] == latent_raw[order[i]]) ++j;
        const double rank = static_cast<double>(i + j - 1) / 2.0;  // 0-based average
        for (std::size_t k = i; k < j; ++k) {
          latent01[order[k]] = rank / static_cast<double>(config.students - 1);
        }
        i = j;
      }
    }
  }
  for (int i = 0; i < config.students; ++i) {
    result.students[i].latent = latent01[i];
    auto grng = student_rng(config.seed, i, 0x02);
    double grade = config.grade_model.base_grade +
                   config.grade_model.engagement_coefficient * latent01[i];
    if (config.grade_model.noise_scale > 0) {
      grade += std::normal_distribution<double>(0.0, config.grade_model.noise_scale)(grng);
    }
    grade = std::clamp(grade, 0.0, 100.0);
    grade = std::round(grade * 10.0) / 10.0;  // grades are reported to 0.1
    GradeRecord rec;
    rec.user = result.students[i].user;
    rec.final_grade = grade;
    rec.excluded = grade == 0;
    result.grades.push_back(std::move(rec));
  }

  std::stable_sort(result.events.begin(), result.events.end(),
                   [](const LogEvent& a, const LogEvent& b) { return a.time < b.time; });
  return result;
}

}  // namespace engage::sim
