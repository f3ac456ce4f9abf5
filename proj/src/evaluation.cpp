#include "engage/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "engage/errors.hpp"

namespace engage::evaluation {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double mean_rank = static_cast<double>(i + 1 + j) / 2.0;  // 1-based
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean_rank;
    i = j;
  }
  return ranks;
}

namespace {

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double mean_a = 0, mean_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sxy += da * db;
    sxx += da * da;
    syy += db * db;
  }
  return sxy / std::sqrt(sxx * syy);
}

bool constant(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] != v[0]) return false;
  }
  return true;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InternalError("spearman_rho: length mismatch");
  }
  if (x.size() < 2) {
    throw DegenerateInputError("spearman_rho needs at least 2 pairs");
  }
  if (constant(x) || constant(y)) {
    throw DegenerateInputError("spearman_rho is undefined for a constant vector");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double rho = pearson(rx, ry);
  return std::clamp(rho, -1.0, 1.0);
}

const char* quintile_name(Quintile q) {
  switch (q) {
    case Quintile::VeryLow: return "very_low";
    case Quintile::Low: return "low";
    case Quintile::Moderate: return "moderate";
    case Quintile::High: return "high";
    case Quintile::VeryHigh: return "very_high";
  }
  return "?";
}

QuintileAssignment assign_quintiles(std::span<const double> scores,
                                    std::span<const std::string> users, int week) {
  const std::size_t n = scores.size();
  if (users.size() != n) throw InternalError("assign_quintiles: length mismatch");
  if (n < 5) throw TooFewStudentsError(n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return users[a] < users[b];
  });

  QuintileAssignment out;
  out.week = week;
  out.group_of.assign(n, Quintile::VeryLow);
  out.sizes[0] = (n + 4) / 5;  // ceil(0.2 N)
  const std::size_t rest = n - out.sizes[0];
  const std::size_t base = rest / 4;
  const std::size_t extra = rest % 4;
  for (std::size_t g = 1; g < 5; ++g) {
    out.sizes[g] = base + (g - 1 < extra ? 1 : 0);
  }

  std::size_t pos = 0;
  for (std::size_t g = 0; g < 5; ++g) {
    for (std::size_t i = 0; i < out.sizes[g]; ++i, ++pos) {
      out.members[g].push_back(order[pos]);
      out.group_of[order[pos]] = static_cast<Quintile>(g);
    }
  }
  return out;
}

double quantile_sorted(std::span<const double> sorted_values, double p) {
  if (sorted_values.empty()) throw InternalError("quantile of empty range");
  const std::size_t n = sorted_values.size();
  if (n == 1) return sorted_values[0];
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted_values[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

std::array<BoxSummary, 5> quintile_grade_summary(const QuintileAssignment& assignment,
                                                 std::span<const double> grades) {
  std::array<BoxSummary, 5> out{};
  for (std::size_t g = 0; g < 5; ++g) {
    std::vector<double> values;
    values.reserve(assignment.members[g].size());
    for (std::size_t idx : assignment.members[g]) {
      if (idx >= grades.size()) {
        throw MissingGradeError("index " + std::to_string(idx));
      }
      values.push_back(grades[idx]);
    }
    std::sort(values.begin(), values.end());
    BoxSummary& box = out[g];
    box.n = values.size();
    if (values.empty()) continue;
    box.q1 = quantile_sorted(values, 0.25);
    box.median = quantile_sorted(values, 0.5);
    box.q3 = quantile_sorted(values, 0.75);
    const double iqr = box.q3 - box.q1;
    const double lo_fence = box.q1 - 1.5 * iqr;
    const double hi_fence = box.q3 + 1.5 * iqr;
    box.whisker_low = values.front();
    box.whisker_high = values.back();
    for (double v : values) {
      if (v >= lo_fence) {
        box.whisker_low = v;
        break;
      }
    }
    for (auto it = values.rbegin(); it != values.rend(); ++it) {
      if (*it <= hi_fence) {
        box.whisker_high = *it;
        break;
      }
    }
    for (double v : values) {
      if (v < 50) ++box.below_50;
      if (v < 40) ++box.below_40;
    }
  }
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  if (scores.size() != positive.size()) throw InternalError("roc_auc: length mismatch");
  long p = 0;
  for (std::uint8_t flag : positive) p += flag ? 1 : 0;
  const long n = static_cast<long>(scores.size()) - p;
  if (p == 0 || n == 0) {
    throw SingleClassError("roc_auc needs both classes non-empty (positives=" +
                           std::to_string(p) + ", negatives=" + std::to_string(n) + ")");
  }
  const auto ranks = average_ranks(scores);
  double rank_sum_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (positive[i]) rank_sum_pos += ranks[i];
  }
  const double u_high = rank_sum_pos - static_cast<double>(p) * (p + 1) / 2.0;
  const double auc_high = u_high / (static_cast<double>(p) * static_cast<double>(n));
  return 1.0 - auc_high;  // positives are flagged by low scores
}

RecallPrecision recall_precision(const QuintileAssignment& assignment,
                                 std::span<const double> grades, double threshold) {
  RecallPrecision out;
  out.counts.threshold = threshold;
  long positives = 0;
  for (double g : grades) {
    if (g < threshold) ++positives;
  }
  long tp = 0;
  for (std::size_t idx : assignment.members[0]) {
    if (idx >= grades.size()) throw MissingGradeError("index " + std::to_string(idx));
    if (grades[idx] < threshold) ++tp;
  }
  out.counts.flagged = static_cast<long>(assignment.members[0].size());
  out.counts.true_positive = tp;
  out.counts.false_positive = out.counts.flagged - tp;
  out.counts.positives_total = positives;
  out.counts.false_negative = positives - tp;
  if (positives > 0) {
    out.recall = static_cast<double>(tp) / static_cast<double>(positives);
  }
  if (out.counts.flagged > 0) {
    out.precision = static_cast<double>(tp) / static_cast<double>(out.counts.flagged);
  }
  return out;
}

namespace {

std::optional<double> try_rho(std::span<const double> x, std::span<const double> y) {
  try {
    return spearman_rho(x, y);
  } catch (const DegenerateInputError&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<std::optional<double>> alignment_series(
    const std::vector<std::vector<double>>& weekly_scores,
    std::span<const double> coursewide_scores) {
  std::vector<std::optional<double>> out;
  out.reserve(weekly_scores.size());
  for (const auto& week : weekly_scores) {
    if (week.size() != coursewide_scores.size()) {
      throw CohortMismatchError("?", "weekly and course-wide cohorts differ in size");
    }
    out.push_back(try_rho(week, coursewide_scores));
  }
  return out;
}

GradeCorrelationSeries grade_correlation_series(
    const std::vector<std::vector<double>>& weekly_scores,
    std::span<const double> grades, std::span<const double> coursewide_scores) {
  GradeCorrelationSeries out;
  for (const auto& week : weekly_scores) {
    if (week.size() != grades.size()) {
      throw CohortMismatchError("?", "weekly scores and grades differ in size");
    }
    out.weekly.push_back(try_rho(week, grades));
  }
  out.coursewide = try_rho(coursewide_scores, grades);
  return out;
}

namespace {

WeekClassification classify(std::span<const double> scores, std::span<const double> grades,
                            const QuintileAssignment& assignment, double threshold) {
  WeekClassification out;
  std::vector<std::uint8_t> positive(grades.size(), 0);
  bool any_pos = false, any_neg = false;
  for (std::size_t i = 0; i < grades.size(); ++i) {
    if (grades[i] < threshold) {
      positive[i] = 1;
      any_pos = true;
    } else {
      any_neg = true;
    }
  }
  if (any_pos && any_neg) {
    out.auc = roc_auc(scores, positive);
  }
  out.rp = recall_precision(assignment, grades, threshold);
  return out;
}

}  // namespace

EvaluationReport evaluate(const EvaluationInput& input) {
  const std::size_t n = input.users.size();
  if (input.coursewide_scores.size() != n || input.grades.size() != n) {
    throw InternalError("evaluate: input arrays disagree on cohort size");
  }
  for (const auto& week : input.weekly_scores) {
    if (week.size() != n) throw InternalError("evaluate: weekly score width mismatch");
  }
  EvaluationReport report;
  report.cohort_size = n;
  const auto alignment = alignment_series(input.weekly_scores, input.coursewide_scores);
  const auto grade_rho =
      grade_correlation_series(input.weekly_scores, input.grades, input.coursewide_scores);
  report.coursewide_grade_rho = grade_rho.coursewide;

  for (std::size_t t = 0; t < input.weekly_scores.size(); ++t) {
    const auto& scores = input.weekly_scores[t];
    WeekEvaluation we;
    we.week = static_cast<int>(t) + 1;
    we.alignment_rho = alignment[t];
    we.grade_rho = grade_rho.weekly[t];
    const auto assignment = assign_quintiles(scores, input.users, we.week);
    we.quintiles = quintile_grade_summary(assignment, input.grades);
    we.at_50 = classify(scores, input.grades, assignment, 50.0);
    we.at_40 = classify(scores, input.grades, assignment, 40.0);
    report.weeks.push_back(std::move(we));
  }
  return report;
}

}  // namespace engage::evaluation
