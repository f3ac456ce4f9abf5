#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace engage::evaluation {

// Fractional ranks, ties receiving the mean of their rank range (1-based).
std::vector<double> average_ranks(std::span<const double> values);

// Spearman's rho: Pearson correlation of average ranks. Throws
// DegenerateInput for fewer than two pairs or a constant vector.
double spearman_rho(std::span<const double> x, std::span<const double> y);

// One rho per week between the weekly scores and the course-wide reference.
// Weeks with a degenerate score vector come back absent.
std::vector<std::optional<double>> alignment_series(
    const std::vector<std::vector<double>>& weekly_scores,
    std::span<const double> coursewide_scores);

struct GradeCorrelationSeries {
  std::vector<std::optional<double>> weekly;  // rho(y_t, grade) per week
  std::optional<double> coursewide;           // rho(Y, grade), constant reference
};

GradeCorrelationSeries grade_correlation_series(
    const std::vector<std::vector<double>>& weekly_scores,
    std::span<const double> grades, std::span<const double> coursewide_scores);

enum class Quintile { VeryLow = 0, Low, Moderate, High, VeryHigh };
const char* quintile_name(Quintile q);

struct QuintileAssignment {
  int week = 0;
  std::array<std::vector<std::size_t>, 5> members;  // user indices, rank order
  std::array<std::size_t, 5> sizes{};
  std::vector<Quintile> group_of;  // indexed like the score vector
};

// Ascending-score order, ties broken by ascending user identifier. VeryLow
// takes ceil(0.2 N); the remainder splits as evenly as possible in order.
QuintileAssignment assign_quintiles(std::span<const double> scores,
                                    std::span<const std::string> users, int week);

// Linear interpolation between closest ranks at position (n-1)*p.
double quantile_sorted(std::span<const double> sorted_values, double p);

struct BoxSummary {
  std::size_t n = 0;
  double median = 0, q1 = 0, q3 = 0;
  double whisker_low = 0, whisker_high = 0;  // extremes within 1.5 IQR
  long below_50 = 0, below_40 = 0;
};

std::array<BoxSummary, 5> quintile_grade_summary(const QuintileAssignment& assignment,
                                                 std::span<const double> grades);

// Probability that a random positive scores lower than a random negative,
// ties counted one half. Positives are flagged by LOW engagement, so values
// above 0.5 mean the score separates classes the intended way.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> positive);

struct ConfusionCounts {
  long flagged = 0;
  long true_positive = 0;
  long false_positive = 0;
  long false_negative = 0;
  long positives_total = 0;
  double threshold = 0;
};

struct RecallPrecision {
  ConfusionCounts counts;
  std::optional<double> recall;     // absent when there are no positives
  std::optional<double> precision;  // absent when nothing is flagged
};

// Flag set = the VeryLow quintile; positives are grades below the threshold.
RecallPrecision recall_precision(const QuintileAssignment& assignment,
                                 std::span<const double> grades, double threshold);

struct WeekClassification {
  std::optional<double> auc;  // absent when one class is empty
  RecallPrecision rp;
};

struct WeekEvaluation {
  int week = 0;
  std::optional<double> alignment_rho;
  std::optional<double> grade_rho;
  std::array<BoxSummary, 5> quintiles;
  WeekClassification at_50;
  WeekClassification at_40;
};

struct EvaluationReport {
  std::size_t cohort_size = 0;
  std::optional<double> coursewide_grade_rho;
  std::vector<WeekEvaluation> weeks;
};

struct EvaluationInput {
  std::vector<std::string> users;                  // sorted
  std::vector<std::vector<double>> weekly_scores;  // [week-1][user]
  std::vector<double> coursewide_scores;           // [user]
  std::vector<double> grades;                      // [user]
};

EvaluationReport evaluate(const EvaluationInput& input);

}  // namespace engage::evaluation
