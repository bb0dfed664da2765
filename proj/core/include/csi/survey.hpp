#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csi/config.hpp"
#include "csi/sentiment.hpp"

namespace csi {

/// Baseline arm: one independent pick per participant.
class SurveyResult {
 public:
  SurveyResult() = default;
  explicit SurveyResult(std::vector<AnswerOption> options);

  /// Throws ValidationError for a repeat respondent or an unknown option.
  void record(const std::string& participant, std::uint32_t option_id);

  const std::map<std::string, std::uint32_t>& responses() const { return responses_; }
  const std::vector<AnswerOption>& options() const { return options_; }
  bool empty() const { return responses_.empty(); }
  std::size_t size() const { return responses_.size(); }

  /// Chosen option values in participant-id order.
  std::vector<double> chosen_values() const;

  bool operator==(const SurveyResult&) const = default;

 private:
  std::vector<AnswerOption> options_;
  std::map<std::string, std::uint32_t> responses_;
};

/// Wisdom-of-crowd mean. Throws InsufficientDataError on an empty survey.
double woc_mean(const SurveyResult& survey);

/// Mean of |chosen value - truth| over respondents.
double mae_individuals(const SurveyResult& survey, double truth);

std::vector<double> individual_abs_errors(const SurveyResult& survey, double truth);

struct ZTest {
  double z = 0.0;
  double p = 0.5;
};

/// One-sample upper-tail z-test of whether the CSI error is below the mean
/// individual error:
///   z = (mean(errors) - csi_abs_error) / (sd(errors) / sqrt(n)),  sd with n-1
///   p = P(Z > z)
///
/// Throws InsufficientDataError for n < 2, DegenerateSampleError when all
/// errors are equal.
ZTest one_tailed_z(std::span<const double> individual_abs_errors, double csi_abs_error);

/// Error of every estimation method against the truth, one row per method
/// compared. Percentages are fractions of truth (0.124, not 12.4) and are
/// never rounded here.
///
/// Survey-derived fields are absent when no survey arm ran, CSI fields when
/// no deliberation ran, and the z-test when either is missing or the
/// individual errors have zero variance.
struct ErrorReport {
  double truth = 0.0;

  std::optional<double> mae_individuals;
  std::optional<double> mae_individuals_pct;

  std::optional<double> woc_estimate;
  std::optional<double> woc_abs_error;
  std::optional<double> woc_pct;

  std::optional<double> csi_estimate;
  std::optional<double> csi_abs_error;
  std::optional<double> csi_pct;

  /// An external single-shot estimate, e.g. a language model's answer.
  std::optional<double> baseline_estimate;
  std::optional<double> baseline_abs_error;
  std::optional<double> baseline_pct;

  std::optional<double> z;
  std::optional<double> p_one_tailed;

  bool operator==(const ErrorReport&) const = default;
};

/// Throws ValidationError unless truth > 0.
ErrorReport error_report(double truth, const SurveyResult& survey, const DeliberationResult& result,
                         std::optional<double> baseline_estimate = std::nullopt);

/// Same, for experiments that ran only some arms.
ErrorReport error_report(double truth, const SurveyResult* survey, const DeliberationResult* result,
                         std::optional<double> baseline_estimate = std::nullopt);

/// Human-readable comparison table, percentages rounded to whole numbers.
std::string format_table(const ErrorReport& report);

}  // namespace csi
