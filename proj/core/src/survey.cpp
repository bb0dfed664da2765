#include "csi/survey.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "csi/errors.hpp"
#include "csi/normal.hpp"

namespace csi {

SurveyResult::SurveyResult(std::vector<AnswerOption> options) : options_(std::move(options)) {
  validate_options(options_);
}

void SurveyResult::record(const std::string& participant, std::uint32_t option_id) {
  if (option_id >= options_.size())
    throw ValidationError("survey response names unknown option " + std::to_string(option_id));
  if (!responses_.emplace(participant, option_id).second)
    throw ValidationError("participant " + participant + " already responded");
}

std::vector<double> SurveyResult::chosen_values() const {
  std::vector<double> out;
  out.reserve(responses_.size());
  for (const auto& [participant, option] : responses_) out.push_back(options_[option].value);
  return out;
}

double woc_mean(const SurveyResult& survey) {
  if (survey.empty()) throw InsufficientDataError("survey has no responses");
  const auto values = survey.chosen_values();
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<double> individual_abs_errors(const SurveyResult& survey, double truth) {
  auto values = survey.chosen_values();
  for (auto& v : values) v = std::abs(v - truth);
  return values;
}

double mae_individuals(const SurveyResult& survey, double truth) {
  if (!(truth > 0.0)) throw ValidationError("truth must be positive");
  if (survey.empty()) throw InsufficientDataError("survey has no responses");
  const auto errors = individual_abs_errors(survey, truth);
  return std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
}

ZTest one_tailed_z(std::span<const double> errors, double csi_abs_error) {
  const auto n = errors.size();
  if (n < 2) throw InsufficientDataError("z-test needs at least two individual errors");
  const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DegenerateSampleError("individual errors have zero variance");

  ZTest result;
  result.z = (mean - csi_abs_error) / (sd / std::sqrt(static_cast<double>(n)));
  // Keep p inside (0, 1) even where the tail underflows or rounds to 1.
  result.p = std::clamp(normal_upper_tail(result.z), std::numeric_limits<double>::denorm_min(),
                        std::nextafter(1.0, 0.0));
  return result;
}

ErrorReport error_report(double truth, const SurveyResult& survey, const DeliberationResult& result,
                         std::optional<double> baseline_estimate) {
  return error_report(truth, &survey, &result, baseline_estimate);
}

ErrorReport error_report(double truth, const SurveyResult* survey, const DeliberationResult* result,
                         std::optional<double> baseline_estimate) {
  if (!(truth > 0.0) || !std::isfinite(truth)) throw ValidationError("truth must be positive");
  ErrorReport r;
  r.truth = truth;
  if (survey != nullptr) {
    r.mae_individuals = mae_individuals(*survey, truth);
    r.mae_individuals_pct = *r.mae_individuals / truth;
    r.woc_estimate = woc_mean(*survey);
    r.woc_abs_error = std::abs(*r.woc_estimate - truth);
    r.woc_pct = *r.woc_abs_error / truth;
  }
  if (result != nullptr) {
    r.csi_estimate = result->final_estimate;
    r.csi_abs_error = std::abs(result->final_estimate - truth);
    r.csi_pct = *r.csi_abs_error / truth;
  }
  if (baseline_estimate) {
    r.baseline_estimate = *baseline_estimate;
    r.baseline_abs_error = std::abs(*baseline_estimate - truth);
    r.baseline_pct = *r.baseline_abs_error / truth;
  }
  if (survey != nullptr && result != nullptr && survey->size() >= 2) {
    try {
      const auto z = one_tailed_z(individual_abs_errors(*survey, truth), *r.csi_abs_error);
      r.z = z.z;
      r.p_one_tailed = z.p;
    } catch (const DegenerateSampleError&) {
      // Unanimous survey: no spread to test against.
    }
  }
  return r;
}

std::string format_table(const ErrorReport& r) {
  std::ostringstream out;
  out << "truth: " << r.truth << "\n";
  out << std::left << std::setw(34) << "method" << std::right << std::setw(12) << "estimate"
      << std::setw(12) << "abs error" << std::setw(9) << "error" << "\n";
  const auto row = [&](const char* name, std::optional<double> estimate, std::optional<double> err,
                       std::optional<double> pct) {
    if (!err) return;
    out << std::left << std::setw(34) << name << std::right << std::fixed << std::setprecision(1);
    if (estimate)
      out << std::setw(12) << *estimate;
    else
      out << std::setw(12) << "-";
    out << std::setw(12) << *err << std::setw(8) << std::setprecision(0) << std::round(*pct * 100.0)
        << "%\n";
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  };
  row("individuals (mean abs error)", std::nullopt, r.mae_individuals, r.mae_individuals_pct);
  row("external baseline", r.baseline_estimate, r.baseline_abs_error, r.baseline_pct);
  row("wisdom of crowd (survey mean)", r.woc_estimate, r.woc_abs_error, r.woc_pct);
  row("conversational swarm (CSI)", r.csi_estimate, r.csi_abs_error, r.csi_pct);
  if (r.z && r.p_one_tailed)
    out << "one-tailed z-test, CSI vs individuals: z = " << std::setprecision(4) << *r.z
        << ", p = " << std::setprecision(3) << *r.p_one_tailed << "\n";
  return out.str();
}

}  // namespace csi
