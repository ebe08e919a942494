#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bba/model.hpp"

namespace bba {

enum class ExtractionSource { delimiters, boxed, label_keyword, last_number, none };

std::string extraction_source_name(ExtractionSource s);

struct ExtractionResult {
  std::optional<GoldAnswer> answer;
  ExtractionSource source = ExtractionSource::none;
  std::string raw_span;
};

// Answer delimiters shared with the prompt templates.
inline constexpr const char* kAnswerOpen = "<answer>";
inline constexpr const char* kAnswerClose = "</answer>";

// Heuristic answer extraction from a model rationale. Tries, in order:
// <answer>...</answer> delimiters; \boxed{...} (geometry); label keywords
// scanned from the end (chess / molecules); last numeric token (geometry).
// Total function: a missing answer is ExtractionSource::none, not an error.
ExtractionResult extract_answer(const std::string& text, TaskDomain domain);

// Content of the last brace-balanced \boxed{...}, when present.
std::optional<std::string> extract_boxed(const std::string& text);

// String-level normalization of free-form math answers. Applies, in order:
// outer whitespace/$ stripping, \left \right removal, tfrac/dfrac -> frac,
// bracing of bare \frac and \sqrt arguments, \! and thin-space removal,
// trailing \% and unit-word removal after a number, thousands-comma
// removal, and .x -> 0.x. Idempotent.
std::string normalize_math(const std::string& s);

// normalize_math(a) == normalize_math(b). Purely string-level; "0.5" and
// "\frac{1}{2}" are NOT equivalent.
bool math_equiv(const std::string& a, const std::string& b);

// True when the predicted answer matches gold under the domain's rule
// (math_equiv for free-form, label equality otherwise).
bool answers_match(const GoldAnswer& predicted, const GoldAnswer& gold);

struct CellStat {
  int total = 0;
  int correct = 0;
  double accuracy() const { return total == 0 ? 0.0 : 100.0 * correct / total; }
};

struct MetricsTable {
  // method name -> domain -> counts
  std::map<std::string, std::map<TaskDomain, CellStat>> per_dataset;
  // method name -> domain -> difficulty level -> counts
  std::map<std::string, std::map<TaskDomain, std::map<int, CellStat>>> per_level;

  // Pooled accuracy over every scored item of the method (the headline
  // Avg column convention: total correct / total items across datasets).
  double average(const std::string& method) const;
  // Unweighted mean of the per-dataset accuracies, for comparison.
  double macro_average(const std::string& method) const;
};

// Scores runs against their problems. Missing final answers count as
// incorrect; an unresolved problem_id is an error.
MetricsTable score_runs(const std::vector<PipelineRun>& runs,
                        const std::vector<Problem>& problems);

// 100 * (ours - baseline) / baseline; baseline must be positive.
double relative_improvement(double ours, double baseline);

}  // namespace bba
