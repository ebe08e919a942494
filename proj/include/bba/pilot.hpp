#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bba/backend.hpp"
#include "bba/model.hpp"
#include "bba/prompts.hpp"

namespace bba {

enum class ProblemCategory {
  spatial_manipulation,
  propositional_reasoning,
  logical_deduction,
  algebraic_manipulation,
  quantitative_analysis,
};

std::string category_name(ProblemCategory c);
std::optional<ProblemCategory> category_from_name(const std::string& name);

struct CriticalStep {
  int id = 0;  // dense from 1 within a problem
  std::string description;

  bool operator==(const CriticalStep&) const = default;
};

struct StepMapping {
  std::optional<int> critical_id;  // nullopt = maps to no critical step
  std::string step_text;
  int token_count = 0;
};

using Tokenizer = std::function<int(const std::string&)>;

// Whitespace-plus-punctuation splitter; the default token counter.
Tokenizer default_tokenizer();

struct CategorizationResult {
  ProblemCategory category = ProblemCategory::logical_deduction;
  std::map<ProblemCategory, int> scores;
  std::vector<std::string> warnings;
};

// One scoring call ("category: score" lines, integer scores); argmax wins
// and ties break uniformly at random under `seed`. A category missing
// from the response scores 0 with a warning; a response with no parsable
// scores at all is an error carrying the raw text.
CategorizationResult categorize_problem(const Problem& p, const std::string& solution,
                                        ChatBackend& backend, const PromptLibrary& library,
                                        const std::string& model_id, unsigned seed);

struct CriticalStepsResult {
  std::vector<CriticalStep> steps;
  std::vector<std::string> notes;  // e.g. renumbering of a gapped list
};

// Parses a numbered list from the model response; gapped numbering is
// normalized to dense ids with a note; an empty list is an error.
CriticalStepsResult identify_critical_steps(const Problem& p, const std::string& gold_solution,
                                            ChatBackend& backend, const PromptLibrary& library,
                                            const std::string& model_id);

// Splits a generated solution into steps: numbered lines when present,
// otherwise blank-line paragraphs.
std::vector<std::string> segment_steps(const std::string& generated);

// One call assigning each generated step a critical-step id or none;
// token_count comes from the supplied tokenizer. An assignment naming an
// unknown critical id is an error.
std::vector<StepMapping> map_solution_steps(const std::string& generated,
                                            const std::vector<CriticalStep>& critical,
                                            ChatBackend& backend, const PromptLibrary& library,
                                            const std::string& model_id,
                                            const Tokenizer& tokenizer);

struct TokenAccounting {
  std::map<int, long> per_critical;  // every critical id, zeros included
  long unmapped_tokens = 0;
  long total_tokens = 0;
  // Mean over all critical steps; zero-token steps stay in the
  // denominator.
  double average = 0.0;
};

TokenAccounting tokens_per_critical_step(const std::vector<StepMapping>& mappings,
                                         int critical_count);

}  // namespace bba
