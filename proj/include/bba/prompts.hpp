#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "bba/chat.hpp"
#include "bba/model.hpp"

namespace bba {

enum class Stage {
  elicit_vision,
  elicit_dsl,
  elicit_combined,
  diagnose,
  align,
  plan,
  solve,
  decompose,
  feedback,
  refine,
};

std::string stage_name(Stage s);

// Stages a method executes, in call order. self_refine lists one cycle;
// the pipeline repeats feedback/refine.
std::vector<Stage> method_stages(const MethodId& m);

struct PromptTemplate {
  std::string id;  // "<domain>.<method>.<stage>"
  std::string body;
  std::set<std::string> required_placeholders;  // names found in body
};

// Single-pass substitution of {name} markers. Bindings must cover every
// required placeholder and contain no key absent from the template;
// bound values are emitted verbatim and never re-expanded.
std::string render(const PromptTemplate& tpl,
                   const std::map<std::string, std::string>& bindings);

struct FewShotPair {
  std::string smiles;
  ClassLabel label = ClassLabel::non_mutagenic;
};

// True iff no pair's SMILES equals any problem's dsl after whitespace
// normalization. All problems must be molecules.
bool check_fewshot_leakage(const std::vector<FewShotPair>& pairs,
                           const std::vector<Problem>& problems);

// The "SMILES: ... / Category: ..." block injected at {fewshot}.
std::string render_fewshot_block(const std::vector<FewShotPair>& pairs);

// Registry of stage templates, per-domain system instructions, and the
// fixed molecular few-shot pairs, loaded from a directory of
// "<domain>.<method>.<stage>.txt" assets.
class PromptLibrary {
 public:
  // Loads every template under `prompt_dir` plus the few-shot pairs from
  // `fewshot_path` (JSON list of {smiles, label}).
  static std::shared_ptr<const PromptLibrary> load(const std::string& prompt_dir,
                                                   const std::string& fewshot_path);
  // Loads from the compiled-in default asset locations.
  static std::shared_ptr<const PromptLibrary> load_default();

  bool has_template(TaskDomain domain, const MethodId& method, Stage stage) const;
  const PromptTemplate& stage_template(TaskDomain domain, const MethodId& method,
                                       Stage stage) const;
  const std::string& system_instruction(TaskDomain domain) const;
  // Fused diagnose+align template (experimental single-call mode).
  const PromptTemplate& fused_template(TaskDomain domain) const;
  // Pilot-annotation prompts: "categorize", "critical_steps", "step_mapping".
  const PromptTemplate& pilot_template(const std::string& name) const;
  const std::vector<FewShotPair>& fewshot_pairs() const { return fewshot_; }

 private:
  std::map<std::string, PromptTemplate> templates_;
  std::map<TaskDomain, std::string> system_;
  std::vector<FewShotPair> fewshot_;
};

struct StageRequest {
  // Prior chains a stage consumes, keyed by what the templates need.
  const std::vector<ReasoningChain>* prior = nullptr;
  // Extra stage products referenced by baseline templates: plan,
  // description, subquestions, answers, draft, feedback, subproblem.
  std::map<std::string, std::string> extra;
};

// Builds the full ChatRequest for one pipeline stage: per-domain system
// instruction, rendered stage template, and the image attached exactly
// where the (method, stage) pair calls for it.
ChatRequest build_stage_prompt(const Problem& p, const MethodId& method, Stage stage,
                               const std::vector<ReasoningChain>& prior,
                               const PromptLibrary& library, const std::string& model_id,
                               double temperature, double top_p, int max_tokens,
                               const std::map<std::string, std::string>& extra = {});

// True when the (method, stage) pair attaches the problem image.
bool stage_attaches_image(const MethodId& method, Stage stage);

}  // namespace bba
