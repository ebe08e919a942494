#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bba/backend.hpp"
#include "bba/model.hpp"
#include "bba/prompts.hpp"

namespace bba {

struct DecodingParams {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 2048;
};

struct PipelineConfig {
  std::shared_ptr<ChatBackend> backend;
  std::shared_ptr<const PromptLibrary> prompts;
  std::string model_id = "gpt-4-vision-preview";
  DecodingParams decoding;
  // Run the two elicitation calls concurrently; the trace records them in
  // canonical order either way.
  bool parallel_elicit = false;
  int self_refine_turns = 2;
  // Experimental: merge diagnose and align into one call (3 calls total).
  bool fuse_diagnose_align = false;
  // The diagnose call sees the question text by default; clear this to
  // compare the chains in isolation.
  bool diagnose_includes_question = true;
};

enum class BbaVariant { minus_diagnostic, minus_visual, minus_dsl };

enum class CotMode { v, d, m };

// Full method: elicit per modality, diagnose, align. 4 calls.
PipelineRun run_bba(const Problem& p, const PipelineConfig& cfg);

// Ablations: -diagnostic (3 calls, align sees no diagnosis), -visual and
// -dsl (4 calls, the modality is removed from every stage).
PipelineRun run_bba_variant(const Problem& p, const PipelineConfig& cfg, BbaVariant variant);

// Single chain-of-thought call: v = image only, d = DSL only, m = both.
PipelineRun run_cot(const Problem& p, const PipelineConfig& cfg, CotMode mode);

// Plan, then solve with the plan injected. 2 calls, DSL only.
PipelineRun run_plan_and_solve(const Problem& p, const PipelineConfig& cfg);

// Decompose into numbered subproblems (capped at 6), then one call per
// subproblem carrying all prior sub-answers. 1+k calls.
PipelineRun run_least_to_most(const Problem& p, const PipelineConfig& cfg);

// Structured scene description anchored on the DSL, then answer. 2 calls.
PipelineRun run_ccot(const Problem& p, const PipelineConfig& cfg);

// Sub-question decomposition marked recognition/reasoning, then a joint
// answering call. 2 calls.
PipelineRun run_ddcot(const Problem& p, const PipelineConfig& cfg);

// Initial answer plus (turns - 1) feedback/refine cycles: 1 + 2(turns-1)
// calls.
PipelineRun run_self_refine(const Problem& p, const PipelineConfig& cfg, int turns);

// Dispatch by MethodId.
PipelineRun run_method(const Problem& p, const MethodId& method, const PipelineConfig& cfg);

// Bounded-concurrency fan-out over problems. Results come back in input
// order; per-problem failures are recorded in place and never abort the
// batch.
std::vector<PipelineRun> run_batch(const std::vector<Problem>& problems,
                                   const MethodId& method, const PipelineConfig& cfg,
                                   int concurrency);

// Declared number of model calls for a method (least_to_most reports the
// minimum: 1 decomposition call + 1).
int declared_call_budget(const MethodId& m);

}  // namespace bba
