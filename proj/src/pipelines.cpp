#include "bba/pipelines.hpp"

#include <atomic>
#include <chrono>
#include <future>
#include <thread>

#include "bba/errors.hpp"
#include "bba/scoring.hpp"
#include "bba/util.hpp"

namespace bba {

namespace {

struct Ctx {
  const Problem& p;
  const PipelineConfig& cfg;
  PipelineRun run;

  Ctx(const Problem& problem, const PipelineConfig& config, MethodId method)
      : p(problem), cfg(config) {
    if (!config.backend) throw Error("PipelineConfig.backend is not set");
    if (!config.prompts) throw Error("PipelineConfig.prompts is not set");
    run.method = method;
    run.problem_id = problem.id;
  }

  ChatRequest request_for(Stage stage, const std::vector<ReasoningChain>& prior,
                          const std::map<std::string, std::string>& extra = {}) const {
    return build_stage_prompt(p, run.method, stage, prior, *cfg.prompts, cfg.model_id,
                              cfg.decoding.temperature, cfg.decoding.top_p,
                              cfg.decoding.max_tokens, extra);
  }

  ChatResponse record(ChatRequest req) {
    ChatResponse resp = cfg.backend->complete(req);
    run.usage += resp;
    run.calls.emplace_back(std::move(req), resp);
    return resp;
  }

  ChatResponse call(Stage stage, const std::vector<ReasoningChain>& prior,
                    const std::map<std::string, std::string>& extra = {}) {
    return record(request_for(stage, prior, extra));
  }

  ReasoningChain add_chain(Modality modality, const ChatResponse& resp) {
    ReasoningChain chain;
    chain.modality = modality;
    chain.text = resp.text;
    chain.token_count = resp.completion_tokens;
    ExtractionResult extracted = extract_answer(resp.text, p.domain);
    chain.extracted_answer = extracted.answer;
    run.chains.push_back(chain);
    return chain;
  }

  // Extracts the final answer from the last chain and applies the
  // delimiter-fallback policy.
  void finalize_from(const ReasoningChain& chain) {
    ExtractionResult extracted = extract_answer(chain.text, p.domain);
    if (extracted.source != ExtractionSource::delimiters)
      run.flags.push_back("delimiter_missing");
    if (extracted.answer.has_value()) {
      run.final_answer = extracted.answer;
      run.correct = answers_match(*extracted.answer, p.gold);
    } else {
      run.failed = true;
      run.error = "no answer could be extracted from the final chain";
    }
  }
};

// Runs `body`, preserving the partial trace when a transport-level
// failure aborts a stage.
template <typename Body>
PipelineRun execute(const Problem& p, const PipelineConfig& cfg, MethodId method,
                    Body&& body) {
  Ctx ctx(p, cfg, method);
  auto start = std::chrono::steady_clock::now();
  try {
    body(ctx);
  } catch (const TransportError& ex) {
    ctx.run.failed = true;
    ctx.run.error = ex.what();
  } catch (const CacheMissError& ex) {
    ctx.run.failed = true;
    ctx.run.error = ex.what();
  }
  ctx.run.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return std::move(ctx.run);
}

// The two elicitation calls, optionally concurrent, always recorded in
// canonical order (vision first).
std::pair<ReasoningChain, ReasoningChain> elicit_both(Ctx& ctx) {
  ChatRequest req_v = ctx.request_for(Stage::elicit_vision, {});
  ChatRequest req_d = ctx.request_for(Stage::elicit_dsl, {});
  ChatResponse resp_v;
  ChatResponse resp_d;
  if (ctx.cfg.parallel_elicit) {
    auto fut_v = std::async(std::launch::async,
                            [&] { return ctx.cfg.backend->complete(req_v); });
    auto fut_d = std::async(std::launch::async,
                            [&] { return ctx.cfg.backend->complete(req_d); });
    // Vision result consumed first so a vision failure leaves no elicit
    // call in the trace, matching sequential semantics.
    resp_v = fut_v.get();
    ctx.run.usage += resp_v;
    ctx.run.calls.emplace_back(std::move(req_v), resp_v);
    resp_d = fut_d.get();
    ctx.run.usage += resp_d;
    ctx.run.calls.emplace_back(std::move(req_d), resp_d);
  } else {
    resp_v = ctx.record(std::move(req_v));
    resp_d = ctx.record(std::move(req_d));
  }
  ReasoningChain r_v = ctx.add_chain(Modality::vision, resp_v);
  ReasoningChain r_d = ctx.add_chain(Modality::dsl, resp_d);
  return {r_v, r_d};
}

// The fused diagnose+align call (experimental 3-call mode).
ChatResponse fused_align_call(Ctx& ctx) {
  const PromptTemplate& tpl = ctx.cfg.prompts->fused_template(ctx.p.domain);
  std::map<std::string, std::string> bindings;
  for (const std::string& name : tpl.required_placeholders) {
    if (name == "question") bindings[name] = ctx.p.question;
    else if (name == "chain_v") bindings[name] = ctx.run.chains[0].text;
    else if (name == "chain_d") bindings[name] = ctx.run.chains[1].text;
    else if (name == "fewshot")
      bindings[name] = render_fewshot_block(ctx.cfg.prompts->fewshot_pairs());
    else
      throw PromptError("fused template uses unsupported placeholder " + name);
  }
  ChatRequest req;
  req.model_id = ctx.cfg.model_id;
  req.temperature = ctx.cfg.decoding.temperature;
  req.top_p = ctx.cfg.decoding.top_p;
  req.max_tokens = ctx.cfg.decoding.max_tokens;
  req.messages.push_back(Message::system(ctx.cfg.prompts->system_instruction(ctx.p.domain)));
  req.messages.push_back(Message::user_text(render(tpl, bindings)));
  return ctx.record(std::move(req));
}

PipelineRun run_bba_family(const Problem& p, const PipelineConfig& cfg, MethodId method) {
  return execute(p, cfg, method, [&](Ctx& ctx) {
    auto [r_v, r_d] = elicit_both(ctx);
    bool with_diagnosis = method.kind != MethodId::Kind::bba_minus_diagnostic;
    if (with_diagnosis && ctx.cfg.fuse_diagnose_align &&
        method.kind == MethodId::Kind::bba) {
      ChatResponse fused = fused_align_call(ctx);
      ReasoningChain aligned = ctx.add_chain(Modality::aligned, fused);
      ctx.finalize_from(aligned);
      return;
    }
    std::vector<ReasoningChain> prior = {r_v, r_d};
    if (with_diagnosis) {
      std::map<std::string, std::string> extra;
      if (!ctx.cfg.diagnose_includes_question) extra["question"] = "(withheld)";
      ChatResponse diag = ctx.call(Stage::diagnose, prior, extra);
      prior.push_back(ctx.add_chain(Modality::diagnosis, diag));
    }
    ChatResponse align = ctx.call(Stage::align, prior);
    ReasoningChain aligned = ctx.add_chain(Modality::aligned, align);
    ctx.finalize_from(aligned);
  });
}

// Parses "1. text" / "2) text" items; returns empty when none found.
std::vector<std::string> parse_numbered_items(const std::string& text) {
  std::vector<std::string> items;
  for (const std::string& raw : util::split_lines(text)) {
    std::string line = util::trim(raw);
    std::size_t i = 0;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
    if (i == 0 || i >= line.size()) continue;
    if (line[i] != '.' && line[i] != ')') continue;
    std::string item = util::trim(line.substr(i + 1));
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

PipelineRun run_bba(const Problem& p, const PipelineConfig& cfg) {
  return run_bba_family(p, cfg, MethodId{MethodId::Kind::bba, 0});
}

PipelineRun run_bba_variant(const Problem& p, const PipelineConfig& cfg, BbaVariant variant) {
  MethodId method;
  switch (variant) {
    case BbaVariant::minus_diagnostic:
      method.kind = MethodId::Kind::bba_minus_diagnostic;
      break;
    case BbaVariant::minus_visual:
      method.kind = MethodId::Kind::bba_minus_visual;
      break;
    case BbaVariant::minus_dsl:
      method.kind = MethodId::Kind::bba_minus_dsl;
      break;
  }
  return run_bba_family(p, cfg, method);
}

PipelineRun run_cot(const Problem& p, const PipelineConfig& cfg, CotMode mode) {
  MethodId method;
  Stage stage = Stage::elicit_combined;
  Modality modality = Modality::combined;
  switch (mode) {
    case CotMode::v:
      method.kind = MethodId::Kind::cot_v;
      stage = Stage::elicit_vision;
      modality = Modality::vision;
      break;
    case CotMode::d:
      method.kind = MethodId::Kind::cot_d;
      stage = Stage::elicit_dsl;
      modality = Modality::dsl;
      break;
    case CotMode::m:
      method.kind = MethodId::Kind::cot_m;
      stage = Stage::elicit_combined;
      modality = Modality::combined;
      break;
  }
  return execute(p, cfg, method, [&](Ctx& ctx) {
    ChatResponse resp = ctx.call(stage, {});
    ReasoningChain chain = ctx.add_chain(modality, resp);
    ctx.finalize_from(chain);
  });
}

PipelineRun run_plan_and_solve(const Problem& p, const PipelineConfig& cfg) {
  return execute(p, cfg, MethodId{MethodId::Kind::plan_and_solve, 0}, [&](Ctx& ctx) {
    ChatResponse plan = ctx.call(Stage::plan, {});
    ctx.add_chain(Modality::dsl, plan);
    ChatResponse solution = ctx.call(Stage::solve, {}, {{"plan", plan.text}});
    ReasoningChain chain = ctx.add_chain(Modality::dsl, solution);
    ctx.finalize_from(chain);
  });
}

PipelineRun run_least_to_most(const Problem& p, const PipelineConfig& cfg) {
  return execute(p, cfg, MethodId{MethodId::Kind::least_to_most, 0}, [&](Ctx& ctx) {
    constexpr int kSubproblemCap = 6;
    ChatResponse decomposition = ctx.call(Stage::decompose, {});
    ctx.add_chain(Modality::dsl, decomposition);
    std::vector<std::string> subproblems = parse_numbered_items(decomposition.text);
    if (subproblems.empty()) {
      subproblems = {p.question};
      ctx.run.flags.push_back("decompose_fallback");
    }
    if (subproblems.size() > kSubproblemCap) {
      subproblems.resize(kSubproblemCap);
      ctx.run.flags.push_back("subproblem_cap");
    }
    std::string answers = "(none yet)";
    ReasoningChain last;
    for (std::size_t k = 0; k < subproblems.size(); ++k) {
      ChatResponse resp = ctx.call(Stage::solve, {},
                                   {{"subproblem", subproblems[k]}, {"answers", answers}});
      last = ctx.add_chain(Modality::dsl, resp);
      if (k == 0) answers.clear();
      if (!answers.empty()) answers += "\n\n";
      answers += std::to_string(k + 1) + ". " + resp.text;
    }
    ctx.finalize_from(last);
  });
}

PipelineRun run_ccot(const Problem& p, const PipelineConfig& cfg) {
  return execute(p, cfg, MethodId{MethodId::Kind::ccot, 0}, [&](Ctx& ctx) {
    ChatResponse description = ctx.call(Stage::plan, {});
    ctx.add_chain(Modality::combined, description);
    ChatResponse answer = ctx.call(Stage::solve, {}, {{"description", description.text}});
    ReasoningChain chain = ctx.add_chain(Modality::combined, answer);
    ctx.finalize_from(chain);
  });
}

PipelineRun run_ddcot(const Problem& p, const PipelineConfig& cfg) {
  return execute(p, cfg, MethodId{MethodId::Kind::ddcot, 0}, [&](Ctx& ctx) {
    ChatResponse decomposition = ctx.call(Stage::decompose, {});
    ctx.add_chain(Modality::combined, decomposition);
    std::vector<std::string> items = parse_numbered_items(decomposition.text);
    bool any_unmarked = false;
    if (items.empty()) {
      items = {util::trim(decomposition.text)};
      any_unmarked = true;
    }
    std::string marked;
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::string lower = util::lowercase(items[i]);
      std::string kind;
      std::string body = items[i];
      if (lower.find("[recognition]") != std::string::npos) {
        kind = "recognition";
      } else if (lower.find("[reasoning]") != std::string::npos) {
        kind = "reasoning";
      } else {
        kind = "reasoning";  // default for unmarked sub-questions
        any_unmarked = true;
      }
      if (!marked.empty()) marked += "\n";
      marked += std::to_string(i + 1) + ". [" + kind + "] " + body;
    }
    if (any_unmarked) ctx.run.flags.push_back("unmarked_subquestion");
    ChatResponse answer = ctx.call(Stage::solve, {}, {{"subquestions", marked}});
    ReasoningChain chain = ctx.add_chain(Modality::combined, answer);
    ctx.finalize_from(chain);
  });
}

PipelineRun run_self_refine(const Problem& p, const PipelineConfig& cfg, int turns) {
  if (turns < 2 || turns > 8)
    throw Error("self_refine turns must be in [2, 8], got " + std::to_string(turns));
  return execute(p, cfg, MethodId::self_refine(turns), [&](Ctx& ctx) {
    ChatResponse initial = ctx.call(Stage::elicit_combined, {});
    ReasoningChain draft = ctx.add_chain(Modality::combined, initial);
    for (int cycle = 1; cycle < turns; ++cycle) {
      ChatResponse feedback = ctx.call(Stage::feedback, {}, {{"draft", draft.text}});
      ctx.add_chain(Modality::diagnosis, feedback);
      ChatResponse refined = ctx.call(Stage::refine, {},
                                      {{"draft", draft.text}, {"feedback", feedback.text}});
      draft = ctx.add_chain(Modality::combined, refined);
    }
    ctx.finalize_from(draft);
  });
}

PipelineRun run_method(const Problem& p, const MethodId& method, const PipelineConfig& cfg) {
  switch (method.kind) {
    case MethodId::Kind::bba: return run_bba(p, cfg);
    case MethodId::Kind::bba_minus_diagnostic:
      return run_bba_variant(p, cfg, BbaVariant::minus_diagnostic);
    case MethodId::Kind::bba_minus_visual:
      return run_bba_variant(p, cfg, BbaVariant::minus_visual);
    case MethodId::Kind::bba_minus_dsl:
      return run_bba_variant(p, cfg, BbaVariant::minus_dsl);
    case MethodId::Kind::cot_v: return run_cot(p, cfg, CotMode::v);
    case MethodId::Kind::cot_d: return run_cot(p, cfg, CotMode::d);
    case MethodId::Kind::cot_m: return run_cot(p, cfg, CotMode::m);
    case MethodId::Kind::plan_and_solve: return run_plan_and_solve(p, cfg);
    case MethodId::Kind::least_to_most: return run_least_to_most(p, cfg);
    case MethodId::Kind::ccot: return run_ccot(p, cfg);
    case MethodId::Kind::ddcot: return run_ddcot(p, cfg);
    case MethodId::Kind::self_refine: return run_self_refine(p, cfg, method.self_refine_turns);
  }
  throw Error("unknown method");
}

std::vector<PipelineRun> run_batch(const std::vector<Problem>& problems,
                                   const MethodId& method, const PipelineConfig& cfg,
                                   int concurrency) {
  if (concurrency < 1) throw Error("run_batch: concurrency must be >= 1");
  std::vector<PipelineRun> results(problems.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= problems.size()) return;
      try {
        results[i] = run_method(problems[i], method, cfg);
      } catch (const std::exception& ex) {
        PipelineRun failed;
        failed.method = method;
        failed.problem_id = problems[i].id;
        failed.failed = true;
        failed.error = ex.what();
        results[i] = std::move(failed);
      }
    }
  };

  int n_threads = std::min<std::size_t>(concurrency, problems.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return results;
}

int declared_call_budget(const MethodId& m) {
  switch (m.kind) {
    case MethodId::Kind::bba:
    case MethodId::Kind::bba_minus_visual:
    case MethodId::Kind::bba_minus_dsl:
      return 4;
    case MethodId::Kind::bba_minus_diagnostic: return 3;
    case MethodId::Kind::cot_v:
    case MethodId::Kind::cot_d:
    case MethodId::Kind::cot_m:
      return 1;
    case MethodId::Kind::plan_and_solve:
    case MethodId::Kind::ccot:
    case MethodId::Kind::ddcot:
      return 2;
    case MethodId::Kind::least_to_most: return 2;  // 1 + k, k >= 1
    case MethodId::Kind::self_refine: return 1 + 2 * (m.self_refine_turns - 1);
  }
  return 0;
}

}  // namespace bba
