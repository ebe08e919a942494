#include "bba/pilot.hpp"

#include <algorithm>
#include <random>

#include "bba/errors.hpp"
#include "bba/util.hpp"

namespace bba {

namespace {

const std::pair<const char*, ProblemCategory> kCategories[] = {
    {"spatial manipulation", ProblemCategory::spatial_manipulation},
    {"propositional reasoning", ProblemCategory::propositional_reasoning},
    {"logical deduction", ProblemCategory::logical_deduction},
    {"algebraic manipulation", ProblemCategory::algebraic_manipulation},
    {"quantitative analysis", ProblemCategory::quantitative_analysis},
};

std::string canonical_spaces(const std::string& s) {
  std::string out = util::lowercase(util::normalize_whitespace(s));
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

ChatResponse annotation_call(ChatBackend& backend, const PromptLibrary& library,
                             const std::string& tpl_name, const std::string& model_id,
                             const std::map<std::string, std::string>& bindings) {
  ChatRequest req;
  req.model_id = model_id;
  req.temperature = 0.0;
  req.top_p = 1.0;
  req.max_tokens = 2048;
  req.messages.push_back(
      Message::user_text(render(library.pilot_template(tpl_name), bindings)));
  return backend.complete(req);
}

struct NumberedItem {
  int number = 0;
  std::string text;
};

std::vector<NumberedItem> parse_numbered(const std::string& text) {
  std::vector<NumberedItem> items;
  for (const std::string& raw : util::split_lines(text)) {
    std::string line = util::trim(raw);
    std::size_t i = 0;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
    if (i == 0 || i >= line.size()) continue;
    if (line[i] != '.' && line[i] != ')' && line[i] != ':') continue;
    std::string body = util::trim(line.substr(i + 1));
    if (body.empty()) continue;
    items.push_back({std::stoi(line.substr(0, i)), body});
  }
  return items;
}

}  // namespace

std::string category_name(ProblemCategory c) {
  switch (c) {
    case ProblemCategory::spatial_manipulation: return "spatial_manipulation";
    case ProblemCategory::propositional_reasoning: return "propositional_reasoning";
    case ProblemCategory::logical_deduction: return "logical_deduction";
    case ProblemCategory::algebraic_manipulation: return "algebraic_manipulation";
    case ProblemCategory::quantitative_analysis: return "quantitative_analysis";
  }
  return "logical_deduction";
}

std::optional<ProblemCategory> category_from_name(const std::string& name) {
  std::string canon = canonical_spaces(name);
  for (const auto& [label, category] : kCategories) {
    if (canon == label) return category;
  }
  return std::nullopt;
}

Tokenizer default_tokenizer() {
  return [](const std::string& text) { return util::approx_token_count(text); };
}

CategorizationResult categorize_problem(const Problem& p, const std::string& solution,
                                        ChatBackend& backend, const PromptLibrary& library,
                                        const std::string& model_id, unsigned seed) {
  ChatResponse resp = annotation_call(backend, library, "categorize", model_id,
                                      {{"question", p.question}, {"solution", solution}});

  CategorizationResult result;
  bool any_parsed = false;
  for (const std::string& raw : util::split_lines(resp.text)) {
    std::size_t colon = raw.find(':');
    if (colon == std::string::npos) continue;
    std::string head = canonical_spaces(raw.substr(0, colon));
    // Tolerate list markers before the category name.
    while (!head.empty() && (head.front() == '-' || head.front() == '*' ||
                             (head.front() >= '0' && head.front() <= '9') ||
                             head.front() == '.' || head.front() == ' '))
      head.erase(head.begin());
    std::string tail = util::trim(raw.substr(colon + 1));
    for (const auto& [label, category] : kCategories) {
      if (head != label) continue;
      try {
        result.scores[category] = std::stoi(tail);
        any_parsed = true;
      } catch (...) {
        // score not an integer; leave unparsed
      }
    }
  }
  if (!any_parsed)
    throw Error("categorize_problem: no category scores in response: " + resp.text);

  for (const auto& [label, category] : kCategories) {
    if (!result.scores.count(category)) {
      result.scores[category] = 0;
      result.warnings.push_back(std::string("category missing from response, scored 0: ") +
                                label);
    }
  }

  int best = std::max_element(result.scores.begin(), result.scores.end(),
                              [](const auto& a, const auto& b) { return a.second < b.second; })
                 ->second;
  std::vector<ProblemCategory> tied;
  for (const auto& [label, category] : kCategories) {
    if (result.scores.at(category) == best) tied.push_back(category);
  }
  if (tied.size() == 1) {
    result.category = tied[0];
  } else {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
    result.category = tied[pick(rng)];
  }
  return result;
}

CriticalStepsResult identify_critical_steps(const Problem& p, const std::string& gold_solution,
                                            ChatBackend& backend, const PromptLibrary& library,
                                            const std::string& model_id) {
  ChatResponse resp = annotation_call(backend, library, "critical_steps", model_id,
                                      {{"question", p.question}, {"solution", gold_solution}});
  std::vector<NumberedItem> items = parse_numbered(resp.text);
  if (items.empty())
    throw Error("identify_critical_steps: response contains no numbered list: " + resp.text);

  CriticalStepsResult result;
  bool renumbered = false;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].number != static_cast<int>(i + 1)) renumbered = true;
    result.steps.push_back({static_cast<int>(i + 1), items[i].text});
  }
  if (renumbered)
    result.notes.push_back("model numbering was gapped or reordered; ids renumbered densely");
  return result;
}

std::vector<std::string> segment_steps(const std::string& generated) {
  std::vector<NumberedItem> numbered = parse_numbered(generated);
  if (!numbered.empty()) {
    std::vector<std::string> steps;
    steps.reserve(numbered.size());
    for (const NumberedItem& item : numbered) steps.push_back(item.text);
    return steps;
  }
  std::vector<std::string> steps;
  std::string current;
  for (const std::string& line : util::split_lines(generated)) {
    if (util::trim(line).empty()) {
      if (!util::trim(current).empty()) steps.push_back(util::trim(current));
      current.clear();
    } else {
      if (!current.empty()) current += "\n";
      current += line;
    }
  }
  if (!util::trim(current).empty()) steps.push_back(util::trim(current));
  return steps;
}

std::vector<StepMapping> map_solution_steps(const std::string& generated,
                                            const std::vector<CriticalStep>& critical,
                                            ChatBackend& backend, const PromptLibrary& library,
                                            const std::string& model_id,
                                            const Tokenizer& tokenizer) {
  if (critical.empty()) throw Error("map_solution_steps: critical step list is empty");
  std::vector<std::string> steps = segment_steps(generated);

  std::string critical_text;
  for (const CriticalStep& step : critical)
    critical_text += std::to_string(step.id) + ". " + step.description + "\n";
  std::string steps_text;
  for (std::size_t i = 0; i < steps.size(); ++i)
    steps_text += std::to_string(i + 1) + ". " + steps[i] + "\n";

  ChatResponse resp = annotation_call(backend, library, "step_mapping", model_id,
                                      {{"critical", critical_text}, {"steps", steps_text}});

  std::vector<StepMapping> mappings;
  mappings.reserve(steps.size());
  for (const std::string& step : steps)
    mappings.push_back({std::nullopt, step, tokenizer(step)});

  for (const std::string& raw : util::split_lines(resp.text)) {
    std::string line = util::trim(raw);
    std::size_t colon = line.find_first_of(":->");
    if (colon == std::string::npos) continue;
    int step_number = 0;
    try {
      step_number = std::stoi(line.substr(0, colon));
    } catch (...) {
      continue;
    }
    if (step_number < 1 || step_number > static_cast<int>(steps.size())) continue;
    std::string target = util::trim(line.substr(colon));
    while (!target.empty() && (target.front() == ':' || target.front() == '-' ||
                               target.front() == '>' || target.front() == ' '))
      target.erase(target.begin());
    if (util::lowercase(target).rfind("none", 0) == 0) {
      mappings[step_number - 1].critical_id = std::nullopt;
      continue;
    }
    int critical_id = 0;
    try {
      critical_id = std::stoi(target);
    } catch (...) {
      continue;
    }
    if (critical_id < 1 || critical_id > static_cast<int>(critical.size()))
      throw Error("map_solution_steps: assignment references unknown critical step " +
                  std::to_string(critical_id));
    mappings[step_number - 1].critical_id = critical_id;
  }
  return mappings;
}

TokenAccounting tokens_per_critical_step(const std::vector<StepMapping>& mappings,
                                         int critical_count) {
  TokenAccounting accounting;
  for (int id = 1; id <= critical_count; ++id) accounting.per_critical[id] = 0;
  for (const StepMapping& mapping : mappings) {
    accounting.total_tokens += mapping.token_count;
    if (mapping.critical_id.has_value()) {
      accounting.per_critical[*mapping.critical_id] += mapping.token_count;
    } else {
      accounting.unmapped_tokens += mapping.token_count;
    }
  }
  if (critical_count > 0) {
    long mapped = accounting.total_tokens - accounting.unmapped_tokens;
    accounting.average = static_cast<double>(mapped) / critical_count;
  }
  return accounting;
}

}  // namespace bba
