#include "bba/prompts.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include <json.hpp>

#include "bba/errors.hpp"
#include "bba/util.hpp"

#ifndef BBA_DEFAULT_ASSET_DIR
#define BBA_DEFAULT_ASSET_DIR "assets"
#endif

namespace bba {

namespace {

namespace fs = std::filesystem;

// Placeholder vocabulary; {word} sequences outside this set are literal text.
const std::set<std::string>& known_placeholders() {
  static const std::set<std::string> names = {
      "question", "dsl",     "chain_v",      "chain_d", "diagnosis",
      "fewshot",  "plan",    "description",  "answers", "draft",
      "feedback", "subproblem", "subquestions", "solution", "steps",
      "critical",
  };
  return names;
}

std::set<std::string> scan_placeholders(const std::string& body) {
  std::set<std::string> found;
  std::size_t pos = 0;
  while ((pos = body.find('{', pos)) != std::string::npos) {
    std::size_t close = body.find('}', pos + 1);
    if (close == std::string::npos) break;
    std::string name = body.substr(pos + 1, close - pos - 1);
    if (known_placeholders().count(name)) found.insert(name);
    pos = close + 1;
  }
  return found;
}

std::string strip_all_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

std::string method_family(const MethodId& m) {
  if (m.kind == MethodId::Kind::self_refine) return "self_refine";
  return method_name(m);
}

const ReasoningChain* find_chain(const std::vector<ReasoningChain>& prior, Modality m) {
  for (const ReasoningChain& chain : prior)
    if (chain.modality == m) return &chain;
  return nullptr;
}

}  // namespace

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::elicit_vision: return "elicit_vision";
    case Stage::elicit_dsl: return "elicit_dsl";
    case Stage::elicit_combined: return "elicit_combined";
    case Stage::diagnose: return "diagnose";
    case Stage::align: return "align";
    case Stage::plan: return "plan";
    case Stage::solve: return "solve";
    case Stage::decompose: return "decompose";
    case Stage::feedback: return "feedback";
    case Stage::refine: return "refine";
  }
  return "align";
}

std::vector<Stage> method_stages(const MethodId& m) {
  switch (m.kind) {
    case MethodId::Kind::bba:
    case MethodId::Kind::bba_minus_visual:
    case MethodId::Kind::bba_minus_dsl:
      return {Stage::elicit_vision, Stage::elicit_dsl, Stage::diagnose, Stage::align};
    case MethodId::Kind::bba_minus_diagnostic:
      return {Stage::elicit_vision, Stage::elicit_dsl, Stage::align};
    case MethodId::Kind::cot_v: return {Stage::elicit_vision};
    case MethodId::Kind::cot_d: return {Stage::elicit_dsl};
    case MethodId::Kind::cot_m: return {Stage::elicit_combined};
    case MethodId::Kind::plan_and_solve: return {Stage::plan, Stage::solve};
    case MethodId::Kind::least_to_most: return {Stage::decompose, Stage::solve};
    case MethodId::Kind::ccot: return {Stage::plan, Stage::solve};
    case MethodId::Kind::ddcot: return {Stage::decompose, Stage::solve};
    case MethodId::Kind::self_refine:
      return {Stage::elicit_combined, Stage::feedback, Stage::refine};
  }
  return {};
}

std::string render(const PromptTemplate& tpl,
                   const std::map<std::string, std::string>& bindings) {
  for (const std::string& name : tpl.required_placeholders) {
    if (!bindings.count(name))
      throw PromptError("unbound placeholder " + name + " in template " + tpl.id);
  }
  for (const auto& [name, value] : bindings) {
    if (!tpl.required_placeholders.count(name))
      throw PromptError("unknown binding key " + name + " for template " + tpl.id);
  }
  std::string out;
  out.reserve(tpl.body.size());
  std::size_t pos = 0;
  while (pos < tpl.body.size()) {
    std::size_t open = tpl.body.find('{', pos);
    if (open == std::string::npos) {
      out.append(tpl.body, pos, std::string::npos);
      break;
    }
    std::size_t close = tpl.body.find('}', open + 1);
    std::string name = close == std::string::npos
                           ? std::string()
                           : tpl.body.substr(open + 1, close - open - 1);
    auto it = bindings.end();
    if (!name.empty() && known_placeholders().count(name)) it = bindings.find(name);
    if (it != bindings.end()) {
      out.append(tpl.body, pos, open - pos);
      out += it->second;  // verbatim; never re-scanned
      pos = close + 1;
    } else {
      out.append(tpl.body, pos, open + 1 - pos);
      pos = open + 1;
    }
  }
  return out;
}

std::string render_fewshot_block(const std::vector<FewShotPair>& pairs) {
  std::string out;
  for (const FewShotPair& pair : pairs) {
    if (!out.empty()) out += "\n\n";
    out += "SMILES: " + pair.smiles + "\nCategory: ";
    out += pair.label == ClassLabel::mutagenic ? "mutagenic" : "non-mutagenic";
  }
  return out;
}

bool check_fewshot_leakage(const std::vector<FewShotPair>& pairs,
                           const std::vector<Problem>& problems) {
  for (const Problem& p : problems) {
    if (p.domain != TaskDomain::molecules)
      throw Error("check_fewshot_leakage: problem " + p.id + " is not molecules");
  }
  for (const FewShotPair& pair : pairs) {
    std::string needle = strip_all_whitespace(pair.smiles);
    for (const Problem& p : problems) {
      if (strip_all_whitespace(p.dsl) == needle) return false;
    }
  }
  return true;
}

std::shared_ptr<const PromptLibrary> PromptLibrary::load(const std::string& prompt_dir,
                                                         const std::string& fewshot_path) {
  auto library = std::make_shared<PromptLibrary>();
  if (!fs::is_directory(prompt_dir))
    throw Error("prompt asset directory not found: " + prompt_dir);
  for (const auto& entry : fs::directory_iterator(prompt_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::string stem = entry.path().stem().string();
    std::string body = util::read_file(entry.path().string());
    std::size_t dot = stem.find('.');
    std::string first = dot == std::string::npos ? stem : stem.substr(0, dot);
    if (auto domain = domain_from_name(first); domain && stem == first + ".system") {
      library->system_[*domain] = body;
      continue;
    }
    PromptTemplate tpl;
    tpl.id = stem;
    tpl.body = std::move(body);
    tpl.required_placeholders = scan_placeholders(tpl.body);
    library->templates_.emplace(stem, std::move(tpl));
  }

  std::string fewshot_text = util::read_file(fewshot_path);
  nlohmann::json pairs = nlohmann::json::parse(fewshot_text);
  for (const auto& item : pairs) {
    FewShotPair pair;
    pair.smiles = item.at("smiles").get<std::string>();
    auto label = label_from_name(item.at("label").get<std::string>());
    if (!label || !label_valid_for_domain(*label, TaskDomain::molecules))
      throw Error("few-shot pair has invalid label: " + item.dump());
    pair.label = *label;
    library->fewshot_.push_back(std::move(pair));
  }
  for (TaskDomain d : {TaskDomain::geometry, TaskDomain::chess, TaskDomain::molecules}) {
    if (!library->system_.count(d))
      throw Error("missing system instruction asset for domain " + domain_name(d));
  }
  return library;
}

std::shared_ptr<const PromptLibrary> PromptLibrary::load_default() {
  std::string assets = BBA_DEFAULT_ASSET_DIR;
  if (const char* env = std::getenv("BBA_ASSETS_DIR")) assets = env;
  return load(assets + "/prompts", assets + "/fewshot/molecules_fewshot.json");
}

bool PromptLibrary::has_template(TaskDomain domain, const MethodId& method,
                                 Stage stage) const {
  std::string key = domain_name(domain) + "." + method_family(method) + "." + stage_name(stage);
  return templates_.count(key) > 0;
}

const PromptTemplate& PromptLibrary::stage_template(TaskDomain domain,
                                                    const MethodId& method,
                                                    Stage stage) const {
  std::string key = domain_name(domain) + "." + method_family(method) + "." + stage_name(stage);
  auto it = templates_.find(key);
  if (it == templates_.end())
    throw PromptError("no template for (" + domain_name(domain) + ", " +
                      method_name(method) + ", " + stage_name(stage) +
                      "): stage not valid for method");
  return it->second;
}

const std::string& PromptLibrary::system_instruction(TaskDomain domain) const {
  auto it = system_.find(domain);
  if (it == system_.end())
    throw PromptError("no system instruction for domain " + domain_name(domain));
  return it->second;
}

const PromptTemplate& PromptLibrary::fused_template(TaskDomain domain) const {
  auto it = templates_.find(domain_name(domain) + ".bba.fused");
  if (it == templates_.end())
    throw PromptError("no fused diagnose+align template for " + domain_name(domain));
  return it->second;
}

const PromptTemplate& PromptLibrary::pilot_template(const std::string& name) const {
  auto it = templates_.find("pilot." + name);
  if (it == templates_.end()) throw PromptError("no pilot template named " + name);
  return it->second;
}

bool stage_attaches_image(const MethodId& method, Stage stage) {
  switch (method.kind) {
    case MethodId::Kind::bba:
    case MethodId::Kind::bba_minus_diagnostic:
    case MethodId::Kind::bba_minus_dsl:
      return stage == Stage::elicit_vision;
    case MethodId::Kind::bba_minus_visual:
      return false;
    case MethodId::Kind::cot_v:
      return stage == Stage::elicit_vision;
    case MethodId::Kind::cot_d:
      return false;
    case MethodId::Kind::cot_m:
      return stage == Stage::elicit_combined;
    case MethodId::Kind::plan_and_solve:
    case MethodId::Kind::least_to_most:
      return false;
    case MethodId::Kind::ccot:
    case MethodId::Kind::ddcot:
      return true;  // both stages see the image
    case MethodId::Kind::self_refine:
      return true;
  }
  return false;
}

ChatRequest build_stage_prompt(const Problem& p, const MethodId& method, Stage stage,
                               const std::vector<ReasoningChain>& prior,
                               const PromptLibrary& library, const std::string& model_id,
                               double temperature, double top_p, int max_tokens,
                               const std::map<std::string, std::string>& extra) {
  const PromptTemplate& tpl = library.stage_template(p.domain, method, stage);

  std::map<std::string, std::string> bindings;
  for (const std::string& name : tpl.required_placeholders) {
    // Caller-supplied values win, so a stage can override the built-ins
    // (e.g. withholding the question from a diagnose call).
    if (auto it = extra.find(name); it != extra.end()) {
      bindings[name] = it->second;
    } else if (name == "question") {
      bindings[name] = p.question;
    } else if (name == "dsl") {
      bindings[name] = p.dsl;
    } else if (name == "fewshot") {
      bindings[name] = render_fewshot_block(library.fewshot_pairs());
    } else if (name == "chain_v" || name == "chain_d" || name == "diagnosis") {
      Modality want = name == "chain_v" ? Modality::vision
                      : name == "chain_d" ? Modality::dsl
                                          : Modality::diagnosis;
      const ReasoningChain* chain = find_chain(prior, want);
      if (chain == nullptr)
        throw PromptError("stage " + stage_name(stage) + " requires prior chain " + name);
      bindings[name] = chain->text;
    } else {
      throw PromptError("no value available for placeholder " + name + " in " + tpl.id);
    }
  }

  ChatRequest req;
  req.model_id = model_id;
  req.temperature = temperature;
  req.top_p = top_p;
  req.max_tokens = max_tokens;
  req.messages.push_back(Message::system(library.system_instruction(p.domain)));

  Message user;
  user.role = Role::user;
  user.parts.push_back(TextPart{render(tpl, bindings)});
  if (stage_attaches_image(method, stage)) {
    if (!p.image.has_value())
      throw PromptError("stage " + stage_name(stage) + " needs an image but problem " +
                        p.id + " has none");
    user.parts.push_back(ImagePart{*p.image});
  }
  req.messages.push_back(std::move(user));
  return req;
}

}  // namespace bba
