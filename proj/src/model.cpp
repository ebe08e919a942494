#include "bba/model.hpp"

#include <algorithm>

namespace bba {

std::string domain_name(TaskDomain d) {
  switch (d) {
    case TaskDomain::geometry: return "geometry";
    case TaskDomain::chess: return "chess";
    case TaskDomain::molecules: return "molecules";
  }
  return "geometry";
}

std::optional<TaskDomain> domain_from_name(const std::string& name) {
  if (name == "geometry") return TaskDomain::geometry;
  if (name == "chess") return TaskDomain::chess;
  if (name == "molecules") return TaskDomain::molecules;
  return std::nullopt;
}

std::string label_name(ClassLabel l) {
  switch (l) {
    case ClassLabel::white_adv: return "white_adv";
    case ClassLabel::black_adv: return "black_adv";
    case ClassLabel::balanced: return "balanced";
    case ClassLabel::mutagenic: return "mutagenic";
    case ClassLabel::non_mutagenic: return "non_mutagenic";
  }
  return "balanced";
}

std::optional<ClassLabel> label_from_name(const std::string& name) {
  if (name == "white_adv") return ClassLabel::white_adv;
  if (name == "black_adv") return ClassLabel::black_adv;
  if (name == "balanced") return ClassLabel::balanced;
  if (name == "mutagenic") return ClassLabel::mutagenic;
  if (name == "non_mutagenic") return ClassLabel::non_mutagenic;
  return std::nullopt;
}

bool label_valid_for_domain(ClassLabel l, TaskDomain d) {
  switch (d) {
    case TaskDomain::chess:
      return l == ClassLabel::white_adv || l == ClassLabel::black_adv ||
             l == ClassLabel::balanced;
    case TaskDomain::molecules:
      return l == ClassLabel::mutagenic || l == ClassLabel::non_mutagenic;
    case TaskDomain::geometry:
      return false;
  }
  return false;
}

GoldAnswer GoldAnswer::free_form(std::string latex) {
  GoldAnswer a;
  a.kind_ = Kind::free_form;
  a.text_ = std::move(latex);
  return a;
}

GoldAnswer GoldAnswer::label(ClassLabel l) {
  GoldAnswer a;
  a.kind_ = Kind::label;
  a.label_ = l;
  return a;
}

std::string GoldAnswer::to_string() const {
  return kind_ == Kind::free_form ? text_ : label_name(label_);
}

std::vector<std::string> validate_problem(const Problem& p) {
  std::vector<std::string> violations;
  if (p.id.empty()) violations.push_back("id empty");
  if (p.dsl.empty()) violations.push_back("dsl empty");
  if (p.difficulty.has_value()) {
    int d = *p.difficulty;
    if (p.domain == TaskDomain::geometry && (d < 1 || d > 5))
      violations.push_back("difficulty out of range");
    if (p.domain == TaskDomain::chess && (d < 1 || d > 3))
      violations.push_back("difficulty out of range");
    if (p.domain == TaskDomain::molecules)
      violations.push_back("difficulty not applicable to molecules");
  }
  if (p.domain == TaskDomain::geometry) {
    if (p.gold.kind() != GoldAnswer::Kind::free_form)
      violations.push_back("gold kind mismatch");
  } else {
    if (p.gold.kind() != GoldAnswer::Kind::label)
      violations.push_back("gold kind mismatch");
    else if (!label_valid_for_domain(p.gold.class_label(), p.domain))
      violations.push_back("gold label invalid for domain");
  }
  return violations;
}

std::string modality_name(Modality m) {
  switch (m) {
    case Modality::vision: return "vision";
    case Modality::dsl: return "dsl";
    case Modality::combined: return "combined";
    case Modality::diagnosis: return "diagnosis";
    case Modality::aligned: return "aligned";
  }
  return "vision";
}

MethodId MethodId::self_refine(int turns) {
  MethodId m;
  m.kind = Kind::self_refine;
  m.self_refine_turns = turns;
  return m;
}

std::string method_name(const MethodId& m) {
  switch (m.kind) {
    case MethodId::Kind::bba: return "bba";
    case MethodId::Kind::bba_minus_diagnostic: return "bba_minus_diagnostic";
    case MethodId::Kind::bba_minus_visual: return "bba_minus_visual";
    case MethodId::Kind::bba_minus_dsl: return "bba_minus_dsl";
    case MethodId::Kind::cot_v: return "cot_v";
    case MethodId::Kind::cot_d: return "cot_d";
    case MethodId::Kind::cot_m: return "cot_m";
    case MethodId::Kind::plan_and_solve: return "plan_and_solve";
    case MethodId::Kind::least_to_most: return "least_to_most";
    case MethodId::Kind::ccot: return "ccot";
    case MethodId::Kind::ddcot: return "ddcot";
    case MethodId::Kind::self_refine:
      return "self_refine_" + std::to_string(m.self_refine_turns);
  }
  return "bba";
}

std::optional<MethodId> method_from_name(const std::string& name) {
  static const std::pair<const char*, MethodId::Kind> fixed[] = {
      {"bba", MethodId::Kind::bba},
      {"bba_minus_diagnostic", MethodId::Kind::bba_minus_diagnostic},
      {"bba_minus_visual", MethodId::Kind::bba_minus_visual},
      {"bba_minus_dsl", MethodId::Kind::bba_minus_dsl},
      {"cot_v", MethodId::Kind::cot_v},
      {"cot_d", MethodId::Kind::cot_d},
      {"cot_m", MethodId::Kind::cot_m},
      {"plan_and_solve", MethodId::Kind::plan_and_solve},
      {"least_to_most", MethodId::Kind::least_to_most},
      {"ccot", MethodId::Kind::ccot},
      {"ddcot", MethodId::Kind::ddcot},
  };
  for (const auto& [n, k] : fixed) {
    if (name == n) return MethodId{k, 0};
  }
  const std::string prefix = "self_refine_";
  if (name.size() > prefix.size() && name.rfind(prefix, 0) == 0) {
    int turns = 0;
    for (char c : name.substr(prefix.size())) {
      if (c < '0' || c > '9') return std::nullopt;
      turns = turns * 10 + (c - '0');
      if (turns > 100) return std::nullopt;
    }
    if (turns < 2 || turns > 8) return std::nullopt;
    return MethodId::self_refine(turns);
  }
  return std::nullopt;
}

std::vector<std::string> known_method_names() {
  return {"bba",      "bba_minus_diagnostic", "bba_minus_visual",
          "bba_minus_dsl", "cot_v",           "cot_d",
          "cot_m",    "plan_and_solve",       "least_to_most",
          "ccot",     "ddcot",                "self_refine_<2..8>"};
}

bool PipelineRun::has_flag(const std::string& name) const {
  return std::find(flags.begin(), flags.end(), name) != flags.end();
}

}  // namespace bba
