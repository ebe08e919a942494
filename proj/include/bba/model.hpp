#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bba/chat.hpp"

namespace bba {

enum class TaskDomain { geometry, chess, molecules };

std::string domain_name(TaskDomain d);
std::optional<TaskDomain> domain_from_name(const std::string& name);

enum class ClassLabel { white_adv, black_adv, balanced, mutagenic, non_mutagenic };

std::string label_name(ClassLabel l);
std::optional<ClassLabel> label_from_name(const std::string& name);
bool label_valid_for_domain(ClassLabel l, TaskDomain d);

// Either a free-form LaTeX answer (geometry) or a class label
// (chess / molecules).
class GoldAnswer {
 public:
  enum class Kind { free_form, label };

  static GoldAnswer free_form(std::string latex);
  static GoldAnswer label(ClassLabel l);

  Kind kind() const { return kind_; }
  const std::string& text() const { return text_; }  // valid for free_form
  ClassLabel class_label() const { return label_; }  // valid for label

  // Display string: the LaTeX text, or the label name.
  std::string to_string() const;

  bool operator==(const GoldAnswer&) const = default;

 private:
  Kind kind_ = Kind::free_form;
  std::string text_;
  ClassLabel label_ = ClassLabel::balanced;
};

struct Problem {
  std::string id;
  TaskDomain domain = TaskDomain::geometry;
  std::string question;
  std::optional<ImageBlob> image;
  std::string dsl;
  GoldAnswer gold;
  std::optional<int> difficulty;  // geometry 1..5, chess 1..3
  std::map<std::string, std::string> meta;

  bool operator==(const Problem&) const = default;
};

// Total function; empty list iff all Problem invariants hold. Each
// violation names the offending field.
std::vector<std::string> validate_problem(const Problem& p);

enum class Modality { vision, dsl, combined, diagnosis, aligned };

std::string modality_name(Modality m);

struct ReasoningChain {
  Modality modality = Modality::vision;
  std::string text;
  std::optional<GoldAnswer> extracted_answer;
  int token_count = 0;

  bool operator==(const ReasoningChain&) const = default;
};

struct MethodId {
  enum class Kind {
    bba,
    bba_minus_diagnostic,
    bba_minus_visual,
    bba_minus_dsl,
    cot_v,
    cot_d,
    cot_m,
    plan_and_solve,
    least_to_most,
    ccot,
    ddcot,
    self_refine,
  };

  Kind kind = Kind::bba;
  // Only meaningful for self_refine; total turns, 2..8.
  int self_refine_turns = 0;

  bool operator==(const MethodId&) const = default;

  static MethodId self_refine(int turns);
};

// "bba", "cot_v", ..., "self_refine_3".
std::string method_name(const MethodId& m);
// Accepts the names produced by method_name; self_refine requires an
// explicit turn count suffix. Returns nullopt for unknown names.
std::optional<MethodId> method_from_name(const std::string& name);
// All fixed methods plus self_refine_2; used for usage messages.
std::vector<std::string> known_method_names();

struct PipelineRun {
  MethodId method;
  std::string problem_id;
  std::vector<ReasoningChain> chains;
  std::vector<std::pair<ChatRequest, ChatResponse>> calls;
  std::optional<GoldAnswer> final_answer;
  std::optional<bool> correct;
  double wall_time_s = 0.0;
  TokenUsage usage;
  // Deviations observed during the run: "delimiter_missing",
  // "decompose_fallback", "subproblem_cap", "unmarked_subquestion", ...
  std::vector<std::string> flags;
  bool failed = false;
  std::string error;

  bool operator==(const PipelineRun&) const = default;

  bool has_flag(const std::string& name) const;
};

}  // namespace bba
