#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bba/model.hpp"
#include "bba/pilot.hpp"
#include "bba/smiles.hpp"

namespace bba {

inline constexpr int kSchemaVersion = 1;

// --- datasets: JSON-lines, one Problem per line ------------------------

// Validated problems; any invariant violation, parse error, or duplicate
// id aborts with the 1-based line number. image_path fields resolve
// relative to the dataset file's directory.
std::vector<Problem> load_dataset(const std::string& path);

// Writes problems as JSONL; images become sibling files referenced by a
// relative image_path. A timestamp header line is written when
// `timestamp` is set (suppress it for byte-identical rebuilds).
void save_dataset(const std::vector<Problem>& problems, const std::string& path,
                  const std::optional<std::string>& timestamp = std::nullopt);

// --- dataset builders ---------------------------------------------------

struct GmathBuild {
  std::vector<Problem> problems;
  std::vector<std::pair<std::string, std::string>> skipped;  // (source, reason)
};

// Consumes a local copy of the MATH benchmark geometry split: a directory
// of per-problem JSON files {problem, level, solution} (or one .jsonl
// file). Keeps only problems with at least one [asy] block; dsl = the
// block regions in order; question = text with the blocks removed; gold =
// the boxed content of the reference solution; difficulty = level.
// Problems with an unboxable solution are skipped with a report.
GmathBuild build_gmath(const std::string& math_dump_path);

// Consumes a TU-format dataset directory (*_A.txt, *_graph_indicator.txt,
// *_graph_labels.txt, *_node_labels.txt, *_edge_labels.txt). Builds one
// problem per graph with dsl = write_smiles(graph).
std::vector<Problem> build_mutag(const std::string& tu_dataset_dir);

// Parses the TU files into graphs without converting to problems.
std::vector<MutagGraph> load_mutag_graphs(const std::string& tu_dataset_dir);

// --- run persistence ----------------------------------------------------

void save_runs(const std::vector<PipelineRun>& runs, const std::string& path,
               bool append = false);
std::vector<PipelineRun> load_runs(const std::string& path);

// --- annotation persistence ----------------------------------------------

struct AnnotationRecord {
  std::string problem_id;
  std::string method;  // empty when the record is method-independent
  std::optional<std::string> category;
  std::vector<CriticalStep> critical;
  std::vector<StepMapping> mappings;
  std::map<int, long> tokens_per_critical;
  long unmapped_tokens = 0;
  double average_tokens = 0.0;
  std::vector<std::string> notes;
};

void save_annotations(const std::vector<AnnotationRecord>& records, const std::string& path,
                      bool append = false);
std::vector<AnnotationRecord> load_annotations(const std::string& path);

}  // namespace bba
