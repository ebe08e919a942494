// bba: command-line harness for the bi-modal reasoning pipelines.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bba/asy.hpp"
#include "bba/backend.hpp"
#include "bba/engine.hpp"
#include "bba/errors.hpp"
#include "bba/io.hpp"
#include "bba/pilot.hpp"
#include "bba/pipelines.hpp"
#include "bba/prompts.hpp"
#include "bba/scoring.hpp"
#include "bba/util.hpp"

namespace fs = std::filesystem;
using namespace bba;

namespace {

// ---------------------------------------------------------------------------
// shared options
// ---------------------------------------------------------------------------

struct CommonOptions {
  std::string backend = "http";  // http | replay | scripted
  std::string model = "gpt-4-vision-preview";
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string credential_env = "BBA_API_KEY";
  std::string replay_cache;
  bool strict_replay = false;
  std::string scripted_file;
  std::string engine_path;
  int depth = 18;
  int concurrency = 1;
  unsigned seed = 0;
  int limit = -1;
  std::string format = "markdown";
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 2048;
  bool parallel_elicit = false;
  bool fused = false;
};

void add_backend_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--backend", opt.backend, "Backend kind: http, replay, or scripted")
      ->envname("BBA_BACKEND")
      ->check(CLI::IsMember({"http", "replay", "scripted"}));
  cmd->add_option("--model", opt.model, "Model identifier")->envname("BBA_MODEL");
  cmd->add_option("--endpoint", opt.endpoint, "Chat-completions URL")->envname("BBA_ENDPOINT");
  cmd->add_option("--credential-env", opt.credential_env,
                  "Environment variable holding the API key")
      ->envname("BBA_CREDENTIAL_ENV");
  cmd->add_option("--replay-cache", opt.replay_cache,
                  "Replay cache file (records new responses, replays known ones)")
      ->envname("BBA_REPLAY_CACHE");
  cmd->add_flag("--strict-replay", opt.strict_replay,
                "Forbid cache misses (no network fallback)");
  cmd->add_option("--scripted-file", opt.scripted_file,
                  "JSON array of canned response texts for --backend scripted");
  cmd->add_option("--concurrency", opt.concurrency, "Worker pool size")
      ->envname("BBA_CONCURRENCY");
  cmd->add_option("--limit", opt.limit, "Use only the first N problems");
  cmd->add_option("--temperature", opt.temperature, "Sampling temperature");
  cmd->add_option("--top-p", opt.top_p, "Nucleus sampling probability mass");
  cmd->add_option("--max-tokens", opt.max_tokens, "Completion token cap");
  cmd->add_flag("--parallel-elicit", opt.parallel_elicit,
                "Run the two elicitation calls concurrently");
  cmd->add_flag("--fused", opt.fused, "Merge diagnose and align into one call (3-call mode)");
}

void add_engine_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--engine-path", opt.engine_path, "UCI engine binary")
      ->envname("BBA_ENGINE_PATH");
  cmd->add_option("--depth", opt.depth, "Engine search depth")->envname("BBA_DEPTH");
}

std::shared_ptr<ChatBackend> make_backend(const CommonOptions& opt) {
  auto make_transport = [&]() -> std::shared_ptr<ChatBackend> {
    if (opt.backend == "scripted") {
      if (opt.scripted_file.empty())
        throw Error("--backend scripted requires --scripted-file");
      nlohmann::json texts = nlohmann::json::parse(util::read_file(opt.scripted_file));
      std::vector<std::string> canned;
      for (const auto& t : texts) canned.push_back(t.get<std::string>());
      return std::make_shared<ChatBackend>(ScriptedBackend::from_texts(canned));
    }
    HttpBackend http;
    http.endpoint = opt.endpoint;
    http.credential_env = opt.credential_env;
    return std::make_shared<ChatBackend>(http);
  };

  if (opt.backend == "replay" || opt.strict_replay) {
    if (opt.replay_cache.empty()) throw Error("replay mode requires --replay-cache");
    return std::make_shared<ChatBackend>(ReplayBackend{opt.replay_cache, true, nullptr});
  }
  if (!opt.replay_cache.empty()) {
    return std::make_shared<ChatBackend>(
        ReplayBackend{opt.replay_cache, false, make_transport()});
  }
  return make_transport();
}

PipelineConfig make_pipeline_config(const CommonOptions& opt) {
  PipelineConfig cfg;
  cfg.backend = make_backend(opt);
  cfg.prompts = PromptLibrary::load_default();
  cfg.model_id = opt.model;
  cfg.decoding = {opt.temperature, opt.top_p, opt.max_tokens};
  cfg.parallel_elicit = opt.parallel_elicit;
  cfg.fuse_diagnose_align = opt.fused;
  return cfg;
}

std::vector<Problem> load_limited(const std::string& path, int limit) {
  std::vector<Problem> problems = load_dataset(path);
  if (limit >= 0 && static_cast<int>(problems.size()) > limit) problems.resize(limit);
  return problems;
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"')
      out += "\"\"";
    else
      out.push_back(c);
  }
  out += "\"";
  return out;
}

const std::vector<std::pair<TaskDomain, const char*>> kDatasetColumns = {
    {TaskDomain::geometry, "G-MATH"},
    {TaskDomain::chess, "ChessAdv"},
    {TaskDomain::molecules, "MUTAG"},
};

// Canonical row order for report tables.
std::vector<std::string> ordered_methods(const MetricsTable& table) {
  std::vector<std::string> preferred{
      "cot_v", "cot_d", "plan_and_solve", "least_to_most",     "cot_m",
      "ccot",  "ddcot", "bba",            "bba_minus_diagnostic",
      "bba_minus_visual", "bba_minus_dsl"};
  std::vector<std::string> rows;
  for (const std::string& name : preferred)
    if (table.per_dataset.count(name)) rows.push_back(name);
  for (const auto& [name, cells] : table.per_dataset)
    if (std::find(rows.begin(), rows.end(), name) == rows.end()) rows.push_back(name);
  return rows;
}

void render_main_table(const MetricsTable& table, const std::string& format,
                       std::ostream& out) {
  std::vector<std::string> rows = ordered_methods(table);

  // column best (ties bold all)
  std::map<TaskDomain, double> best;
  double best_avg = -1;
  for (const std::string& method : rows) {
    for (const auto& [domain, label] : kDatasetColumns) {
      auto it = table.per_dataset.at(method).find(domain);
      if (it == table.per_dataset.at(method).end()) continue;
      double acc = it->second.accuracy();
      if (!best.count(domain) || acc > best[domain]) best[domain] = acc;
    }
    best_avg = std::max(best_avg, table.average(method));
  }

  auto cell = [&](const std::string& method, TaskDomain domain) -> std::string {
    auto it = table.per_dataset.at(method).find(domain);
    if (it == table.per_dataset.at(method).end()) return format == "csv" ? "" : "—";
    double acc = it->second.accuracy();
    std::string text = util::format_fixed(acc, 2);
    if (format == "markdown" && best.count(domain) && acc == best[domain])
      text = "**" + text + "**";
    return text;
  };

  if (format == "csv") {
    out << "method,G-MATH,ChessAdv,MUTAG,Avg\n";
    for (const std::string& method : rows) {
      out << csv_quote(method);
      for (const auto& [domain, label] : kDatasetColumns) out << "," << cell(method, domain);
      out << "," << util::format_fixed(table.average(method), 2) << "\n";
    }
    return;
  }
  out << "| Method | G-MATH | ChessAdv | MUTAG | Avg |\n";
  out << "|---|---|---|---|---|\n";
  for (const std::string& method : rows) {
    std::string avg = util::format_fixed(table.average(method), 2);
    if (table.average(method) == best_avg) avg = "**" + avg + "**";
    out << "| " << method << " |";
    for (const auto& [domain, label] : kDatasetColumns) out << " " << cell(method, domain) << " |";
    out << " " << avg << " |\n";
  }
}

void render_level_table(const MetricsTable& table, TaskDomain domain, int max_level,
                        const std::string& format, std::ostream& out) {
  std::vector<std::string> rows;
  for (const std::string& method : ordered_methods(table))
    if (table.per_level.count(method) && table.per_level.at(method).count(domain))
      rows.push_back(method);
  if (rows.empty()) {
    if (format != "csv") out << "(no per-level data)\n";
    return;
  }

  if (format == "csv") {
    out << "method";
    for (int level = 1; level <= max_level; ++level) out << ",Level " << level;
    out << ",Avg\n";
  } else {
    out << "| Method |";
    for (int level = 1; level <= max_level; ++level) out << " Level " << level << " |";
    out << " Avg |\n|---|";
    for (int level = 0; level <= max_level; ++level) out << "---|";
    out << "\n";
  }
  for (const std::string& method : rows) {
    const auto& levels = table.per_level.at(method).at(domain);
    out << (format == "csv" ? csv_quote(method) : "| " + method + " |");
    long total = 0;
    long correct = 0;
    for (int level = 1; level <= max_level; ++level) {
      std::string text = format == "csv" ? "" : "—";
      auto it = levels.find(level);
      if (it != levels.end()) {
        text = util::format_fixed(it->second.accuracy(), 2);
        total += it->second.total;
        correct += it->second.correct;
      }
      out << (format == "csv" ? "," + text : " " + text + " |");
    }
    double avg = total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / total;
    std::string avg_text = util::format_fixed(avg, 2);
    out << (format == "csv" ? "," + avg_text + "\n" : " " + avg_text + " |\n");
  }
}

void render_improvements(const MetricsTable& table, const std::string& ours,
                         const std::string& baseline_flag, std::ostream& out) {
  if (!table.per_dataset.count(ours)) return;
  out << "\nRelative improvement of " << ours << ":\n";
  for (const auto& [domain, label] : kDatasetColumns) {
    auto our_it = table.per_dataset.at(ours).find(domain);
    if (our_it == table.per_dataset.at(ours).end()) continue;

    std::string baseline = baseline_flag;
    if (baseline.empty()) {
      // strongest non-ablation competitor on this dataset
      double best = -1;
      for (const auto& [method, cells] : table.per_dataset) {
        if (method == ours || method.rfind("bba", 0) == 0) continue;
        auto it = cells.find(domain);
        if (it != cells.end() && it->second.accuracy() > best) {
          best = it->second.accuracy();
          baseline = method;
        }
      }
    }
    if (baseline.empty() || !table.per_dataset.count(baseline)) continue;
    auto base_it = table.per_dataset.at(baseline).find(domain);
    if (base_it == table.per_dataset.at(baseline).end()) continue;
    double base_acc = base_it->second.accuracy();
    if (base_acc <= 0) continue;
    double delta = relative_improvement(our_it->second.accuracy(), base_acc);
    out << "  " << label << ": " << util::format_fixed(our_it->second.accuracy(), 2) << " vs "
        << baseline << " " << util::format_fixed(base_acc, 2) << " -> "
        << (delta >= 0 ? "+" : "") << util::format_fixed(delta, 2) << "%\n";
  }
}

void print_run_summary(const std::vector<PipelineRun>& runs,
                       const std::vector<Problem>& problems, std::ostream& out) {
  MetricsTable table = score_runs(runs, problems);
  int failed = 0;
  std::map<std::string, int> flags;
  for (const PipelineRun& run : runs) {
    if (run.failed) ++failed;
    for (const std::string& flag : run.flags) ++flags[flag];
  }
  for (const auto& [method, cells] : table.per_dataset) {
    for (const auto& [domain, label] : kDatasetColumns) {
      auto it = cells.find(domain);
      if (it == cells.end()) continue;
      out << method << " on " << label << ": " << util::format_fixed(it->second.accuracy(), 2)
          << "% (" << it->second.correct << "/" << it->second.total << ")\n";
    }
  }
  if (failed > 0) out << "failed runs: " << failed << "\n";
  for (const auto& [flag, count] : flags) out << "flag " << flag << ": " << count << "\n";
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_dataset_build(const std::string& kind, const std::string& source,
                      const std::string& fens_file, const std::string& out_path,
                      bool no_timestamp, const CommonOptions& opt) {
  std::optional<std::string> timestamp;
  if (!no_timestamp) {
    char buf[32];
    std::time_t now = std::time(nullptr);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    timestamp = std::string(buf);
  }

  if (kind == "gmath") {
    if (!fs::exists(source)) {
      std::cerr << "source not found: " << source << "\n";
      return 2;
    }
    GmathBuild build = build_gmath(source);
    save_dataset(build.problems, out_path, timestamp);
    std::cout << "wrote " << build.problems.size() << " problems to " << out_path << "\n";
    for (const auto& [name, reason] : build.skipped)
      std::cerr << "skipped " << name << ": " << reason << "\n";
    return 0;
  }
  if (kind == "mutag") {
    if (!fs::is_directory(source)) {
      std::cerr << "source not found: " << source << "\n";
      return 2;
    }
    std::vector<Problem> problems = build_mutag(source);
    save_dataset(problems, out_path, timestamp);
    std::cout << "wrote " << problems.size() << " problems to " << out_path << "\n";
    return 0;
  }
  if (kind == "chessadv") {
    if (!fs::exists(fens_file)) {
      std::cerr << "FEN list not found: " << fens_file << "\n";
      return 2;
    }
    if (opt.engine_path.empty()) {
      std::cerr << "chessadv build requires --engine-path\n";
      return 2;
    }
    std::vector<std::string> fens;
    for (const std::string& line : util::split_lines(util::read_file(fens_file)))
      if (!util::trim(line).empty()) fens.push_back(util::trim(line));
    EngineConfig cfg;
    cfg.binary_path = opt.engine_path;
    cfg.depth = opt.depth;
    ChessAdvBuild build = build_chessadv(fens, cfg);
    save_dataset(build.problems, out_path, timestamp);
    std::cout << "wrote " << build.problems.size() << " problems to " << out_path << "\n";
    for (const auto& [fen, reason] : build.skipped)
      std::cerr << "skipped '" << fen << "': " << reason << "\n";
    return 0;
  }
  std::cerr << "unknown dataset kind: " << kind << " (expected gmath, mutag, or chessadv)\n";
  return 2;
}

int cmd_dataset_validate(const std::string& path) {
  std::vector<Problem> problems = load_dataset(path);
  std::cout << "valid: " << problems.size() << " problems\n";
  return 0;
}

int cmd_dataset_stats(const std::string& path) {
  std::vector<Problem> problems = load_dataset(path);
  std::map<TaskDomain, int> per_domain;
  std::map<int, int> level_histogram;
  for (const Problem& p : problems) {
    ++per_domain[p.domain];
    if (p.difficulty.has_value()) ++level_histogram[*p.difficulty];
  }
  std::cout << "problems: " << problems.size() << "\n";
  for (const auto& [domain, count] : per_domain)
    std::cout << "  " << domain_name(domain) << ": " << count << "\n";
  if (!level_histogram.empty()) {
    std::cout << "difficulty histogram:\n";
    for (const auto& [level, count] : level_histogram)
      std::cout << "  level " << level << ": " << count << "\n";
  }
  if (per_domain.count(TaskDomain::geometry)) {
    AsyLengthStats low = asy_length_stats(problems, 1, 3);
    AsyLengthStats high = asy_length_stats(problems, 4, 5);
    if (low.count > 0)
      std::cout << "asymptote length, levels 1-3: mean " << util::format_fixed(low.mean, 2)
                << " over " << low.count << " blocks\n";
    if (high.count > 0)
      std::cout << "asymptote length, levels 4-5: mean " << util::format_fixed(high.mean, 2)
                << " over " << high.count << " blocks\n";
  }
  std::map<std::string, int> gold_counts;
  for (const Problem& p : problems)
    if (p.gold.kind() == GoldAnswer::Kind::label)
      ++gold_counts[label_name(p.gold.class_label())];
  for (const auto& [label, count] : gold_counts)
    std::cout << "  gold " << label << ": " << count << "\n";
  return 0;
}

int cmd_run(const std::string& method_name_arg, const std::string& dataset_path,
            const std::string& out_path, bool append, const CommonOptions& opt) {
  std::optional<MethodId> method = method_from_name(method_name_arg);
  if (!method.has_value()) {
    std::cerr << "unknown method '" << method_name_arg << "'. Known methods:\n";
    for (const std::string& name : known_method_names()) std::cerr << "  " << name << "\n";
    return 2;
  }
  if (!fs::exists(dataset_path)) {
    std::cerr << "dataset not found: " << dataset_path << "\n";
    return 2;
  }
  std::vector<Problem> problems = load_limited(dataset_path, opt.limit);
  PipelineConfig cfg = make_pipeline_config(opt);
  std::vector<PipelineRun> runs = run_batch(problems, *method, cfg, opt.concurrency);
  save_runs(runs, out_path, append);
  std::cout << "wrote " << runs.size() << " runs to " << out_path << "\n";
  print_run_summary(runs, problems, std::cout);
  return 0;
}

int cmd_ablate(const std::string& dataset_path, const std::string& out_dir,
               const CommonOptions& opt) {
  if (!fs::exists(dataset_path)) {
    std::cerr << "dataset not found: " << dataset_path << "\n";
    return 2;
  }
  std::vector<Problem> problems = load_limited(dataset_path, opt.limit);
  fs::create_directories(out_dir);
  for (const char* name : {"bba", "bba_minus_diagnostic", "bba_minus_visual", "bba_minus_dsl"}) {
    PipelineConfig cfg = make_pipeline_config(opt);
    MethodId method = *method_from_name(name);
    std::vector<PipelineRun> runs = run_batch(problems, method, cfg, opt.concurrency);
    std::string out_path = (fs::path(out_dir) / (std::string(name) + ".jsonl")).string();
    save_runs(runs, out_path);
    std::cout << name << " -> " << out_path << "\n";
    print_run_summary(runs, problems, std::cout);
  }
  return 0;
}

// Gold solutions for annotation: meta["solution"] or a sidecar JSONL of
// {problem_id, solution}.
std::map<std::string, std::string> load_solutions(const std::vector<Problem>& problems,
                                                  const std::string& solutions_path) {
  std::map<std::string, std::string> solutions;
  for (const Problem& p : problems) {
    auto it = p.meta.find("solution");
    if (it != p.meta.end()) solutions[p.id] = it->second;
  }
  if (!solutions_path.empty()) {
    for (const std::string& line : util::split_lines(util::read_file(solutions_path))) {
      if (util::trim(line).empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      solutions[j.at("problem_id").get<std::string>()] = j.at("solution").get<std::string>();
    }
  }
  return solutions;
}

int cmd_annotate_categorize(const std::string& dataset_path, const std::string& solutions_path,
                            const std::string& out_path, const CommonOptions& opt) {
  std::vector<Problem> problems = load_limited(dataset_path, opt.limit);
  auto solutions = load_solutions(problems, solutions_path);
  auto backend = make_backend(opt);
  auto library = PromptLibrary::load_default();
  std::vector<AnnotationRecord> records;
  for (const Problem& p : problems) {
    if (p.domain != TaskDomain::geometry) continue;
    auto it = solutions.find(p.id);
    if (it == solutions.end()) {
      std::cerr << "no solution for " << p.id << "; skipped\n";
      continue;
    }
    CategorizationResult result =
        categorize_problem(p, it->second, *backend, *library, opt.model, opt.seed);
    AnnotationRecord record;
    record.problem_id = p.id;
    record.category = category_name(result.category);
    record.notes = result.warnings;
    records.push_back(std::move(record));
  }
  save_annotations(records, out_path);
  std::cout << "wrote " << records.size() << " categorizations to " << out_path << "\n";
  return 0;
}

int cmd_annotate_critical(const std::string& dataset_path, const std::string& solutions_path,
                          const std::string& out_path, const CommonOptions& opt) {
  std::vector<Problem> problems = load_limited(dataset_path, opt.limit);
  auto solutions = load_solutions(problems, solutions_path);
  auto backend = make_backend(opt);
  auto library = PromptLibrary::load_default();
  std::vector<AnnotationRecord> records;
  for (const Problem& p : problems) {
    auto it = solutions.find(p.id);
    if (it == solutions.end()) {
      std::cerr << "no solution for " << p.id << "; skipped\n";
      continue;
    }
    CriticalStepsResult result =
        identify_critical_steps(p, it->second, *backend, *library, opt.model);
    AnnotationRecord record;
    record.problem_id = p.id;
    record.critical = result.steps;
    record.notes = result.notes;
    records.push_back(std::move(record));
  }
  save_annotations(records, out_path);
  std::cout << "wrote " << records.size() << " critical-step lists to " << out_path << "\n";
  return 0;
}

int cmd_annotate_tokens(const std::string& runs_path, const std::string& critical_path,
                        const std::string& out_path, const std::string& reducer,
                        const CommonOptions& opt) {
  std::vector<PipelineRun> runs = load_runs(runs_path);
  std::map<std::string, std::vector<CriticalStep>> critical;
  for (const AnnotationRecord& record : load_annotations(critical_path))
    critical[record.problem_id] = record.critical;
  auto backend = make_backend(opt);
  auto library = PromptLibrary::load_default();

  std::vector<AnnotationRecord> records;
  for (const PipelineRun& run : runs) {
    if (run.chains.empty()) continue;
    auto it = critical.find(run.problem_id);
    if (it == critical.end() || it->second.empty()) {
      std::cerr << "no critical steps for " << run.problem_id << "; skipped\n";
      continue;
    }
    const std::string& generated = run.chains.back().text;
    std::vector<StepMapping> mappings = map_solution_steps(
        generated, it->second, *backend, *library, opt.model, default_tokenizer());
    TokenAccounting accounting =
        tokens_per_critical_step(mappings, static_cast<int>(it->second.size()));
    AnnotationRecord record;
    record.problem_id = run.problem_id;
    record.method = method_name(run.method);
    record.critical = it->second;
    record.mappings = std::move(mappings);
    record.tokens_per_critical = accounting.per_critical;
    record.unmapped_tokens = accounting.unmapped_tokens;
    record.average_tokens = accounting.average;
    records.push_back(std::move(record));
  }
  save_annotations(records, out_path);

  // Per-method reduction, labeled with the reducer used.
  std::map<std::string, std::pair<double, int>> macro;  // sum of averages, count
  std::map<std::string, std::pair<long, long>> pooled;  // mapped tokens, critical steps
  for (const AnnotationRecord& record : records) {
    auto& m = macro[record.method];
    m.first += record.average_tokens;
    m.second += 1;
    auto& q = pooled[record.method];
    for (const auto& [id, total] : record.tokens_per_critical) q.first += total;
    q.second += static_cast<long>(record.critical.size());
  }
  std::cout << "average tokens per critical step (reducer: " << reducer << ")\n";
  for (const auto& [method, stats] : macro) {
    double value;
    if (reducer == "pooled") {
      auto& q = pooled[method];
      value = q.second == 0 ? 0.0 : static_cast<double>(q.first) / q.second;
    } else {
      value = stats.second == 0 ? 0.0 : stats.first / stats.second;
    }
    std::cout << "  " << method << ": " << util::format_fixed(value, 2) << " over "
              << stats.second << " problems\n";
  }
  std::cout << "wrote " << records.size() << " token accounts to " << out_path << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& run_paths,
               const std::vector<std::string>& dataset_paths, const std::string& tables,
               const std::string& format, const std::string& baseline,
               const std::string& ours, const std::string& annotations_path) {
  std::set<std::string> wanted;
  {
    std::string current;
    for (char c : tables + ",") {
      if (c == ',') {
        if (!util::trim(current).empty()) wanted.insert(util::trim(current));
        current.clear();
      } else {
        current.push_back(c);
      }
    }
  }

  std::vector<PipelineRun> runs;
  for (const std::string& path : run_paths)
    for (PipelineRun& run : load_runs(path)) runs.push_back(std::move(run));
  std::vector<Problem> problems;
  for (const std::string& path : dataset_paths)
    for (Problem& p : load_dataset(path)) problems.push_back(std::move(p));

  if (!runs.empty()) {
    MetricsTable table = score_runs(runs, problems);
    bool want_matrix = wanted.count("main") || wanted.count("ablation") ||
                       wanted.count("self_refine");
    if (want_matrix) {
      render_main_table(table, format, std::cout);
      if (wanted.count("main")) render_improvements(table, ours, baseline, std::cout);
    }
    if (wanted.count("levels")) {
      std::cout << "\nGeometry by difficulty level:\n";
      render_level_table(table, TaskDomain::geometry, 5, format, std::cout);
      std::cout << "\nChess by difficulty level:\n";
      render_level_table(table, TaskDomain::chess, 3, format, std::cout);
    }
  }

  if (wanted.count("pilot") && !annotations_path.empty()) {
    std::vector<AnnotationRecord> records = load_annotations(annotations_path);
    std::map<std::string, int> category_counts;
    int categorized = 0;
    std::map<std::string, std::pair<double, int>> tokens;
    for (const AnnotationRecord& record : records) {
      if (record.category.has_value()) {
        ++category_counts[*record.category];
        ++categorized;
      }
      if (!record.method.empty()) {
        auto& t = tokens[record.method];
        t.first += record.average_tokens;
        t.second += 1;
      }
    }
    if (categorized > 0) {
      std::cout << "category,count,share\n";
      for (const auto& [category, count] : category_counts)
        std::cout << csv_quote(category) << "," << count << ","
                  << util::format_fixed(100.0 * count / categorized, 2) << "\n";
    }
    if (!tokens.empty()) {
      std::cout << "method,avg_tokens_per_critical_step,problems\n";
      for (const auto& [method, t] : tokens)
        std::cout << csv_quote(method) << ","
                  << util::format_fixed(t.second == 0 ? 0.0 : t.first / t.second, 2) << ","
                  << t.second << "\n";
    }
  }
  return 0;
}

int cmd_chess_eval(const std::string& fen, const CommonOptions& opt) {
  if (opt.engine_path.empty()) {
    std::cerr << "chess eval requires --engine-path\n";
    return 2;
  }
  FenPosition position = parse_fen(fen);
  EngineConfig cfg;
  cfg.binary_path = opt.engine_path;
  cfg.depth = opt.depth;
  EngineScore score = evaluate_position(position, cfg);
  double p = cp_to_winprob(score);
  if (score.kind == EngineScore::Kind::mate) {
    std::cout << "score: mate " << score.mate_moves << " for "
              << (score.winner == Color::white ? "white" : "black") << "\n";
  } else {
    std::cout << "score: cp " << score.cp << " (white-relative)\n";
  }
  std::cout << "white win probability: " << util::format_fixed(p, 4) << "\n";
  std::cout << "label: " << label_name(winprob_to_label(p)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-modal reasoning evaluation harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from an INI/TOML config file");
  app.footer("Precedence: command-line flags > environment variables > config file.");

  CommonOptions opt;

  // dataset ----------------------------------------------------------------
  CLI::App* dataset = app.add_subcommand("dataset", "Build, validate, or inspect datasets");
  dataset->require_subcommand(1);

  std::string build_kind;
  std::string build_source;
  std::string build_fens;
  std::string build_out = "dataset.jsonl";
  bool build_no_timestamp = false;
  CLI::App* dataset_build = dataset->add_subcommand("build", "Build a dataset from source data");
  dataset_build->add_option("--kind", build_kind, "gmath | mutag | chessadv")->required();
  dataset_build->add_option("--source", build_source, "Source directory (gmath, mutag)");
  dataset_build->add_option("--fens", build_fens, "FEN list file (chessadv)");
  dataset_build->add_option("--out", build_out, "Output JSONL path");
  dataset_build->add_flag("--no-timestamp", build_no_timestamp,
                          "Suppress the build timestamp header (byte-identical rebuilds)");
  add_engine_flags(dataset_build, opt);

  std::string validate_file;
  CLI::App* dataset_validate = dataset->add_subcommand("validate", "Validate a dataset file");
  dataset_validate->add_option("--file", validate_file, "Dataset JSONL")->required();

  std::string stats_file;
  CLI::App* dataset_stats = dataset->add_subcommand("stats", "Print dataset statistics");
  dataset_stats->add_option("--file", stats_file, "Dataset JSONL")->required();

  // run ----------------------------------------------------------------------
  std::string run_method;
  std::string run_dataset;
  std::string run_out = "runs.jsonl";
  bool run_append = false;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one method over a dataset");
  run_cmd->add_option("--method", run_method, "Method name (see usage errors for the list)")
      ->required();
  run_cmd->add_option("--dataset", run_dataset, "Dataset JSONL")->required();
  run_cmd->add_option("--out", run_out, "Run file to write");
  run_cmd->add_flag("--append", run_append, "Append to the run file instead of replacing it");
  add_backend_flags(run_cmd, opt);

  // ablate ---------------------------------------------------------------------
  std::string ablate_dataset;
  std::string ablate_out = "ablations";
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "Run the full method plus its three ablations");
  ablate_cmd->add_option("--dataset", ablate_dataset, "Dataset JSONL")->required();
  ablate_cmd->add_option("--out-dir", ablate_out, "Directory for the four run files");
  add_backend_flags(ablate_cmd, opt);

  // annotate ---------------------------------------------------------------------
  CLI::App* annotate = app.add_subcommand("annotate", "Pilot-study annotation pipelines");
  annotate->require_subcommand(1);

  std::string anno_dataset;
  std::string anno_solutions;
  std::string anno_out = "annotations.jsonl";
  CLI::App* anno_cat = annotate->add_subcommand("categorize", "Problem-type categorization");
  anno_cat->add_option("--dataset", anno_dataset, "Dataset JSONL")->required();
  anno_cat->add_option("--solutions", anno_solutions,
                       "Sidecar JSONL of {problem_id, solution} (default: meta.solution)");
  anno_cat->add_option("--out", anno_out, "Annotation output JSONL");
  anno_cat->add_option("--seed", opt.seed, "Tie-break seed")->envname("BBA_SEED");
  add_backend_flags(anno_cat, opt);

  std::string crit_dataset;
  std::string crit_solutions;
  std::string crit_out = "critical.jsonl";
  CLI::App* anno_crit = annotate->add_subcommand("critical", "Critical-step identification");
  anno_crit->add_option("--dataset", crit_dataset, "Dataset JSONL")->required();
  anno_crit->add_option("--solutions", crit_solutions, "Sidecar solutions JSONL");
  anno_crit->add_option("--out", crit_out, "Annotation output JSONL");
  add_backend_flags(anno_crit, opt);

  std::string tok_runs;
  std::string tok_critical;
  std::string tok_out = "tokens.jsonl";
  std::string tok_reducer = "macro";
  CLI::App* anno_tok = annotate->add_subcommand("tokens", "Per-critical-step token accounting");
  anno_tok->add_option("--runs", tok_runs, "Run file with generated solutions")->required();
  anno_tok->add_option("--critical", tok_critical, "Critical-step annotation JSONL")->required();
  anno_tok->add_option("--out", tok_out, "Annotation output JSONL");
  anno_tok->add_option("--reducer", tok_reducer, "macro (per-problem mean) or pooled")
      ->check(CLI::IsMember({"macro", "pooled"}));
  add_backend_flags(anno_tok, opt);

  // report ---------------------------------------------------------------------
  std::vector<std::string> report_runs;
  std::vector<std::string> report_datasets;
  std::string report_tables = "main";
  std::string report_baseline;
  std::string report_ours = "bba";
  std::string report_annotations;
  CLI::App* report_cmd = app.add_subcommand("report", "Render result tables from run files");
  report_cmd->add_option("--runs", report_runs, "Run files")->expected(-1);
  report_cmd->add_option("--dataset", report_datasets, "Dataset files for gold/difficulty")
      ->expected(-1);
  report_cmd->add_option("--tables", report_tables,
                         "Comma list: main,levels,ablation,self_refine,pilot");
  report_cmd->add_option("--format", opt.format, "markdown | csv")
      ->check(CLI::IsMember({"markdown", "csv"}));
  report_cmd->add_option("--baseline", report_baseline,
                         "Comparison baseline (default: best non-bba method per dataset)");
  report_cmd->add_option("--ours", report_ours, "Method the improvements are computed for");
  report_cmd->add_option("--annotations", report_annotations, "Annotation JSONL (pilot tables)");

  // chess ---------------------------------------------------------------------
  CLI::App* chess = app.add_subcommand("chess", "Engine utilities");
  chess->require_subcommand(1);
  std::string eval_fen;
  CLI::App* chess_eval = chess->add_subcommand("eval", "Evaluate one FEN");
  chess_eval->add_option("--fen", eval_fen, "Position in FEN")->required();
  add_engine_flags(chess_eval, opt);

  std::string chess_fens;
  std::string chess_out = "chessadv.jsonl";
  bool chess_no_timestamp = false;
  CLI::App* chess_build = chess->add_subcommand("build", "Build a labeled dataset from FENs");
  chess_build->add_option("--fens", chess_fens, "FEN list file")->required();
  chess_build->add_option("--out", chess_out, "Output JSONL path");
  chess_build->add_flag("--no-timestamp", chess_no_timestamp, "Suppress the timestamp header");
  add_engine_flags(chess_build, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (dataset_build->parsed())
      return cmd_dataset_build(build_kind, build_source, build_fens, build_out,
                               build_no_timestamp, opt);
    if (dataset_validate->parsed()) return cmd_dataset_validate(validate_file);
    if (dataset_stats->parsed()) return cmd_dataset_stats(stats_file);
    if (run_cmd->parsed()) return cmd_run(run_method, run_dataset, run_out, run_append, opt);
    if (ablate_cmd->parsed()) return cmd_ablate(ablate_dataset, ablate_out, opt);
    if (anno_cat->parsed())
      return cmd_annotate_categorize(anno_dataset, anno_solutions, anno_out, opt);
    if (anno_crit->parsed())
      return cmd_annotate_critical(crit_dataset, crit_solutions, crit_out, opt);
    if (anno_tok->parsed())
      return cmd_annotate_tokens(tok_runs, tok_critical, tok_out, tok_reducer, opt);
    if (report_cmd->parsed())
      return cmd_report(report_runs, report_datasets, report_tables, opt.format,
                        report_baseline, report_ours, report_annotations);
    if (chess_eval->parsed()) return cmd_chess_eval(eval_fen, opt);
    if (chess_build->parsed())
      return cmd_dataset_build("chessadv", "", chess_fens, chess_out, chess_no_timestamp, opt);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
