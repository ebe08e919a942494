#include "bba/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bba/asy.hpp"
#include "bba/errors.hpp"
#include "bba/scoring.hpp"
#include "bba/util.hpp"

namespace bba {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void check_schema_version(const json& record, long line) {
  if (!record.contains("schema_version"))
    throw SchemaError("record missing schema_version", line);
  int version = record["schema_version"].get<int>();
  if (version != kSchemaVersion)
    throw SchemaError("unsupported schema_version " + std::to_string(version) +
                          " (expected " + std::to_string(kSchemaVersion) + ")",
                      line);
}

std::string sanitize_for_filename(const std::string& id) {
  std::string out;
  for (char c : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

std::string media_type_extension(const std::string& media_type) {
  if (media_type == "image/svg+xml") return ".svg";
  if (media_type == "image/png") return ".png";
  if (media_type == "image/jpeg") return ".jpg";
  return ".bin";
}

std::string media_type_from_extension(const std::string& path) {
  if (util::ends_with(path, ".svg")) return "image/svg+xml";
  if (util::ends_with(path, ".png")) return "image/png";
  if (util::ends_with(path, ".jpg") || util::ends_with(path, ".jpeg")) return "image/jpeg";
  return "application/octet-stream";
}

json gold_to_json(const GoldAnswer& gold) {
  if (gold.kind() == GoldAnswer::Kind::free_form)
    return {{"kind", "free_form"}, {"value", gold.text()}};
  return {{"kind", "label"}, {"value", label_name(gold.class_label())}};
}

GoldAnswer gold_from_json(const json& j, long line) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "free_form") return GoldAnswer::free_form(j.at("value").get<std::string>());
  if (kind == "label") {
    auto label = label_from_name(j.at("value").get<std::string>());
    if (!label) throw SchemaError("unknown gold label: " + j.at("value").dump(), line);
    return GoldAnswer::label(*label);
  }
  throw SchemaError("unknown gold kind: " + kind, line);
}

json request_to_json(const ChatRequest& req) {
  json messages = json::array();
  for (const Message& m : req.messages) {
    json parts = json::array();
    for (const Part& part : m.parts) {
      if (const auto* text = std::get_if<TextPart>(&part)) {
        parts.push_back({{"type", "text"}, {"text", text->text}});
      } else {
        const auto& img = std::get<ImagePart>(part).image;
        parts.push_back({{"type", "image"},
                         {"media_type", img.media_type},
                         {"data_b64", util::base64_encode(img.bytes)}});
      }
    }
    messages.push_back({{"role", role_name(m.role)}, {"parts", parts}});
  }
  return {{"model_id", req.model_id},
          {"messages", messages},
          {"temperature", req.temperature},
          {"top_p", req.top_p},
          {"max_tokens", req.max_tokens}};
}

Role role_from_name(const std::string& name, long line) {
  if (name == "system") return Role::system;
  if (name == "user") return Role::user;
  if (name == "assistant") return Role::assistant;
  throw SchemaError("unknown role: " + name, line);
}

ChatRequest request_from_json(const json& j, long line) {
  ChatRequest req;
  req.model_id = j.at("model_id").get<std::string>();
  req.temperature = j.at("temperature").get<double>();
  req.top_p = j.at("top_p").get<double>();
  req.max_tokens = j.at("max_tokens").get<int>();
  for (const json& mj : j.at("messages")) {
    Message m;
    m.role = role_from_name(mj.at("role").get<std::string>(), line);
    for (const json& pj : mj.at("parts")) {
      std::string type = pj.at("type").get<std::string>();
      if (type == "text") {
        m.parts.push_back(TextPart{pj.at("text").get<std::string>()});
      } else if (type == "image") {
        ImageBlob blob;
        blob.media_type = pj.at("media_type").get<std::string>();
        blob.bytes = util::base64_decode(pj.at("data_b64").get<std::string>());
        m.parts.push_back(ImagePart{std::move(blob)});
      } else {
        throw SchemaError("unknown message part type: " + type, line);
      }
    }
    req.messages.push_back(std::move(m));
  }
  return req;
}

json response_to_json(const ChatResponse& resp) {
  return {{"text", resp.text},
          {"prompt_tokens", resp.prompt_tokens},
          {"completion_tokens", resp.completion_tokens},
          {"finish_reason", finish_reason_name(resp.finish_reason)},
          {"warnings", resp.warnings}};
}

ChatResponse response_from_json(const json& j) {
  ChatResponse resp;
  resp.text = j.at("text").get<std::string>();
  resp.prompt_tokens = j.at("prompt_tokens").get<int>();
  resp.completion_tokens = j.at("completion_tokens").get<int>();
  resp.finish_reason = finish_reason_from_name(j.at("finish_reason").get<std::string>());
  resp.warnings = j.at("warnings").get<std::vector<std::string>>();
  return resp;
}

Modality modality_from_name(const std::string& name, long line) {
  if (name == "vision") return Modality::vision;
  if (name == "dsl") return Modality::dsl;
  if (name == "combined") return Modality::combined;
  if (name == "diagnosis") return Modality::diagnosis;
  if (name == "aligned") return Modality::aligned;
  throw SchemaError("unknown modality: " + name, line);
}

json chain_to_json(const ReasoningChain& chain) {
  json j{{"modality", modality_name(chain.modality)},
         {"text", chain.text},
         {"token_count", chain.token_count}};
  if (chain.extracted_answer.has_value()) j["extracted"] = gold_to_json(*chain.extracted_answer);
  return j;
}

ReasoningChain chain_from_json(const json& j, long line) {
  ReasoningChain chain;
  chain.modality = modality_from_name(j.at("modality").get<std::string>(), line);
  chain.text = j.at("text").get<std::string>();
  chain.token_count = j.at("token_count").get<int>();
  if (j.contains("extracted")) chain.extracted_answer = gold_from_json(j["extracted"], line);
  return chain;
}

json run_to_json(const PipelineRun& run) {
  json calls = json::array();
  for (const auto& [req, resp] : run.calls)
    calls.push_back({{"request", request_to_json(req)}, {"response", response_to_json(resp)}});
  json chains = json::array();
  for (const ReasoningChain& chain : run.chains) chains.push_back(chain_to_json(chain));
  json j{{"schema_version", kSchemaVersion},
         {"method", method_name(run.method)},
         {"problem_id", run.problem_id},
         {"chains", chains},
         {"calls", calls},
         {"wall_time_s", run.wall_time_s},
         {"usage",
          {{"prompt_tokens", run.usage.prompt_tokens},
           {"completion_tokens", run.usage.completion_tokens}}},
         {"flags", run.flags},
         {"failed", run.failed},
         {"error", run.error}};
  if (run.final_answer.has_value()) j["final"] = gold_to_json(*run.final_answer);
  if (run.correct.has_value()) j["correct"] = *run.correct;
  return j;
}

PipelineRun run_from_json(const json& j, long line) {
  check_schema_version(j, line);
  PipelineRun run;
  auto method = method_from_name(j.at("method").get<std::string>());
  if (!method) throw SchemaError("unknown method: " + j.at("method").dump(), line);
  run.method = *method;
  run.problem_id = j.at("problem_id").get<std::string>();
  for (const json& cj : j.at("chains")) run.chains.push_back(chain_from_json(cj, line));
  for (const json& cj : j.at("calls"))
    run.calls.emplace_back(request_from_json(cj.at("request"), line),
                           response_from_json(cj.at("response")));
  if (j.contains("final")) run.final_answer = gold_from_json(j["final"], line);
  if (j.contains("correct")) run.correct = j["correct"].get<bool>();
  run.wall_time_s = j.at("wall_time_s").get<double>();
  run.usage.prompt_tokens = j.at("usage").at("prompt_tokens").get<long>();
  run.usage.completion_tokens = j.at("usage").at("completion_tokens").get<long>();
  run.flags = j.at("flags").get<std::vector<std::string>>();
  run.failed = j.at("failed").get<bool>();
  run.error = j.at("error").get<std::string>();
  return run;
}

std::vector<std::pair<long, json>> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<std::pair<long, json>> records;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    try {
      records.emplace_back(line_no, json::parse(line));
    } catch (const json::exception& ex) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + ex.what(), line_no);
    }
  }
  return records;
}

}  // namespace

std::vector<Problem> load_dataset(const std::string& path) {
  fs::path base = fs::path(path).parent_path();
  std::vector<Problem> problems;
  std::set<std::string> seen_ids;
  for (const auto& [line, record] : read_jsonl(path)) {
    if (record.contains("type") && record["type"] == "header") {
      check_schema_version(record, line);
      continue;
    }
    check_schema_version(record, line);
    Problem p;
    try {
      p.id = record.at("id").get<std::string>();
      auto domain = domain_from_name(record.at("domain").get<std::string>());
      if (!domain) throw SchemaError("unknown domain: " + record.at("domain").dump(), line);
      p.domain = *domain;
      p.question = record.at("question").get<std::string>();
      p.dsl = record.at("dsl").get<std::string>();
      p.gold = gold_from_json(record.at("gold"), line);
      if (record.contains("difficulty") && !record["difficulty"].is_null())
        p.difficulty = record["difficulty"].get<int>();
      if (record.contains("meta"))
        p.meta = record["meta"].get<std::map<std::string, std::string>>();
      if (record.contains("image_path") && !record["image_path"].is_null()) {
        fs::path image_path = base / record["image_path"].get<std::string>();
        ImageBlob blob;
        std::string bytes = util::read_file(image_path.string());
        blob.bytes.assign(bytes.begin(), bytes.end());
        blob.media_type = media_type_from_extension(image_path.string());
        p.image = std::move(blob);
      }
    } catch (const json::exception& ex) {
      throw SchemaError("line " + std::to_string(line) + ": " + ex.what(), line);
    }
    if (!seen_ids.insert(p.id).second)
      throw SchemaError("duplicate id '" + p.id + "' on line " + std::to_string(line), line);
    std::vector<std::string> violations = validate_problem(p);
    if (!violations.empty()) {
      std::string msg = "line " + std::to_string(line) + ": invalid problem:";
      for (const std::string& v : violations) msg += " " + v + ";";
      throw SchemaError(msg, line);
    }
    problems.push_back(std::move(p));
  }
  return problems;
}

void save_dataset(const std::vector<Problem>& problems, const std::string& path,
                  const std::optional<std::string>& timestamp) {
  fs::path base = fs::path(path).parent_path();
  if (!base.empty()) fs::create_directories(base);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  if (timestamp.has_value()) {
    json header{{"schema_version", kSchemaVersion}, {"type", "header"}, {"built_at", *timestamp}};
    out << header.dump() << "\n";
  }
  for (const Problem& p : problems) {
    json record{{"schema_version", kSchemaVersion},
                {"id", p.id},
                {"domain", domain_name(p.domain)},
                {"question", p.question},
                {"dsl", p.dsl},
                {"gold", gold_to_json(p.gold)},
                {"meta", p.meta}};
    if (p.difficulty.has_value()) record["difficulty"] = *p.difficulty;
    if (p.image.has_value()) {
      std::string name = sanitize_for_filename(p.id) + media_type_extension(p.image->media_type);
      fs::path image_dir = base / "images";
      fs::create_directories(image_dir);
      std::string image_file = (image_dir / name).string();
      util::write_file(image_file,
                       std::string_view(reinterpret_cast<const char*>(p.image->bytes.data()),
                                        p.image->bytes.size()));
      record["image_path"] = "images/" + name;
    }
    out << record.dump() << "\n";
  }
}

GmathBuild build_gmath(const std::string& math_dump_path) {
  GmathBuild build;
  std::vector<std::pair<std::string, json>> sources;  // (name, record)

  auto add_json_file = [&](const fs::path& p) {
    json record;
    try {
      record = json::parse(util::read_file(p.string()));
    } catch (const std::exception& ex) {
      build.skipped.push_back({p.string(), std::string("parse error: ") + ex.what()});
      return;
    }
    sources.emplace_back(p.stem().string(), std::move(record));
  };

  if (fs::is_directory(math_dump_path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(math_dump_path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& p : files) add_json_file(p);
  } else if (util::ends_with(math_dump_path, ".jsonl")) {
    for (const auto& [line, record] : read_jsonl(math_dump_path))
      sources.emplace_back("line-" + std::to_string(line), record);
  } else {
    add_json_file(math_dump_path);
  }

  int counter = 0;
  for (const auto& [name, record] : sources) {
    if (!record.contains("problem") || !record.contains("solution")) {
      build.skipped.push_back({name, "missing problem/solution fields"});
      continue;
    }
    std::string text = record["problem"].get<std::string>();
    std::vector<AsymptoteBlock> blocks;
    try {
      blocks = extract_asymptote(text, name);
    } catch (const ParseError& ex) {
      build.skipped.push_back({name, ex.what()});
      continue;
    }
    if (blocks.empty()) continue;  // not a figure problem

    std::string solution = record["solution"].get<std::string>();
    std::optional<std::string> boxed = extract_boxed(solution);
    if (!boxed.has_value()) {
      build.skipped.push_back({name, "reference solution has no \\boxed answer"});
      continue;
    }

    Problem p;
    ++counter;
    p.id = "gmath-" + name;
    p.domain = TaskDomain::geometry;

    // dsl keeps the marked block regions; the question drops them.
    std::string dsl;
    std::string question = text;
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
      std::string region = "[asy]" + it->code + "[/asy]";
      std::size_t pos = question.rfind(region);
      if (pos != std::string::npos) question.erase(pos, region.size());
    }
    for (const AsymptoteBlock& block : blocks) {
      if (!dsl.empty()) dsl += "\n";
      dsl += "[asy]" + block.code + "[/asy]";
    }
    p.question = util::trim(question);
    p.dsl = dsl;
    p.gold = GoldAnswer::free_form(*boxed);
    if (record.contains("level")) {
      std::string level = record["level"].get<std::string>();
      std::size_t digit = level.find_first_of("0123456789");
      if (digit != std::string::npos) {
        int value = level[digit] - '0';
        if (value >= 1 && value <= 5) p.difficulty = value;
      }
    }
    p.meta["solution"] = solution;
    p.meta["source"] = name;
    if (record.contains("type") && record["type"].is_string())
      p.meta["type"] = record["type"].get<std::string>();
    build.problems.push_back(std::move(p));
  }
  return build;
}

namespace {

std::vector<std::string> tu_file_lines(const fs::path& path) {
  return util::split_lines(util::read_file(path.string()));
}

long tu_parse_int(const std::string& text, const fs::path& file, std::size_t line) {
  try {
    return std::stol(util::trim(text));
  } catch (...) {
    throw SchemaError(file.string() + ":" + std::to_string(line + 1) +
                          ": expected an integer, got '" + util::trim(text) + "'",
                      static_cast<long>(line + 1));
  }
}

fs::path tu_find_file(const std::string& dir, const std::string& suffix) {
  std::vector<fs::path> matches;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && util::ends_with(entry.path().filename().string(), suffix))
      matches.push_back(entry.path());
  }
  if (matches.empty()) throw Error("TU dataset file *" + suffix + " not found in " + dir);
  std::sort(matches.begin(), matches.end());
  return matches.front();
}

}  // namespace

std::vector<MutagGraph> load_mutag_graphs(const std::string& tu_dataset_dir) {
  fs::path a_file = tu_find_file(tu_dataset_dir, "_A.txt");
  fs::path indicator_file = tu_find_file(tu_dataset_dir, "_graph_indicator.txt");
  fs::path graph_labels_file = tu_find_file(tu_dataset_dir, "_graph_labels.txt");
  fs::path node_labels_file = tu_find_file(tu_dataset_dir, "_node_labels.txt");
  fs::path edge_labels_file = tu_find_file(tu_dataset_dir, "_edge_labels.txt");

  std::vector<long> graph_of_node;  // 1-based graphs
  {
    auto lines = tu_file_lines(indicator_file);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (util::trim(lines[i]).empty()) continue;
      graph_of_node.push_back(tu_parse_int(lines[i], indicator_file, i));
    }
  }
  long n_nodes = static_cast<long>(graph_of_node.size());
  long n_graphs = n_nodes == 0 ? 0 : *std::max_element(graph_of_node.begin(), graph_of_node.end());

  std::vector<int> node_codes;
  {
    auto lines = tu_file_lines(node_labels_file);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (util::trim(lines[i]).empty()) continue;
      long code = tu_parse_int(lines[i], node_labels_file, i);
      if (code < 0 || code > 6)
        throw SchemaError(node_labels_file.string() + ":" + std::to_string(i + 1) +
                              ": node code " + std::to_string(code) + " outside 0..6",
                          static_cast<long>(i + 1));
      node_codes.push_back(static_cast<int>(code));
    }
  }
  if (static_cast<long>(node_codes.size()) != n_nodes)
    throw Error("node label count does not match graph indicator count");

  std::vector<ClassLabel> graph_labels;
  {
    auto lines = tu_file_lines(graph_labels_file);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (util::trim(lines[i]).empty()) continue;
      long value = tu_parse_int(lines[i], graph_labels_file, i);
      // TU convention for this dataset: 1 = mutagenic, -1 = non-mutagenic.
      if (value == 1) {
        graph_labels.push_back(ClassLabel::mutagenic);
      } else if (value == -1 || value == 0) {
        graph_labels.push_back(ClassLabel::non_mutagenic);
      } else {
        throw SchemaError(graph_labels_file.string() + ":" + std::to_string(i + 1) +
                              ": unexpected graph label " + std::to_string(value),
                          static_cast<long>(i + 1));
      }
    }
  }
  if (static_cast<long>(graph_labels.size()) != n_graphs)
    throw Error("graph label count does not match graph count");

  // Local node indices per graph.
  std::vector<int> local_index(n_nodes, 0);
  std::vector<int> graph_size(n_graphs, 0);
  for (long node = 0; node < n_nodes; ++node) {
    long g = graph_of_node[node] - 1;
    if (g < 0 || g >= n_graphs)
      throw Error("graph indicator out of range on node " + std::to_string(node + 1));
    local_index[node] = graph_size[g]++;
  }

  std::vector<MutagGraph> graphs(n_graphs);
  for (long g = 0; g < n_graphs; ++g) {
    graphs[g].label = graph_labels[g];
    graphs[g].nodes.resize(graph_size[g]);
  }
  for (long node = 0; node < n_nodes; ++node)
    graphs[graph_of_node[node] - 1].nodes[local_index[node]] = node_codes[node];

  auto a_lines = tu_file_lines(a_file);
  auto e_lines = tu_file_lines(edge_labels_file);
  std::vector<std::set<std::pair<int, int>>> seen(n_graphs);
  std::size_t edge_line = 0;
  for (std::size_t i = 0; i < a_lines.size(); ++i) {
    std::string line = util::trim(a_lines[i]);
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw SchemaError(a_file.string() + ":" + std::to_string(i + 1) +
                            ": expected 'u, v' edge line",
                        static_cast<long>(i + 1));
    long u = tu_parse_int(line.substr(0, comma), a_file, i);
    long v = tu_parse_int(line.substr(comma + 1), a_file, i);
    while (edge_line < e_lines.size() && util::trim(e_lines[edge_line]).empty()) ++edge_line;
    if (edge_line >= e_lines.size())
      throw Error("edge label file shorter than adjacency file");
    long code = tu_parse_int(e_lines[edge_line], edge_labels_file, edge_line);
    ++edge_line;
    if (code < 0 || code > 3)
      throw SchemaError(edge_labels_file.string() + ": edge code " + std::to_string(code) +
                            " outside 0..3",
                        static_cast<long>(edge_line));
    if (u < 1 || u > n_nodes || v < 1 || v > n_nodes)
      throw SchemaError(a_file.string() + ":" + std::to_string(i + 1) + ": node id out of range",
                        static_cast<long>(i + 1));
    long gu = graph_of_node[u - 1] - 1;
    long gv = graph_of_node[v - 1] - 1;
    if (gu != gv)
      throw SchemaError(a_file.string() + ":" + std::to_string(i + 1) +
                            ": edge crosses graph boundary",
                        static_cast<long>(i + 1));
    int lu = local_index[u - 1];
    int lv = local_index[v - 1];
    std::pair<int, int> canonical{std::min(lu, lv), std::max(lu, lv)};
    if (seen[gu].insert(canonical).second) {
      graphs[gu].edges.push_back({canonical.first, canonical.second, static_cast<int>(code)});
    }
  }
  return graphs;
}

std::vector<Problem> build_mutag(const std::string& tu_dataset_dir) {
  std::vector<MutagGraph> graphs = load_mutag_graphs(tu_dataset_dir);
  int mutagenic = 0;
  for (const MutagGraph& g : graphs)
    if (g.label == ClassLabel::mutagenic) ++mutagenic;
  std::string class_counts = "mutagenic=" + std::to_string(mutagenic) +
                             ",non_mutagenic=" + std::to_string(graphs.size() - mutagenic);

  std::vector<Problem> problems;
  problems.reserve(graphs.size());
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    Problem p;
    p.id = "mutag-" + std::to_string(g + 1);
    p.domain = TaskDomain::molecules;
    p.question =
        "Classify the compound as mutagenic or non-mutagenic based on its structure.";
    try {
      p.dsl = write_smiles(graphs[g]);
    } catch (const std::exception& ex) {
      throw Error("graph " + std::to_string(g + 1) + ": " + ex.what());
    }
    p.gold = GoldAnswer::label(graphs[g].label);
    p.meta["nodes"] = std::to_string(graphs[g].nodes.size());
    p.meta["edges"] = std::to_string(graphs[g].edges.size());
    p.meta["class_counts"] = class_counts;
    problems.push_back(std::move(p));
  }
  return problems;
}

void save_runs(const std::vector<PipelineRun>& runs, const std::string& path, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  for (const PipelineRun& run : runs) out << run_to_json(run).dump() << "\n";
}

std::vector<PipelineRun> load_runs(const std::string& path) {
  std::vector<PipelineRun> runs;
  for (const auto& [line, record] : read_jsonl(path)) runs.push_back(run_from_json(record, line));
  return runs;
}

void save_annotations(const std::vector<AnnotationRecord>& records, const std::string& path,
                      bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  for (const AnnotationRecord& record : records) {
    json critical = json::array();
    for (const CriticalStep& step : record.critical)
      critical.push_back({{"id", step.id}, {"description", step.description}});
    json mappings = json::array();
    for (const StepMapping& mapping : record.mappings) {
      json mj{{"step_text", mapping.step_text}, {"token_count", mapping.token_count}};
      if (mapping.critical_id.has_value()) mj["critical_id"] = *mapping.critical_id;
      mappings.push_back(std::move(mj));
    }
    json tokens = json::object();
    for (const auto& [id, total] : record.tokens_per_critical)
      tokens[std::to_string(id)] = total;
    json j{{"schema_version", kSchemaVersion},
           {"problem_id", record.problem_id},
           {"method", record.method},
           {"critical", critical},
           {"mappings", mappings},
           {"tokens_per_critical", tokens},
           {"unmapped_tokens", record.unmapped_tokens},
           {"average_tokens", record.average_tokens},
           {"notes", record.notes}};
    if (record.category.has_value()) j["category"] = *record.category;
    out << j.dump() << "\n";
  }
}

std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  std::vector<AnnotationRecord> records;
  for (const auto& [line, j] : read_jsonl(path)) {
    check_schema_version(j, line);
    AnnotationRecord record;
    record.problem_id = j.at("problem_id").get<std::string>();
    if (j.contains("method")) record.method = j["method"].get<std::string>();
    if (j.contains("category")) record.category = j["category"].get<std::string>();
    for (const json& cj : j.at("critical"))
      record.critical.push_back({cj.at("id").get<int>(), cj.at("description").get<std::string>()});
    for (const json& mj : j.at("mappings")) {
      StepMapping mapping;
      mapping.step_text = mj.at("step_text").get<std::string>();
      mapping.token_count = mj.at("token_count").get<int>();
      if (mj.contains("critical_id")) mapping.critical_id = mj["critical_id"].get<int>();
      record.mappings.push_back(std::move(mapping));
    }
    for (const auto& [key, value] : j.at("tokens_per_critical").items())
      record.tokens_per_critical[std::stoi(key)] = value.get<long>();
    record.unmapped_tokens = j.at("unmapped_tokens").get<long>();
    record.average_tokens = j.at("average_tokens").get<double>();
    record.notes = j.at("notes").get<std::vector<std::string>>();
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace bba
