// Acceptance suite: runs every offline acceptance criterion and prints
// one [PASS]/[FAIL]/[SKIP] line per criterion. Exit code = number of
// failures.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
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
#include "support/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/graph_iso.hpp"
#include "support/normalize_cases.hpp"

using namespace bba;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum class Kind { pass, fail, skip };
  Kind kind = Kind::pass;
  std::string detail;
};

struct Check {
  void require(bool condition, const std::string& message) {
    if (!condition) throw Error(message);
  }
  void skip(const std::string& reason) { throw SkipSignal{reason}; }
  struct SkipSignal {
    std::string reason;
  };
};

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "bba_acceptance";
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> canned(int n, const std::string& last) {
  std::vector<std::string> texts;
  for (int i = 0; i + 1 < n; ++i) texts.push_back("chain text " + std::to_string(i + 1));
  texts.push_back(last);
  return texts;
}

std::string request_text(const ChatRequest& req) {
  std::string out;
  for (const Message& m : req.messages) out += m.joined_text();
  return out;
}

int request_images(const ChatRequest& req) {
  int n = 0;
  for (const Message& m : req.messages) n += m.image_part_count();
  return n;
}

// ---------------------------------------------------------------------------
// criterion bodies
// ---------------------------------------------------------------------------

void criterion_call_budgets(Check& check) {
  Problem p = test_support::chess_problem();
  auto run_with = [&](const MethodId& method, int responses) {
    auto cfg = test_support::scripted_config(
        canned(responses, "done <answer>balanced</answer>"));
    PipelineRun run = run_method(p, method, cfg);
    check.require(!run.failed, method_name(method) + " run failed: " + run.error);
    return static_cast<int>(run.calls.size());
  };

  check.require(run_with(MethodId{MethodId::Kind::bba, 0}, 4) == 4, "bba != 4 calls");
  check.require(run_with(MethodId{MethodId::Kind::bba_minus_diagnostic, 0}, 3) == 3,
                "-diagnostic != 3 calls");
  check.require(run_with(MethodId{MethodId::Kind::bba_minus_visual, 0}, 4) == 4,
                "-visual != 4 calls");
  check.require(run_with(MethodId{MethodId::Kind::bba_minus_dsl, 0}, 4) == 4,
                "-dsl != 4 calls");
  check.require(run_with(MethodId{MethodId::Kind::cot_v, 0}, 1) == 1, "cot_v != 1 call");
  check.require(run_with(MethodId{MethodId::Kind::cot_d, 0}, 1) == 1, "cot_d != 1 call");
  check.require(run_with(MethodId{MethodId::Kind::cot_m, 0}, 1) == 1, "cot_m != 1 call");
  check.require(run_with(MethodId{MethodId::Kind::plan_and_solve, 0}, 2) == 2,
                "plan_and_solve != 2 calls");
  check.require(run_with(MethodId{MethodId::Kind::ccot, 0}, 2) == 2, "ccot != 2 calls");
  check.require(run_with(MethodId{MethodId::Kind::ddcot, 0}, 2) == 2, "ddcot != 2 calls");
  for (int turns = 2; turns <= 4; ++turns) {
    int expected = 1 + 2 * (turns - 1);
    check.require(run_with(MethodId::self_refine(turns), expected) == expected,
                  "self_refine(" + std::to_string(turns) + ") != " + std::to_string(expected));
  }

  // least_to_most: 1 + k with k <= 6
  {
    auto cfg = test_support::scripted_config(
        {"1. part one\n2. part two", "a <answer>balanced</answer>",
         "b <answer>balanced</answer>"});
    check.require(run_least_to_most(p, cfg).calls.size() == 3, "least_to_most 1+2 != 3");

    std::string nine;
    for (int i = 1; i <= 9; ++i) nine += std::to_string(i) + ". sub\n";
    std::vector<std::string> texts{nine};
    for (int i = 0; i < 6; ++i) texts.push_back("s <answer>balanced</answer>");
    PipelineRun capped = run_least_to_most(p, test_support::scripted_config(texts));
    check.require(capped.calls.size() == 7, "least_to_most cap != 1+6");
    check.require(capped.has_flag("subproblem_cap"), "missing subproblem_cap flag");
  }
}

void criterion_modality_isolation(Check& check) {
  for (const Problem& p : {test_support::geometry_problem(), test_support::chess_problem(),
                           test_support::molecules_problem()}) {
    std::string answer = p.domain == TaskDomain::geometry
                             ? "<answer>6</answer>"
                             : (p.domain == TaskDomain::chess
                                    ? "<answer>balanced</answer>"
                                    : "<answer>mutagenic</answer>");
    auto cfg = test_support::scripted_config(canned(4, answer));
    PipelineRun run = run_bba(p, cfg);
    check.require(!run.failed, "bba failed on " + domain_name(p.domain));
    check.require(run.calls.size() == 4, "expected 4 calls");
    check.require(request_text(run.calls[0].first).find(p.dsl) == std::string::npos,
                  domain_name(p.domain) + ": elicit_vision leaked the DSL text");
    check.require(request_images(run.calls[0].first) == 1,
                  domain_name(p.domain) + ": elicit_vision lost its image");
    check.require(request_images(run.calls[1].first) == 0,
                  domain_name(p.domain) + ": elicit_dsl carries an image part");
    check.require(request_text(run.calls[1].first).find(p.dsl) != std::string::npos,
                  domain_name(p.domain) + ": elicit_dsl lost the DSL text");
  }
}

void criterion_relative_improvements(Check& check) {
  struct Case {
    double ours, baseline, expected;
  };
  for (const Case& c : {Case{34.22, 29.95, 14.26}, Case{46.99, 42.62, 10.25},
                        Case{83.52, 78.57, 6.30}}) {
    double got = relative_improvement(c.ours, c.baseline);
    std::ostringstream msg;
    msg << "relative_improvement(" << c.ours << ", " << c.baseline << ") = " << got
        << ", expected " << c.expected << " +/- 0.01";
    check.require(std::fabs(got - c.expected) <= 0.01, msg.str());
  }
}

void criterion_table_average(Check& check) {
  // Published per-dataset accuracies and Avg column. The Avg column pools
  // correct counts over the evaluated items; the evaluated-set sizes
  // consistent with every printed accuracy are 187 / 183 / 182 (the
  // molecular task was scored on 182 items).
  struct Row {
    const char* method;
    double g, c, m, avg;
  };
  const Row rows[] = {
      {"cot_v", 23.53, 40.98, 75.82, 46.56},
      {"cot_d", 23.12, 38.80, 76.92, 46.01},
      {"plan_and_solve", 25.67, 42.62, 78.57, 48.73},
      {"least_to_most", 25.13, 38.25, 73.63, 45.47},
      {"cot_m", 28.34, 42.08, 77.47, 49.09},
      {"ccot", 26.74, 39.34, 68.68, 44.75},
      {"ddcot", 29.95, 37.70, 73.08, 46.74},
      {"bba", 34.22, 46.99, 83.52, 54.71},
  };
  const int n_g = 187, n_c = 183, n_m = 182;
  double worst = 0.0;
  for (const Row& row : rows) {
    long correct_g = std::lround(row.g * n_g / 100.0);
    long correct_c = std::lround(row.c * n_c / 100.0);
    long correct_m = std::lround(row.m * n_m / 100.0);
    double avg = 100.0 * static_cast<double>(correct_g + correct_c + correct_m) /
                 (n_g + n_c + n_m);
    double deviation = std::fabs(avg - row.avg);
    worst = std::max(worst, deviation);
    std::ostringstream msg;
    msg << row.method << ": recomputed Avg " << avg << " vs published " << row.avg
        << " (|diff| = " << deviation << " > 0.005)";
    check.require(deviation <= 0.005, msg.str());
  }

  // The reporter's Avg uses the same pooling convention end to end.
  std::vector<Problem> problems;
  std::vector<PipelineRun> runs;
  struct Block {
    TaskDomain domain;
    int total;
    int correct;
  };
  for (const Block& block : {Block{TaskDomain::geometry, 187, 53},
                             Block{TaskDomain::chess, 183, 77},
                             Block{TaskDomain::molecules, 182, 141}}) {
    for (int i = 0; i < block.total; ++i) {
      Problem p;
      p.id = domain_name(block.domain) + std::to_string(i);
      p.domain = block.domain;
      p.question = "q";
      p.dsl = "d";
      p.gold = block.domain == TaskDomain::geometry
                   ? GoldAnswer::free_form("1")
                   : GoldAnswer::label(block.domain == TaskDomain::chess
                                           ? ClassLabel::balanced
                                           : ClassLabel::mutagenic);
      problems.push_back(p);
      PipelineRun run;
      run.method = MethodId{MethodId::Kind::cot_m, 0};
      run.problem_id = p.id;
      run.final_answer = p.gold;
      run.correct = i < block.correct;
      runs.push_back(std::move(run));
    }
  }
  MetricsTable table = score_runs(runs, problems);
  check.require(std::fabs(table.average("cot_m") - 49.09) <= 0.005,
                "score_runs Avg does not reproduce 49.09");
}

void criterion_fen_suite(Check& check) {
  const std::string initial = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
  check.require(write_fen(parse_fen(initial)) == initial, "initial position round trip");

  std::mt19937 rng(424242);
  std::uniform_int_distribution<int> percent(0, 99);
  std::uniform_int_distribution<int> piece_dist(0, 5);
  std::uniform_int_distribution<int> file_dist(0, 7);
  for (int i = 0; i < 1000; ++i) {
    FenPosition p;
    for (int rank = 0; rank < 8; ++rank)
      for (int file = 0; file < 8; ++file)
        if (percent(rng) >= 70)
          p.board[rank][file] = ChessPiece{percent(rng) < 50 ? Color::white : Color::black,
                                           static_cast<PieceType>(piece_dist(rng))};
    p.active = percent(rng) < 50 ? Color::white : Color::black;
    for (char c : {'K', 'Q', 'k', 'q'})
      if (percent(rng) < 40) p.castling.insert(c);
    if (percent(rng) < 25) p.en_passant = Square{file_dist(rng), percent(rng) < 50 ? 2 : 5};
    p.halfmove = percent(rng);
    p.fullmove = 1 + percent(rng);
    check.require(parse_fen(write_fen(p)) == p,
                  "random board round trip failed: " + write_fen(p));
  }

  struct Malformed {
    const char* fen;
    const char* expected;
  };
  const Malformed cases[] = {
      {"rnbqkbnr/ppppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1",
       "rank 7 expands to 9 squares"},
      {"8/8/8/8/8/8/8/8 w - -", "expected 6 FEN fields"},
      {"8/8/8/8/8/8/8/x7 w - - 0 1", "invalid piece character"},
      {"8/8/8/8/8/8/8/8 w - e4 0 1", "en-passant"},
      {"8/8/8/8/8/8/8/8 w - - 0 0", "fullmove"},
  };
  for (const Malformed& c : cases) {
    bool threw = false;
    try {
      parse_fen(c.fen);
    } catch (const ParseError& ex) {
      threw = true;
      check.require(std::string(ex.what()).find(c.expected) != std::string::npos,
                    std::string("wrong error for '") + c.fen + "': " + ex.what());
    }
    check.require(threw, std::string("no error for malformed FEN: ") + c.fen);
  }
}

void criterion_winprob(Check& check) {
  check.require(cp_to_winprob(EngineScore::centipawns(0)) == 0.5, "p(0) != 0.5 exactly");
  double prev = cp_to_winprob(EngineScore::centipawns(-2001));
  for (int cp = -2000; cp <= 2000; ++cp) {
    double p = cp_to_winprob(EngineScore::centipawns(cp));
    check.require(p > prev, "not strictly increasing at cp=" + std::to_string(cp));
    prev = p;
    double sum = p + cp_to_winprob(EngineScore::centipawns(-cp));
    check.require(std::fabs(sum - 1.0) <= 1e-12,
                  "symmetry violated at cp=" + std::to_string(cp));
  }
  check.require(winprob_to_label(0.30) == ClassLabel::black_adv, "label(0.30) != black_adv");
  check.require(winprob_to_label(0.50) == ClassLabel::balanced, "label(0.50) != balanced");
  check.require(winprob_to_label(0.80) == ClassLabel::white_adv, "label(0.80) != white_adv");
}

std::string find_engine_binary() {
  for (const char* var : {"BBA_STOCKFISH_PATH", "BBA_ENGINE_PATH"}) {
    if (const char* value = std::getenv(var)) {
      if (access(value, X_OK) == 0) return value;
    }
  }
  for (const char* path : {"/usr/games/stockfish", "/usr/bin/stockfish",
                           "/usr/local/bin/stockfish"}) {
    if (access(path, X_OK) == 0) return path;
  }
  return "";
}

FenPosition mirror_position(const FenPosition& p) {
  FenPosition m;
  for (int rank = 0; rank < 8; ++rank) {
    for (int file = 0; file < 8; ++file) {
      const auto& sq = p.board[rank][file];
      if (!sq.has_value()) continue;
      Color flipped = sq->color == Color::white ? Color::black : Color::white;
      m.board[7 - rank][file] = ChessPiece{flipped, sq->type};
    }
  }
  m.active = p.active == Color::white ? Color::black : Color::white;
  for (char c : p.castling) {
    if (c == 'K') m.castling.insert('k');
    if (c == 'Q') m.castling.insert('q');
    if (c == 'k') m.castling.insert('K');
    if (c == 'q') m.castling.insert('Q');
  }
  if (p.en_passant.has_value())
    m.en_passant = Square{p.en_passant->file, 7 - p.en_passant->rank};
  m.halfmove = p.halfmove;
  m.fullmove = p.fullmove;
  return m;
}

void criterion_engine_integration(Check& check) {
  std::string binary = find_engine_binary();
  if (binary.empty())
    check.skip("no UCI engine configured (set BBA_STOCKFISH_PATH or BBA_ENGINE_PATH)");

  EngineConfig cfg;
  cfg.binary_path = binary;
  cfg.depth = 12;
  cfg.threads = 1;

  FenPosition initial =
      parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
  EngineScore score = evaluate_position(initial, cfg);
  check.require(score.kind == EngineScore::Kind::centipawns, "initial position mate score?");
  check.require(std::abs(score.cp) < 100,
                "initial position |cp| = " + std::to_string(std::abs(score.cp)) + " >= 100");
  check.require(winprob_to_label(cp_to_winprob(score)) == ClassLabel::balanced,
                "initial position not labeled balanced");

  // White up a queen vs the color-mirrored position.
  FenPosition up = parse_fen("rnb1kbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
  FenPosition down = mirror_position(up);
  UciEngine engine_a(cfg);
  EngineScore a = engine_a.evaluate(up);
  UciEngine engine_b(cfg);
  EngineScore b = engine_b.evaluate(down);
  check.require(a.kind == EngineScore::Kind::centipawns &&
                    b.kind == EngineScore::Kind::centipawns,
                "mirror test hit a mate score");
  check.require(a.cp > 200, "queen-up position not clearly winning for white");
  check.require(b.cp < -200, "mirrored position not winning for black (sign convention)");
  // Fixed-depth searches are not exactly color-symmetric (move ordering
  // differs under the flip), so negation holds up to a small search
  // wobble; the exact conversion is pinned by the mock-engine tests.
  int tolerance = std::max(10, std::abs(a.cp) / 20);
  check.require(std::abs(a.cp + b.cp) <= tolerance,
                "mirrored position is not a negation: " + std::to_string(a.cp) + " vs " +
                    std::to_string(b.cp));
}

void criterion_smiles_suite(Check& check) {
  SmilesMolecule benzene = parse_smiles("c1ccccc1");
  check.require(benzene.atoms.size() == 6 && benzene.bonds.size() == 6, "benzene shape");
  for (const auto& atom : benzene.atoms)
    check.require(atom.element == "C" && atom.aromatic, "benzene atom");
  for (const auto& bond : benzene.bonds)
    check.require(bond.order == BondOrder::aromatic, "benzene bond");

  SmilesMolecule nitro = parse_smiles("C[N+](=O)[O-]");
  check.require(nitro.atoms[1].charge == 1 && nitro.atoms[3].charge == -1, "nitro charges");
  check.require(nitro.bonds[1].order == BondOrder::double_bond, "nitro double bond");

  // 188-graph round-trip with the independent isomorphism oracle. Real TU
  // files are used when supplied; the deterministic synthetic corpus
  // otherwise.
  std::vector<MutagGraph> graphs;
  const char* mutag_dir = std::getenv("BBA_MUTAG_DIR");
  if (mutag_dir != nullptr && fs::is_directory(mutag_dir)) {
    graphs = load_mutag_graphs(mutag_dir);
  } else {
    graphs = test_support::synthetic_mutag_corpus(188);
  }
  check.require(graphs.size() >= 188, "corpus has fewer than 188 graphs");
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    std::string smiles = write_smiles(graphs[i]);
    SmilesMolecule parsed = parse_smiles(smiles);
    check.require(test_support::isomorphic(test_support::from_mutag(graphs[i]),
                                           test_support::from_smiles(parsed)),
                  "graph " + std::to_string(i) + " round trip not isomorphic: " + smiles);
  }
}

void criterion_normalization(Check& check) {
  check.require(test_support::kNormalizeCaseCount >= 30, "fewer than 30 frozen pairs");
  for (const auto& c : test_support::kNormalizeCases) {
    std::string got = normalize_math(c.input);
    check.require(got == c.expected,
                  std::string("normalize('") + c.input + "') = '" + got + "', expected '" +
                      c.expected + "'");
  }
  check.require(math_equiv("\\frac12", "\\frac{1}{2}"), "frac bracing equivalence");
  check.require(math_equiv("1,000", "1000"), "comma removal equivalence");
  check.require(!math_equiv("0.5", "\\frac{1}{2}"),
                "string-level checker must not equate 0.5 and 1/2");
}

void criterion_token_accounting(Check& check) {
  std::vector<StepMapping> worked{{1, "a", 10}, {std::nullopt, "b", 5}, {1, "c", 7}};
  TokenAccounting accounting = tokens_per_critical_step(worked, 2);
  check.require(accounting.per_critical.at(1) == 17 && accounting.per_critical.at(2) == 0,
                "worked example totals");
  check.require(std::fabs(accounting.average - 8.5) < 1e-12, "worked example average");

  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> step_dist(0, 30);
  std::uniform_int_distribution<int> token_dist(0, 50);
  for (int trial = 0; trial < 500; ++trial) {
    int critical_count = step_dist(rng) % 8;
    std::uniform_int_distribution<int> id_dist(0, critical_count);
    std::vector<StepMapping> mappings;
    for (int i = step_dist(rng); i > 0; --i) {
      StepMapping m;
      int id = critical_count == 0 ? 0 : id_dist(rng);
      if (id > 0) m.critical_id = id;
      m.token_count = token_dist(rng);
      mappings.push_back(m);
    }
    TokenAccounting acc = tokens_per_critical_step(mappings, critical_count);
    long mapped = 0;
    for (const auto& [id, total] : acc.per_critical) mapped += total;
    check.require(mapped + acc.unmapped_tokens == acc.total_tokens,
                  "conservation violated on trial " + std::to_string(trial));
  }
}

void criterion_determinism(Check& check) {
  fs::path dir = work_dir();
  std::string cache = (dir / "determinism_cache.jsonl").string();
  std::remove(cache.c_str());

  std::vector<Problem> problems;
  for (int i = 0; i < 5; ++i) {
    Problem p = test_support::chess_problem();
    p.id = "det-" + std::to_string(i);
    p.question += " variant " + std::to_string(i);
    problems.push_back(p);
  }

  // Populate the replay cache through a scripted transport.
  {
    std::vector<std::string> texts;
    for (int i = 0; i < 5; ++i) {
      texts.push_back("vision " + std::to_string(i));
      texts.push_back("dsl " + std::to_string(i));
      texts.push_back("diag " + std::to_string(i));
      texts.push_back("final <answer>balanced</answer>");
    }
    auto inner = std::make_shared<ChatBackend>(ScriptedBackend::from_texts(texts));
    PipelineConfig cfg;
    cfg.backend = std::make_shared<ChatBackend>(ReplayBackend{cache, false, inner});
    cfg.prompts = test_support::library();
    auto runs = run_batch(problems, MethodId{MethodId::Kind::bba, 0}, cfg, 1);
    for (const auto& run : runs)
      check.require(!run.failed, "recording run failed: " + run.error);
  }

  auto execute = [&](int concurrency, const std::string& out_name) {
    PipelineConfig cfg;
    cfg.backend = std::make_shared<ChatBackend>(ReplayBackend{cache, true, nullptr});
    cfg.prompts = test_support::library();
    auto runs = run_batch(problems, MethodId{MethodId::Kind::bba, 0}, cfg, concurrency);
    check.require(cfg.backend->network_calls() == 0, "replay run touched the network");
    std::string path = (dir / out_name).string();
    save_runs(runs, path);
    return path;
  };
  std::string first = execute(1, "det_runs_a.jsonl");
  std::string second = execute(4, "det_runs_b.jsonl");

  // byte-identical modulo the wall_time field
  auto normalized_lines = [&](const std::string& path) {
    std::vector<std::string> lines;
    for (const std::string& line : util::split_lines(util::read_file(path))) {
      if (util::trim(line).empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      j["wall_time_s"] = 0.0;
      lines.push_back(j.dump());
    }
    return lines;
  };
  check.require(normalized_lines(first) == normalized_lines(second),
                "run files differ beyond wall_time");
}

void criterion_contingent_datasets(Check& check) {
  const char* gmath_dir = std::getenv("BBA_GMATH_DIR");
  const char* mutag_dir = std::getenv("BBA_MUTAG_DIR");
  if (gmath_dir == nullptr && mutag_dir == nullptr)
    check.skip("source data not supplied (set BBA_GMATH_DIR / BBA_MUTAG_DIR)");

  if (gmath_dir != nullptr) {
    GmathBuild build = build_gmath(gmath_dir);
    check.require(build.problems.size() == 187,
                  "G-MATH builder yielded " + std::to_string(build.problems.size()) +
                      " problems, expected 187");
    AsyLengthStats stats = asy_length_stats(build.problems, 1, 3);
    check.require(std::fabs(stats.mean - 186.89) <= 2.0,
                  "levels 1-3 mean Asymptote length " + util::format_fixed(stats.mean, 2) +
                      " outside 186.89 +/- 2");
  }
  if (mutag_dir != nullptr) {
    std::vector<Problem> problems = build_mutag(mutag_dir);
    check.require(problems.size() == 188, "MUTAG builder yielded " +
                                              std::to_string(problems.size()) +
                                              " problems, expected 188");
  }
}

struct Criterion {
  int number;
  std::string name;
  double budget_seconds;
  std::function<void(Check&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "pipeline call budgets", 5.0, criterion_call_budgets},
      {2, "modality isolation", 5.0, criterion_modality_isolation},
      {3, "relative-improvement reproduction", 5.0, criterion_relative_improvements},
      {4, "table average reproduction", 5.0, criterion_table_average},
      {5, "FEN round-trip and error suite", 5.0, criterion_fen_suite},
      {6, "win-probability properties", 5.0, criterion_winprob},
      {7, "engine integration", 60.0, criterion_engine_integration},
      {8, "SMILES parse/write isomorphism", 60.0, criterion_smiles_suite},
      {9, "math normalization fixtures", 5.0, criterion_normalization},
      {10, "token accounting conservation", 5.0, criterion_token_accounting},
      {11, "replay determinism across concurrency", 30.0, criterion_determinism},
      {12, "contingent dataset checks", 120.0, criterion_contingent_datasets},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    Check check;
    try {
      criterion.body(check);
    } catch (const Check::SkipSignal& skip) {
      outcome.kind = Outcome::Kind::skip;
      outcome.detail = skip.reason;
    } catch (const std::exception& ex) {
      outcome.kind = Outcome::Kind::fail;
      outcome.detail = ex.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (outcome.kind == Outcome::Kind::pass && elapsed > criterion.budget_seconds) {
      outcome.kind = Outcome::Kind::fail;
      outcome.detail = "exceeded time budget of " +
                       util::format_fixed(criterion.budget_seconds, 0) + "s";
    }

    const char* tag = outcome.kind == Outcome::Kind::pass
                          ? "PASS"
                          : outcome.kind == Outcome::Kind::skip ? "SKIP" : "FAIL";
    std::printf("criterion %2d [%s] %s (%.2fs)%s%s\n", criterion.number, tag,
                criterion.name.c_str(), elapsed,
                outcome.detail.empty() ? "" : ": ", outcome.detail.c_str());
    if (outcome.kind == Outcome::Kind::fail) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
