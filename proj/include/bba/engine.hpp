#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bba/fen.hpp"
#include "bba/model.hpp"

namespace bba {

// White-relative engine evaluation: centipawns or distance to mate.
struct EngineScore {
  enum class Kind { centipawns, mate };

  Kind kind = Kind::centipawns;
  int cp = 0;          // valid for centipawns
  int mate_moves = 0;  // valid for mate, >= 1
  Color winner = Color::white;  // valid for mate

  static EngineScore centipawns(int value) { return {Kind::centipawns, value, 0, Color::white}; }
  static EngineScore mate(int moves, Color who) { return {Kind::mate, 0, moves, who}; }

  bool operator==(const EngineScore&) const = default;
};

struct EngineConfig {
  std::string binary_path;
  int depth = 18;
  int threads = 1;
  int hash_mb = 64;
  int timeout_ms = 60'000;  // per position
};

// Line-based UCI client over the engine's stdin/stdout.
class UciEngine {
 public:
  // Spawns the binary and performs the uci/isready handshake.
  explicit UciEngine(const EngineConfig& cfg);
  ~UciEngine();

  UciEngine(const UciEngine&) = delete;
  UciEngine& operator=(const UciEngine&) = delete;

  // `position fen ...`, `go depth N`; parses the last info score line
  // before bestmove and converts it to a white-relative score.
  EngineScore evaluate(const FenPosition& position);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrapper: spawn, evaluate, shut down.
EngineScore evaluate_position(const FenPosition& fen, const EngineConfig& cfg);

// Default slope of the centipawn -> win-probability logistic.
inline constexpr double kDefaultWinprobSlope = 0.00368208;

// White win probability: 1 / (1 + exp(-k * cp)); mate scores map to
// exactly 0 or 1. Strictly increasing in cp with p(cp) + p(-cp) = 1.
double cp_to_winprob(const EngineScore& s, double k = kDefaultWinprobSlope);

// p < 1/3 -> black_adv; 1/3 <= p <= 2/3 -> balanced; p > 2/3 -> white_adv.
ClassLabel winprob_to_label(double p);

// Tertile split of |cp| over the dataset (mate counts as 10000): the
// clearest advantages are level 1, the most balanced level 3; ties break
// toward the lower level.
int cp_to_difficulty(const EngineScore& s, const std::vector<EngineScore>& dataset_scores);

struct ChessAdvBuild {
  std::vector<Problem> problems;
  // (input fen, error message) for every skipped position.
  std::vector<std::pair<std::string, std::string>> skipped;
};

// Evaluates every FEN, maps scores to labels and difficulty levels, and
// renders the board SVG as the image. Per-position failures are recorded
// in `skipped` and never abort the build.
ChessAdvBuild build_chessadv(const std::vector<std::string>& fens, const EngineConfig& cfg);

}  // namespace bba
