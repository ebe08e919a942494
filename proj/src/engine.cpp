#include "bba/engine.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>

#include "bba/errors.hpp"
#include "bba/util.hpp"

namespace bba {

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string token;
  while (ss >> token) tokens.push_back(token);
  return tokens;
}

}  // namespace

struct UciEngine::Impl {
  pid_t pid = -1;
  int to_engine = -1;    // write end
  int from_engine = -1;  // read end
  std::string read_buffer;
  int timeout_ms = 60'000;
  int depth = 18;

  void spawn(const EngineConfig& cfg) {
    // A crashed engine must surface as EPIPE on write, not kill the
    // harness.
    signal(SIGPIPE, SIG_IGN);
    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
      throw EngineError("pipe() failed: " + std::string(std::strerror(errno)));
    pid = fork();
    if (pid < 0) throw EngineError("fork() failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execlp(cfg.binary_path.c_str(), cfg.binary_path.c_str(), (char*)nullptr);
      _exit(127);  // exec failed
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_engine = in_pipe[1];
    from_engine = out_pipe[0];
    timeout_ms = cfg.timeout_ms;
    depth = cfg.depth;
  }

  void write_line(const std::string& line) {
    std::string out = line + "\n";
    std::size_t written = 0;
    while (written < out.size()) {
      ssize_t n = write(to_engine, out.data() + written, out.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw EngineError("engine pipe write failed: " + std::string(std::strerror(errno)));
      }
      written += static_cast<std::size_t>(n);
    }
  }

  // Blocks until a full line is available or the deadline passes.
  std::string read_line(std::chrono::steady_clock::time_point deadline) {
    for (;;) {
      std::size_t nl = read_buffer.find('\n');
      if (nl != std::string::npos) {
        std::string line = read_buffer.substr(0, nl);
        read_buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      auto now = std::chrono::steady_clock::now();
      if (now >= deadline) throw EngineError("UCI protocol timeout");
      int wait_ms = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
      struct pollfd pfd{from_engine, POLLIN, 0};
      int ready = poll(&pfd, 1, std::min(wait_ms, 1000));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw EngineError("poll() failed: " + std::string(std::strerror(errno)));
      }
      if (ready == 0) continue;
      char buf[4096];
      ssize_t n = read(from_engine, buf, sizeof(buf));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw EngineError("engine pipe read failed: " + std::string(std::strerror(errno)));
      }
      if (n == 0) throw EngineError("engine closed its output pipe");
      read_buffer.append(buf, static_cast<std::size_t>(n));
    }
  }

  // Reads until a line starting with `token` arrives.
  void wait_for(const std::string& token) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
      std::string line = read_line(deadline);
      if (line == token || util::starts_with(line, token + " ")) return;
    }
  }

  void shutdown() {
    if (pid < 0) return;
    if (to_engine >= 0) {
      const char* quit = "quit\n";
      ssize_t ignored = write(to_engine, quit, 5);
      (void)ignored;
      close(to_engine);
      to_engine = -1;
    }
    if (from_engine >= 0) {
      close(from_engine);
      from_engine = -1;
    }
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid) {
        pid = -1;
        return;
      }
      usleep(20'000);
    }
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    pid = -1;
  }
};

UciEngine::UciEngine(const EngineConfig& cfg) : impl_(std::make_unique<Impl>()) {
  if (cfg.depth < 1) throw EngineError("engine depth must be >= 1");
  if (access(cfg.binary_path.c_str(), X_OK) != 0)
    throw EngineError("engine binary not found or not executable: " + cfg.binary_path);
  impl_->spawn(cfg);
  impl_->write_line("uci");
  impl_->wait_for("uciok");
  impl_->write_line("setoption name Threads value " + std::to_string(cfg.threads));
  impl_->write_line("setoption name Hash value " + std::to_string(cfg.hash_mb));
  impl_->write_line("isready");
  impl_->wait_for("readyok");
}

UciEngine::~UciEngine() {
  if (impl_) impl_->shutdown();
}

EngineScore UciEngine::evaluate(const FenPosition& position) {
  std::string fen = write_fen(position);
  impl_->write_line("ucinewgame");
  impl_->write_line("isready");
  impl_->wait_for("readyok");
  impl_->write_line("position fen " + fen);
  impl_->write_line("go depth " + std::to_string(impl_->depth));

  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(impl_->timeout_ms);
  std::optional<EngineScore> last_score;
  for (;;) {
    std::string line = impl_->read_line(deadline);
    std::vector<std::string> tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "info") {
      for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
        if (tokens[i] != "score") continue;
        const std::string& kind = tokens[i + 1];
        int value = 0;
        try {
          value = std::stoi(tokens[i + 2]);
        } catch (...) {
          continue;
        }
        // UCI scores are relative to the side to move; convert to
        // white-relative.
        bool black_to_move = position.active == Color::black;
        if (kind == "cp") {
          last_score = EngineScore::centipawns(black_to_move ? -value : value);
        } else if (kind == "mate") {
          bool mover_wins = value > 0;
          Color mover = position.active;
          Color winner = mover_wins ? mover : (mover == Color::white ? Color::black : Color::white);
          // "mate 0" (side to move already checkmated) clamps to distance 1.
          last_score = EngineScore::mate(std::max(1, std::abs(value)), winner);
        }
      }
    } else if (tokens[0] == "bestmove") {
      if (!last_score.has_value())
        throw EngineError("engine produced no score line before bestmove");
      return *last_score;
    }
  }
}

EngineScore evaluate_position(const FenPosition& fen, const EngineConfig& cfg) {
  UciEngine engine(cfg);
  return engine.evaluate(fen);
}

double cp_to_winprob(const EngineScore& s, double k) {
  if (s.kind == EngineScore::Kind::mate)
    return s.winner == Color::white ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-k * static_cast<double>(s.cp)));
}

ClassLabel winprob_to_label(double p) {
  if (p < 1.0 / 3.0) return ClassLabel::black_adv;
  if (p > 2.0 / 3.0) return ClassLabel::white_adv;
  return ClassLabel::balanced;
}

namespace {

int score_magnitude(const EngineScore& s) {
  return s.kind == EngineScore::Kind::mate ? 10'000 : std::abs(s.cp);
}

}  // namespace

int cp_to_difficulty(const EngineScore& s, const std::vector<EngineScore>& dataset_scores) {
  if (dataset_scores.empty()) throw Error("cp_to_difficulty: dataset_scores empty");
  std::vector<int> magnitudes;
  magnitudes.reserve(dataset_scores.size());
  for (const EngineScore& score : dataset_scores) magnitudes.push_back(score_magnitude(score));
  std::sort(magnitudes.begin(), magnitudes.end(), std::greater<int>());
  std::size_t n = magnitudes.size();
  std::size_t first = (n + 2) / 3;   // ceil(n/3) values in tertile 1
  std::size_t second = (2 * n + 2) / 3;
  int threshold1 = magnitudes[first - 1];
  int threshold2 = magnitudes[second - 1];
  int value = score_magnitude(s);
  if (value >= threshold1) return 1;
  if (value >= threshold2) return 2;
  return 3;
}

ChessAdvBuild build_chessadv(const std::vector<std::string>& fens, const EngineConfig& cfg) {
  ChessAdvBuild build;
  std::vector<EngineScore> scores;
  std::vector<std::pair<std::string, FenPosition>> evaluated;  // (input, position)

  // One engine process across positions; respawned after a failure since
  // its protocol state is then unknown.
  std::unique_ptr<UciEngine> engine;
  for (const std::string& fen : fens) {
    try {
      FenPosition position = parse_fen(fen);
      if (!engine) engine = std::make_unique<UciEngine>(cfg);
      EngineScore score = engine->evaluate(position);
      scores.push_back(score);
      evaluated.push_back({fen, position});
    } catch (const std::exception& ex) {
      build.skipped.push_back({fen, ex.what()});
      engine.reset();
    }
  }
  engine.reset();

  for (std::size_t i = 0; i < evaluated.size(); ++i) {
    const auto& [input, position] = evaluated[i];
    const EngineScore& score = scores[i];
    double p = cp_to_winprob(score);

    Problem problem;
    problem.id = "chessadv-" + std::to_string(i + 1);
    problem.domain = TaskDomain::chess;
    problem.question =
        "Considering the position shown, decide whether it favors White, favors Black, "
        "or is balanced.";
    problem.dsl = write_fen(position);
    std::string svg = render_board_svg(position);
    problem.image = ImageBlob{std::vector<std::uint8_t>(svg.begin(), svg.end()),
                              "image/svg+xml"};
    problem.gold = GoldAnswer::label(winprob_to_label(p));
    problem.difficulty = cp_to_difficulty(score, scores);
    problem.meta["source_fen"] = input;
    problem.meta["engine_depth"] = std::to_string(cfg.depth);
    if (score.kind == EngineScore::Kind::mate) {
      problem.meta["engine_score"] =
          "mate " + std::to_string(score.winner == Color::white ? score.mate_moves
                                                                : -score.mate_moves);
    } else {
      problem.meta["engine_score"] = "cp " + std::to_string(score.cp);
    }
    problem.meta["white_winprob"] = util::format_fixed(p, 6);
    build.problems.push_back(std::move(problem));
  }
  return build;
}

}  // namespace bba
