#include <doctest.h>

#include <random>

#include "bba/errors.hpp"
#include "bba/fen.hpp"

using namespace bba;

namespace {

constexpr const char* kInitial = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

int count_substring(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++n;
  return n;
}

FenPosition random_position(std::mt19937& rng) {
  FenPosition p;
  std::uniform_int_distribution<int> percent(0, 99);
  std::uniform_int_distribution<int> piece_dist(0, 5);
  std::uniform_int_distribution<int> file_dist(0, 7);
  for (int rank = 0; rank < 8; ++rank) {
    for (int file = 0; file < 8; ++file) {
      if (percent(rng) < 70) continue;
      ChessPiece piece;
      piece.color = percent(rng) < 50 ? Color::white : Color::black;
      piece.type = static_cast<PieceType>(piece_dist(rng));
      p.board[rank][file] = piece;
    }
  }
  p.active = percent(rng) < 50 ? Color::white : Color::black;
  for (char c : {'K', 'Q', 'k', 'q'})
    if (percent(rng) < 40) p.castling.insert(c);
  if (percent(rng) < 20)
    p.en_passant = Square{file_dist(rng), percent(rng) < 50 ? 2 : 5};
  p.halfmove = percent(rng);
  p.fullmove = 1 + percent(rng);
  return p;
}

}  // namespace

TEST_CASE("canonical initial position parses") {
  FenPosition p = parse_fen(kInitial);
  CHECK(p.active == Color::white);
  CHECK(p.piece_count() == 32);
  CHECK(p.castling.size() == 4);
  CHECK_FALSE(p.en_passant.has_value());
  CHECK(p.halfmove == 0);
  CHECK(p.fullmove == 1);
  CHECK(p.at(Square{4, 0}) == ChessPiece{Color::white, PieceType::king});
  CHECK(write_fen(p) == kInitial);
}

TEST_CASE("empty board parses in syntactic mode") {
  FenPosition p = parse_fen("8/8/8/8/8/8/8/8 w - - 0 1");
  CHECK(p.piece_count() == 0);
  CHECK(write_fen(p) == "8/8/8/8/8/8/8/8 w - - 0 1");
}

TEST_CASE("rank arithmetic errors carry the chess rank number") {
  try {
    parse_fen("rnbqkbnr/ppppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(std::string(ex.what()).find("rank 7 expands to 9 squares") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_fen("rnbqkbnr/ppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"),
                  ParseError);  // 7 squares
}

TEST_CASE("malformed inputs produce distinct errors") {
  CHECK_THROWS_WITH_AS(parse_fen("8/8/8/8 w - - 0 1"),
                       doctest::Contains("ranks"), ParseError);
  CHECK_THROWS_WITH_AS(parse_fen("8/8/8/8/8/8/8/8 w - -"),
                       doctest::Contains("expected 6 FEN fields"), ParseError);
  CHECK_THROWS_WITH_AS(parse_fen("8/8/8/8/8/8/8/x7 w - - 0 1"),
                       doctest::Contains("invalid piece character"), ParseError);
  CHECK_THROWS_WITH_AS(parse_fen("8/8/8/8/8/8/8/8 z - - 0 1"),
                       doctest::Contains("active color"), ParseError);
  CHECK_THROWS_WITH_AS(parse_fen("8/8/8/8/8/8/8/8 w KX - 0 1"),
                       doctest::Contains("castling"), ParseError);
  CHECK_THROWS_WITH_AS(parse_fen("8/8/8/8/8/8/8/8 w - e4 0 1"),
                       doctest::Contains("en-passant"), ParseError);
  CHECK_THROWS_WITH_AS(parse_fen("8/8/8/8/8/8/8/8 w - j3 0 1"),
                       doctest::Contains("en-passant"), ParseError);
  CHECK_THROWS_WITH_AS(parse_fen("8/8/8/8/8/8/8/8 w - - x 1"),
                       doctest::Contains("halfmove"), ParseError);
  CHECK_THROWS_WITH_AS(parse_fen("8/8/8/8/8/8/8/8 w - - 0 0"),
                       doctest::Contains("fullmove"), ParseError);
}

TEST_CASE("en-passant position round-trips") {
  // After 1. e4: the target square e3 is set.
  const std::string fen = "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1";
  FenPosition p = parse_fen(fen);
  REQUIRE(p.en_passant.has_value());
  CHECK(p.en_passant->name() == "e3");
  CHECK(write_fen(p) == fen);
  CHECK(parse_fen(write_fen(p)) == p);
}

TEST_CASE("castling set is canonicalized on write") {
  FenPosition p = parse_fen("8/8/8/8/8/8/8/8 w qK - 3 7");
  CHECK(write_fen(p) == "8/8/8/8/8/8/8/8 w Kq - 3 7");
  CHECK(parse_fen(write_fen(p)) == p);
}

TEST_CASE("round-trip identity on 1000 random syntactic boards") {
  std::mt19937 rng(20240517u);
  for (int i = 0; i < 1000; ++i) {
    FenPosition p = random_position(rng);
    std::string fen = write_fen(p);
    CAPTURE(fen);
    FenPosition reparsed = parse_fen(fen);
    CHECK(reparsed == p);
    CHECK(write_fen(reparsed) == fen);
  }
}

TEST_CASE("board SVG renders one glyph per occupied square, deterministically") {
  FenPosition initial = parse_fen(kInitial);
  std::string svg = render_board_svg(initial);
  CHECK(count_substring(svg, "<text") == 32);
  CHECK(count_substring(svg, "<rect") == 64);
  CHECK(svg == render_board_svg(initial));
  CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") == 0);

  FenPosition empty = parse_fen("8/8/8/8/8/8/8/8 w - - 0 1");
  CHECK(count_substring(render_board_svg(empty), "<text") == 0);
}
