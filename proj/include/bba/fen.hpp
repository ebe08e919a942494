#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>

namespace bba {

enum class Color { white, black };

enum class PieceType { king, queen, rook, bishop, knight, pawn };

struct ChessPiece {
  Color color = Color::white;
  PieceType type = PieceType::pawn;
  bool operator==(const ChessPiece&) const = default;
};

struct Square {
  int file = 0;  // 0 = a .. 7 = h
  int rank = 0;  // 0 = rank 1 .. 7 = rank 8
  bool operator==(const Square&) const = default;
  std::string name() const;  // "e3"
};

// A parsed six-field FEN record. Syntactic only: no legality checking.
struct FenPosition {
  // board[rank][file]; rank 0 is rank 1 (white's back rank).
  std::array<std::array<std::optional<ChessPiece>, 8>, 8> board{};
  Color active = Color::white;
  std::set<char> castling;  // subset of {'K','Q','k','q'}
  std::optional<Square> en_passant;
  int halfmove = 0;
  int fullmove = 1;

  bool operator==(const FenPosition&) const = default;

  const std::optional<ChessPiece>& at(Square sq) const {
    return board[sq.rank][sq.file];
  }
  int piece_count() const;
};

// Throws ParseError with a field-specific message and character offset on
// malformed input (wrong field count, rank not expanding to 8 squares,
// invalid piece char, malformed en-passant square, bad counters).
FenPosition parse_fen(const std::string& s);

// Canonical serialization; parse_fen(write_fen(p)) == p.
std::string write_fen(const FenPosition& p);

// Deterministic SVG 1.1 board rendering: an 8x8 grid with one Unicode
// glyph <text> element per occupied square.
std::string render_board_svg(const FenPosition& p);

}  // namespace bba
