#include "bba/fen.hpp"

#include <cctype>
#include <sstream>
#include <vector>

#include "bba/errors.hpp"

namespace bba {

namespace {

std::optional<ChessPiece> piece_from_char(char c) {
  Color color = std::isupper(static_cast<unsigned char>(c)) ? Color::white : Color::black;
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'k': return ChessPiece{color, PieceType::king};
    case 'q': return ChessPiece{color, PieceType::queen};
    case 'r': return ChessPiece{color, PieceType::rook};
    case 'b': return ChessPiece{color, PieceType::bishop};
    case 'n': return ChessPiece{color, PieceType::knight};
    case 'p': return ChessPiece{color, PieceType::pawn};
    default: return std::nullopt;
  }
}

char piece_to_char(const ChessPiece& p) {
  char c = 'p';
  switch (p.type) {
    case PieceType::king: c = 'k'; break;
    case PieceType::queen: c = 'q'; break;
    case PieceType::rook: c = 'r'; break;
    case PieceType::bishop: c = 'b'; break;
    case PieceType::knight: c = 'n'; break;
    case PieceType::pawn: c = 'p'; break;
  }
  return p.color == Color::white ? static_cast<char>(std::toupper(c)) : c;
}

// Unicode chess glyphs, white then black, in K Q R B N P order.
const char* glyph_for(const ChessPiece& p) {
  static const char* white[] = {"♔", "♕", "♖", "♗", "♘", "♙"};
  static const char* black[] = {"♚", "♛", "♜", "♝", "♞", "♟"};
  int idx = static_cast<int>(p.type);
  return p.color == Color::white ? white[idx] : black[idx];
}

int parse_counter(const std::string& field, const char* name, int minimum, long offset) {
  if (field.empty()) throw ParseError(std::string(name) + " field empty", offset);
  long value = 0;
  for (char c : field) {
    if (c < '0' || c > '9')
      throw ParseError(std::string(name) + " is not a number: '" + field + "'", offset);
    value = value * 10 + (c - '0');
    if (value > 100000) throw ParseError(std::string(name) + " out of range", offset);
  }
  if (value < minimum)
    throw ParseError(std::string(name) + " below " + std::to_string(minimum), offset);
  return static_cast<int>(value);
}

}  // namespace

std::string Square::name() const {
  std::string s;
  s.push_back(static_cast<char>('a' + file));
  s.push_back(static_cast<char>('1' + rank));
  return s;
}

int FenPosition::piece_count() const {
  int n = 0;
  for (const auto& rank : board)
    for (const auto& sq : rank)
      if (sq.has_value()) ++n;
  return n;
}

FenPosition parse_fen(const std::string& s) {
  std::vector<std::string> fields;
  std::vector<long> offsets;
  {
    long pos = 0;
    std::string current;
    long start = 0;
    for (char c : s) {
      if (c == ' ') {
        if (!current.empty()) {
          fields.push_back(current);
          offsets.push_back(start);
          current.clear();
        }
      } else {
        if (current.empty()) start = pos;
        current.push_back(c);
      }
      ++pos;
    }
    if (!current.empty()) {
      fields.push_back(current);
      offsets.push_back(start);
    }
  }
  if (fields.size() != 6)
    throw ParseError("expected 6 FEN fields, got " + std::to_string(fields.size()), 0);

  FenPosition p;

  // Field 1: piece placement, ranks 8 down to 1.
  {
    const std::string& placement = fields[0];
    long base = offsets[0];
    int rank_index = 0;  // 0 => rank 8
    std::size_t chunk_start = 0;
    for (std::size_t i = 0; i <= placement.size(); ++i) {
      if (i != placement.size() && placement[i] != '/') continue;
      if (rank_index > 7)
        throw ParseError("board has more than 8 ranks", base + static_cast<long>(i));
      std::string chunk = placement.substr(chunk_start, i - chunk_start);
      int chess_rank = 8 - rank_index;  // display number
      int file = 0;
      std::vector<std::pair<int, ChessPiece>> placements;
      for (std::size_t j = 0; j < chunk.size(); ++j) {
        char c = chunk[j];
        long at = base + static_cast<long>(chunk_start + j);
        if (c >= '1' && c <= '8') {
          file += c - '0';
        } else if (auto piece = piece_from_char(c)) {
          placements.emplace_back(file, *piece);
          ++file;
        } else {
          throw ParseError(std::string("invalid piece character '") + c + "'", at);
        }
      }
      if (file != 8)
        throw ParseError("rank " + std::to_string(chess_rank) + " expands to " +
                             std::to_string(file) + " squares",
                         base + static_cast<long>(chunk_start));
      for (const auto& [square_file, piece] : placements)
        p.board[chess_rank - 1][square_file] = piece;
      ++rank_index;
      chunk_start = i + 1;
    }
    if (rank_index != 8)
      throw ParseError("board has " + std::to_string(rank_index) + " ranks, expected 8", base);
  }

  // Field 2: active color.
  if (fields[1] == "w") {
    p.active = Color::white;
  } else if (fields[1] == "b") {
    p.active = Color::black;
  } else {
    throw ParseError("active color must be 'w' or 'b', got '" + fields[1] + "'", offsets[1]);
  }

  // Field 3: castling availability.
  if (fields[2] != "-") {
    for (std::size_t j = 0; j < fields[2].size(); ++j) {
      char c = fields[2][j];
      if (c != 'K' && c != 'Q' && c != 'k' && c != 'q')
        throw ParseError(std::string("invalid castling character '") + c + "'",
                         offsets[2] + static_cast<long>(j));
      if (p.castling.count(c))
        throw ParseError(std::string("duplicate castling character '") + c + "'",
                         offsets[2] + static_cast<long>(j));
      p.castling.insert(c);
    }
  }

  // Field 4: en passant target square.
  if (fields[3] != "-") {
    const std::string& ep = fields[3];
    if (ep.size() != 2 || ep[0] < 'a' || ep[0] > 'h' || ep[1] < '1' || ep[1] > '8')
      throw ParseError("malformed en-passant square '" + ep + "'", offsets[3]);
    Square sq{ep[0] - 'a', ep[1] - '1'};
    if (sq.rank != 2 && sq.rank != 5)
      throw ParseError("en-passant square must be on rank 3 or 6, got '" + ep + "'",
                       offsets[3]);
    p.en_passant = sq;
  }

  p.halfmove = parse_counter(fields[4], "halfmove clock", 0, offsets[4]);
  p.fullmove = parse_counter(fields[5], "fullmove number", 1, offsets[5]);
  return p;
}

std::string write_fen(const FenPosition& p) {
  std::string out;
  for (int rank = 7; rank >= 0; --rank) {
    int empty = 0;
    for (int file = 0; file < 8; ++file) {
      const auto& sq = p.board[rank][file];
      if (!sq.has_value()) {
        ++empty;
        continue;
      }
      if (empty > 0) {
        out.push_back(static_cast<char>('0' + empty));
        empty = 0;
      }
      out.push_back(piece_to_char(*sq));
    }
    if (empty > 0) out.push_back(static_cast<char>('0' + empty));
    if (rank > 0) out.push_back('/');
  }
  out.push_back(' ');
  out.push_back(p.active == Color::white ? 'w' : 'b');
  out.push_back(' ');
  if (p.castling.empty()) {
    out.push_back('-');
  } else {
    for (char c : {'K', 'Q', 'k', 'q'})
      if (p.castling.count(c)) out.push_back(c);
  }
  out.push_back(' ');
  out += p.en_passant.has_value() ? p.en_passant->name() : "-";
  out += " " + std::to_string(p.halfmove) + " " + std::to_string(p.fullmove);
  return out;
}

std::string render_board_svg(const FenPosition& p) {
  constexpr int cell = 45;
  constexpr int size = cell * 8;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  for (int row = 0; row < 8; ++row) {      // row 0 is rank 8 (top)
    for (int col = 0; col < 8; ++col) {    // col 0 is file a
      bool light = (row + col) % 2 == 0;
      svg << "<rect x=\"" << col * cell << "\" y=\"" << row * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << (light ? "#f0d9b5" : "#b58863")
          << "\"/>\n";
    }
  }
  for (int row = 0; row < 8; ++row) {
    int rank = 7 - row;
    for (int col = 0; col < 8; ++col) {
      const auto& sq = p.board[rank][col];
      if (!sq.has_value()) continue;
      int cx = col * cell + cell / 2;
      int cy = row * cell + cell / 2 + cell / 3;
      svg << "<text x=\"" << cx << "\" y=\"" << cy << "\" font-size=\"" << cell - 5
          << "\" text-anchor=\"middle\">" << glyph_for(*sq) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bba
