#include "bba/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "bba/errors.hpp"

namespace bba {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct PendingRing {
  int atom = -1;
  char bond = 0;  // 0 = unspecified
  long offset = 0;
};

BondOrder order_from_symbol(char symbol, bool both_aromatic) {
  switch (symbol) {
    case '-': return BondOrder::single;
    case '=': return BondOrder::double_bond;
    case '#': return BondOrder::triple;
    case ':': return BondOrder::aromatic;
    case '/': return BondOrder::single;
    case '\\': return BondOrder::single;
    default: return both_aromatic ? BondOrder::aromatic : BondOrder::single;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  SmilesMolecule run() {
    while (pos_ < text_.size()) step();
    if (!branch_stack_.empty())
      throw ParseError("unclosed branch at offset " + std::to_string(branch_stack_.back().offset),
                       branch_stack_.back().offset);
    if (!pending_rings_.empty()) {
      const auto& [label, ring] = *pending_rings_.begin();
      throw ParseError("unresolved ring closure " + std::to_string(label) + " at offset " +
                           std::to_string(ring.offset),
                       ring.offset);
    }
    return std::move(mol_);
  }

 private:
  void step() {
    char c = text_[pos_];
    long at = static_cast<long>(pos_);
    if (c == '(') {
      if (prev_ < 0) throw ParseError("branch with no preceding atom", at);
      branch_stack_.push_back({prev_, at});
      ++pos_;
    } else if (c == ')') {
      if (branch_stack_.empty()) throw ParseError("unmatched ')'", at);
      prev_ = branch_stack_.back().atom;
      branch_stack_.pop_back();
      pending_bond_ = 0;
      ++pos_;
    } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
      pending_bond_ = c;
      ++pos_;
    } else if (c == '.') {
      prev_ = -1;
      pending_bond_ = 0;
      ++pos_;
    } else if (is_digit(c)) {
      ring_closure(c - '0', at);
      ++pos_;
    } else if (c == '%') {
      if (pos_ + 2 >= text_.size() || !is_digit(text_[pos_ + 1]) || !is_digit(text_[pos_ + 2]))
        throw ParseError("'%' ring closure needs two digits", at);
      ring_closure((text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0'), at);
      pos_ += 3;
    } else if (c == '[') {
      bracket_atom(at);
    } else {
      bare_atom(at);
    }
  }

  void ring_closure(int label, long at) {
    if (prev_ < 0) throw ParseError("ring closure with no preceding atom", at);
    auto it = pending_rings_.find(label);
    if (it == pending_rings_.end()) {
      pending_rings_[label] = PendingRing{prev_, pending_bond_, at};
      pending_bond_ = 0;
      return;
    }
    PendingRing open = it->second;
    pending_rings_.erase(it);
    if (open.atom == prev_) throw ParseError("ring closure bonds atom to itself", at);
    char symbol = pending_bond_ != 0 ? pending_bond_ : open.bond;
    if (pending_bond_ != 0 && open.bond != 0 && pending_bond_ != open.bond)
      throw ParseError("ring closure bond symbols disagree", at);
    bool both_aromatic = mol_.atoms[open.atom].aromatic && mol_.atoms[prev_].aromatic;
    mol_.bonds.push_back({open.atom, prev_, order_from_symbol(symbol, both_aromatic)});
    mol_.ring_closures.push_back({label, open.atom, prev_});
    pending_bond_ = 0;
  }

  void add_atom(SmilesAtom atom) {
    int index = static_cast<int>(mol_.atoms.size());
    mol_.atoms.push_back(std::move(atom));
    if (prev_ >= 0) {
      bool both_aromatic = mol_.atoms[prev_].aromatic && mol_.atoms[index].aromatic;
      mol_.bonds.push_back({prev_, index, order_from_symbol(pending_bond_, both_aromatic)});
    }
    pending_bond_ = 0;
    prev_ = index;
  }

  void bare_atom(long at) {
    static const std::set<std::string> organic_two = {"Cl", "Br"};
    static const std::set<char> organic_one = {'B', 'C', 'N', 'O', 'P', 'S', 'F', 'I'};
    static const std::set<char> aromatic_one = {'b', 'c', 'n', 'o', 'p', 's'};
    char c = text_[pos_];
    if (pos_ + 1 < text_.size()) {
      std::string two = text_.substr(pos_, 2);
      if (organic_two.count(two)) {
        add_atom({two, false, 0, false, -1, 0});
        pos_ += 2;
        return;
      }
    }
    if (organic_one.count(c)) {
      add_atom({std::string(1, c), false, 0, false, -1, 0});
      ++pos_;
      return;
    }
    if (aromatic_one.count(c)) {
      add_atom({std::string(1, static_cast<char>(std::toupper(c))), true, 0, false, -1, 0});
      ++pos_;
      return;
    }
    throw ParseError(std::string("unknown symbol '") + c + "' at offset " + std::to_string(at),
                     at);
  }

  void bracket_atom(long at) {
    std::size_t i = pos_ + 1;
    SmilesAtom atom;
    atom.in_bracket = true;

    auto need = [&](const char* what) -> char {
      if (i >= text_.size())
        throw ParseError(std::string("unclosed bracket at offset ") + std::to_string(at) +
                             " (expected " + what + ")",
                         at);
      return text_[i];
    };

    while (i < text_.size() && is_digit(text_[i])) {
      atom.isotope = atom.isotope * 10 + (text_[i] - '0');
      ++i;
    }

    char c = need("element symbol");
    if (std::isupper(static_cast<unsigned char>(c))) {
      atom.element = std::string(1, c);
      ++i;
      // Two-letter element symbols: the hydrogen count is uppercase 'H',
      // so any lowercase letter here belongs to the element.
      if (i < text_.size() && std::islower(static_cast<unsigned char>(text_[i]))) {
        atom.element.push_back(text_[i]);
        ++i;
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      atom.element = std::string(1, static_cast<char>(std::toupper(c)));
      atom.aromatic = true;
      ++i;
      if (i < text_.size() && std::islower(static_cast<unsigned char>(text_[i])) &&
          (atom.element == "S" || atom.element == "A")) {  // se, as
        atom.element.push_back(text_[i]);
        ++i;
      }
    } else if (c == '*') {
      atom.element = "*";
      ++i;
    } else {
      throw ParseError(std::string("invalid element in bracket at offset ") + std::to_string(at),
                       at);
    }

    // chirality: tokenized, not semantically validated
    while (i < text_.size() && text_[i] == '@') ++i;

    if (i < text_.size() && text_[i] == 'H') {
      ++i;
      atom.explicit_h = 1;
      if (i < text_.size() && is_digit(text_[i])) {
        atom.explicit_h = 0;
        while (i < text_.size() && is_digit(text_[i])) {
          atom.explicit_h = atom.explicit_h * 10 + (text_[i] - '0');
          ++i;
        }
      }
    }

    if (i < text_.size() && (text_[i] == '+' || text_[i] == '-')) {
      char sign = text_[i];
      int magnitude = 0;
      while (i < text_.size() && text_[i] == sign) {
        ++magnitude;
        ++i;
      }
      if (magnitude == 1 && i < text_.size() && is_digit(text_[i])) {
        magnitude = 0;
        while (i < text_.size() && is_digit(text_[i])) {
          magnitude = magnitude * 10 + (text_[i] - '0');
          ++i;
        }
      }
      atom.charge = sign == '+' ? magnitude : -magnitude;
    }

    if (i < text_.size() && text_[i] == ':') {
      ++i;  // atom class: tokenized and discarded
      while (i < text_.size() && is_digit(text_[i])) ++i;
    }

    if (i >= text_.size() || text_[i] != ']')
      throw ParseError("unclosed bracket at offset " + std::to_string(at), at);
    add_atom(std::move(atom));
    pos_ = i + 1;
  }

  struct Branch {
    int atom;
    long offset;
  };

  const std::string& text_;
  std::size_t pos_ = 0;
  SmilesMolecule mol_;
  int prev_ = -1;
  char pending_bond_ = 0;
  std::vector<Branch> branch_stack_;
  std::map<int, PendingRing> pending_rings_;
};

}  // namespace

std::string bond_order_name(BondOrder o) {
  switch (o) {
    case BondOrder::single: return "single";
    case BondOrder::double_bond: return "double";
    case BondOrder::triple: return "triple";
    case BondOrder::aromatic: return "aromatic";
  }
  return "single";
}

SmilesMolecule parse_smiles(const std::string& s) {
  return Parser(s).run();
}

std::string mutag_element(int code) {
  static const char* elements[] = {"C", "N", "O", "F", "I", "Cl", "Br"};
  if (code < 0 || code > 6)
    throw Error("node code " + std::to_string(code) + " outside 0..6");
  return elements[code];
}

BondOrder mutag_bond_order(int code) {
  switch (code) {
    case 0: return BondOrder::aromatic;
    case 1: return BondOrder::single;
    case 2: return BondOrder::double_bond;
    case 3: return BondOrder::triple;
  }
  throw Error("edge code " + std::to_string(code) + " outside 0..3");
}

namespace {

struct Writer {
  const MutagGraph& g;
  std::vector<std::vector<std::pair<int, int>>> adjacency;  // (neighbor, edge index)
  std::vector<bool> atom_aromatic;
  std::vector<bool> tree_edge;
  std::vector<bool> ring_edge;
  // Ring digits to emit at each atom, in assignment order: (label, bond symbol).
  std::vector<std::vector<std::pair<int, std::string>>> ring_digits;
  int next_label = 1;
  std::string out;

  explicit Writer(const MutagGraph& graph) : g(graph) {
    int n = static_cast<int>(g.nodes.size());
    adjacency.resize(n);
    atom_aromatic.assign(n, false);
    tree_edge.assign(g.edges.size(), false);
    ring_edge.assign(g.edges.size(), false);
    ring_digits.resize(n);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const auto& edge = g.edges[e];
      if (edge.u < 0 || edge.u >= n || edge.v < 0 || edge.v >= n)
        throw Error("edge endpoint out of range: (" + std::to_string(edge.u) + ", " +
                    std::to_string(edge.v) + ")");
      adjacency[edge.u].push_back({edge.v, static_cast<int>(e)});
      adjacency[edge.v].push_back({edge.u, static_cast<int>(e)});
      if (mutag_bond_order(edge.code) == BondOrder::aromatic) {
        atom_aromatic[edge.u] = true;
        atom_aromatic[edge.v] = true;
      }
    }
    for (auto& neighbors : adjacency) std::sort(neighbors.begin(), neighbors.end());
  }

  std::string bond_symbol(int edge_index) const {
    const auto& edge = g.edges[edge_index];
    bool both_aromatic = atom_aromatic[edge.u] && atom_aromatic[edge.v];
    switch (mutag_bond_order(edge.code)) {
      case BondOrder::aromatic:
        return both_aromatic ? "" : ":";
      case BondOrder::single:
        // A bare bond between two lowercase atoms would re-parse as
        // aromatic, so spell it out.
        return both_aromatic ? "-" : "";
      case BondOrder::double_bond:
        return "=";
      case BondOrder::triple:
        return "#";
    }
    return "";
  }

  std::string atom_symbol(int node) const {
    std::string element = mutag_element(g.nodes[node]);
    if (atom_aromatic[node] && element.size() == 1)
      element[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(element[0])));
    return element;
  }

  // Pass 1: classify edges as tree or ring and hand out closure digits in
  // the same order pass 2 will emit atoms. Labels are never reused; the
  // molecules here are small and unique labels keep the output unambiguous.
  void classify(int node, std::vector<bool>& seen) {
    for (const auto& [next, edge_index] : adjacency[node]) {
      if (tree_edge[edge_index] || ring_edge[edge_index]) continue;
      if (seen[next]) {
        ring_edge[edge_index] = true;
        int label = next_label++;
        std::string symbol = bond_symbol(edge_index);
        ring_digits[next].push_back({label, symbol});
        ring_digits[node].push_back({label, symbol});
      } else {
        tree_edge[edge_index] = true;
        seen[next] = true;
        classify(next, seen);
      }
    }
  }

  void emit_atom(int node) {
    out += atom_symbol(node);
    for (const auto& [label, symbol] : ring_digits[node]) {
      out += symbol;
      if (label > 9) {
        out += '%';
        out += static_cast<char>('0' + label / 10);
        out += static_cast<char>('0' + label % 10);
      } else {
        out += static_cast<char>('0' + label);
      }
    }
  }

  // Pass 2: emit the spanning tree with branches.
  void emit_tree(int node, int parent_edge) {
    emit_atom(node);
    std::vector<std::pair<int, int>> children;
    for (const auto& [next, edge_index] : adjacency[node]) {
      if (edge_index != parent_edge && tree_edge[edge_index])
        children.push_back({next, edge_index});
    }
    for (std::size_t k = 0; k < children.size(); ++k) {
      bool last = k + 1 == children.size();
      if (!last) out += '(';
      out += bond_symbol(children[k].second);
      emit_tree(children[k].first, children[k].second);
      if (!last) out += ')';
    }
  }

  std::string run() {
    int n = static_cast<int>(g.nodes.size());
    if (n == 0) throw Error("empty graph");
    for (int code : g.nodes) mutag_element(code);  // validate codes

    // Connectivity check with component sizes.
    std::vector<int> component(n, -1);
    std::vector<int> sizes;
    for (int s = 0; s < n; ++s) {
      if (component[s] != -1) continue;
      int id = static_cast<int>(sizes.size());
      int size = 0;
      std::vector<int> queue{s};
      component[s] = id;
      while (!queue.empty()) {
        int u = queue.back();
        queue.pop_back();
        ++size;
        for (const auto& [v, e] : adjacency[u]) {
          if (component[v] == -1) {
            component[v] = id;
            queue.push_back(v);
          }
        }
      }
      sizes.push_back(size);
    }
    if (sizes.size() > 1) {
      std::string msg = "disconnected graph; component sizes:";
      for (int size : sizes) msg += " " + std::to_string(size);
      throw Error(msg);
    }

    std::vector<bool> seen(n, false);
    seen[0] = true;
    classify(0, seen);
    emit_tree(0, -1);
    return out;
  }
};

}  // namespace

std::string write_smiles(const MutagGraph& g) {
  return Writer(g).run();
}

}  // namespace bba
