#pragma once

#include <string>
#include <vector>

#include "bba/model.hpp"

namespace bba {

enum class BondOrder { single, double_bond, triple, aromatic };

std::string bond_order_name(BondOrder o);

struct SmilesAtom {
  std::string element;   // "C", "Cl", "N", ...
  bool aromatic = false; // written lowercase
  int charge = 0;
  bool in_bracket = false;
  int explicit_h = -1;   // bracket H count; -1 when unspecified
  int isotope = 0;       // 0 when unspecified

  bool operator==(const SmilesAtom&) const = default;
};

struct SmilesBond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::single;

  bool operator==(const SmilesBond&) const = default;
};

struct RingClosure {
  int label = 0;  // the digit used in the string
  int a = 0;
  int b = 0;

  bool operator==(const RingClosure&) const = default;
};

struct SmilesMolecule {
  std::vector<SmilesAtom> atoms;
  std::vector<SmilesBond> bonds;
  std::vector<RingClosure> ring_closures;  // every resolved pair
};

// Parses the organic-subset SMILES grammar: bare atoms B C N O P S F Cl
// Br I, aromatic b c n o p s, bracket atoms with isotope/chirality/
// hydrogen-count/charge, bonds - = # : (/ and \ tokenize as single),
// branches, ring closures 1-9 and %nn. Throws ParseError with a character
// offset on unmatched brackets or parens, unresolved ring closures, and
// unknown symbols.
SmilesMolecule parse_smiles(const std::string& s);

// A molecule graph in the TU-dataset encoding.
struct MutagGraph {
  struct Edge {
    int u = 0;
    int v = 0;
    int code = 1;  // 0 aromatic, 1 single, 2 double, 3 triple

    bool operator==(const Edge&) const = default;
  };
  std::vector<int> nodes;  // atom-type codes 0..6 -> C N O F I Cl Br
  std::vector<Edge> edges; // undirected, stored once
  ClassLabel label = ClassLabel::non_mutagenic;
};

// Element symbol for a node code; throws on codes outside 0..6.
std::string mutag_element(int code);
// Bond order for an edge code; throws on codes outside 0..3.
BondOrder mutag_bond_order(int code);

// DFS serialization with ring-closure digits. Aromatic edges are emitted
// via lowercase atoms; single bonds between two aromatic atoms get an
// explicit '-'. parse_smiles(write_smiles(g)) is graph-isomorphic to g
// (element and bond type preserving). Disconnected graphs are an error
// listing the component sizes.
std::string write_smiles(const MutagGraph& g);

}  // namespace bba
