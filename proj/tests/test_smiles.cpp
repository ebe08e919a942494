#include <doctest.h>

#include "bba/errors.hpp"
#include "bba/smiles.hpp"
#include "support/corpus.hpp"
#include "support/graph_iso.hpp"

using namespace bba;

TEST_CASE("benzene parses to six aromatic carbons in one ring") {
  SmilesMolecule m = parse_smiles("c1ccccc1");
  REQUIRE(m.atoms.size() == 6);
  for (const auto& atom : m.atoms) {
    CHECK(atom.element == "C");
    CHECK(atom.aromatic);
  }
  REQUIRE(m.bonds.size() == 6);
  for (const auto& bond : m.bonds) CHECK(bond.order == BondOrder::aromatic);
  REQUIRE(m.ring_closures.size() == 1);
  CHECK(m.ring_closures[0].label == 1);
}

TEST_CASE("unclosed branch reports its offset") {
  try {
    parse_smiles("C(");
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(std::string(ex.what()).find("unclosed branch at offset 1") != std::string::npos);
    CHECK(ex.offset() == 1);
  }
}

TEST_CASE("nitro group carries +1/-1 charges") {
  SmilesMolecule m = parse_smiles("C[N+](=O)[O-]");
  REQUIRE(m.atoms.size() == 4);
  CHECK(m.atoms[1].element == "N");
  CHECK(m.atoms[1].charge == 1);
  CHECK(m.atoms[1].in_bracket);
  CHECK(m.atoms[3].element == "O");
  CHECK(m.atoms[3].charge == -1);
  REQUIRE(m.bonds.size() == 3);
  CHECK(m.bonds[0].order == BondOrder::single);
  CHECK(m.bonds[1].order == BondOrder::double_bond);
  CHECK(m.bonds[2].order == BondOrder::single);
}

TEST_CASE("bracket atom details") {
  SmilesMolecule ammonium = parse_smiles("[NH4+]");
  CHECK(ammonium.atoms[0].explicit_h == 4);
  CHECK(ammonium.atoms[0].charge == 1);

  CHECK(parse_smiles("[Cu+2]").atoms[0].charge == 2);
  CHECK(parse_smiles("[Cu++]").atoms[0].charge == 2);
  CHECK(parse_smiles("[O-]").atoms[0].charge == -1);
  CHECK(parse_smiles("[13C]").atoms[0].isotope == 13);
  CHECK(parse_smiles("[C@@H]").atoms[0].explicit_h == 1);  // chirality tokenized
}

TEST_CASE("two-letter organic-subset atoms") {
  SmilesMolecule m = parse_smiles("ClCBr");
  REQUIRE(m.atoms.size() == 3);
  CHECK(m.atoms[0].element == "Cl");
  CHECK(m.atoms[1].element == "C");
  CHECK(m.atoms[2].element == "Br");
}

TEST_CASE("stereo bond characters tokenize as single bonds") {
  SmilesMolecule m = parse_smiles("F/C=C\\F");
  REQUIRE(m.bonds.size() == 3);
  CHECK(m.bonds[0].order == BondOrder::single);
  CHECK(m.bonds[1].order == BondOrder::double_bond);
  CHECK(m.bonds[2].order == BondOrder::single);
}

TEST_CASE("percent ring closures") {
  SmilesMolecule m = parse_smiles("C%12CCC%12");
  REQUIRE(m.ring_closures.size() == 1);
  CHECK(m.ring_closures[0].label == 12);
  CHECK(m.bonds.size() == 4);
}

TEST_CASE("default bond between aromatic atoms is aromatic, otherwise single") {
  CHECK(parse_smiles("cc").bonds[0].order == BondOrder::aromatic);
  CHECK(parse_smiles("Cc").bonds[0].order == BondOrder::single);
  CHECK(parse_smiles("c-c").bonds[0].order == BondOrder::single);
  CHECK(parse_smiles("C:C").bonds[0].order == BondOrder::aromatic);
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_WITH_AS(parse_smiles("C1CC"), doctest::Contains("unresolved ring closure 1"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_smiles("CC)"), doctest::Contains("unmatched ')'"), ParseError);
  CHECK_THROWS_WITH_AS(parse_smiles("CX"), doctest::Contains("unknown symbol 'X'"), ParseError);
  CHECK_THROWS_WITH_AS(parse_smiles("C[N"), doctest::Contains("unclosed bracket"), ParseError);
  CHECK_THROWS_AS(parse_smiles("1CC"), ParseError);   // ring digit with no atom
  CHECK_THROWS_AS(parse_smiles("(CC)"), ParseError);  // branch with no atom
  CHECK_THROWS_AS(parse_smiles("C%1A"), ParseError);  // short %nn
}

TEST_CASE("writer emits canonical benzene") {
  MutagGraph g;
  g.nodes = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 6; ++i) g.edges.push_back({i, (i + 1) % 6, 0});
  CHECK(write_smiles(g) == "c1ccccc1");
}

TEST_CASE("writer handles the single-atom graph") {
  MutagGraph g;
  g.nodes = {0};
  CHECK(write_smiles(g) == "C");
}

TEST_CASE("writer spells out single bonds between aromatic atoms") {
  // biphenyl: two aromatic rings joined by a single bond
  MutagGraph g;
  for (int i = 0; i < 12; ++i) g.nodes.push_back(0);
  for (int i = 0; i < 6; ++i) g.edges.push_back({i, (i + 1) % 6, 0});
  for (int i = 0; i < 6; ++i) g.edges.push_back({6 + i, 6 + (i + 1) % 6, 0});
  g.edges.push_back({0, 6, 1});
  std::string smiles = write_smiles(g);
  CHECK(smiles.find('-') != std::string::npos);
  SmilesMolecule parsed = parse_smiles(smiles);
  int singles = 0;
  for (const auto& bond : parsed.bonds)
    if (bond.order == BondOrder::single) ++singles;
  CHECK(singles == 1);
  CHECK(test_support::isomorphic(test_support::from_mutag(g),
                                 test_support::from_smiles(parsed)));
}

TEST_CASE("writer rejects disconnected graphs with component sizes") {
  MutagGraph g;
  g.nodes = {0, 0, 0};
  g.edges.push_back({0, 1, 1});
  CHECK_THROWS_WITH_AS(write_smiles(g), doctest::Contains("component sizes: 2 1"), Error);
}

TEST_CASE("node and edge code ranges are enforced") {
  MutagGraph g;
  g.nodes = {7};
  CHECK_THROWS_WITH_AS(write_smiles(g), doctest::Contains("node code 7"), Error);
  CHECK_THROWS_AS(mutag_bond_order(4), Error);
  CHECK(mutag_element(5) == "Cl");
}

TEST_CASE("isomorphism oracle sanity: detects both matches and mismatches") {
  auto corpus = test_support::synthetic_mutag_corpus(4);
  const MutagGraph& g = corpus[0];
  auto a = test_support::from_mutag(g);
  CHECK(test_support::isomorphic(a, a));

  auto relabeled = a;
  relabeled.labels[0] = relabeled.labels[0] == "C" ? "N" : "C";
  CHECK_FALSE(test_support::isomorphic(a, relabeled));

  auto rebonded = a;
  auto it = rebonded.edges.begin();
  it->second = it->second == 0 ? 1 : 0;
  CHECK_FALSE(test_support::isomorphic(a, rebonded));
}

TEST_CASE("parse(write(g)) is graph-isomorphic across the synthetic corpus") {
  auto corpus = test_support::synthetic_mutag_corpus(188);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CAPTURE(i);
    std::string smiles = write_smiles(corpus[i]);
    CAPTURE(smiles);
    SmilesMolecule parsed = parse_smiles(smiles);
    CHECK(parsed.atoms.size() == corpus[i].nodes.size());
    CHECK(parsed.bonds.size() == corpus[i].edges.size());
    CHECK(test_support::isomorphic(test_support::from_mutag(corpus[i]),
                                   test_support::from_smiles(parsed)));
  }
}
