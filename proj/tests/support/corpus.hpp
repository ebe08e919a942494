#pragma once

// Deterministic synthetic molecule corpus shaped like the TU MUTAG data:
// small nitroaromatic-style graphs over the C N O F I Cl Br alphabet with
// aromatic/single/double/triple edge codes. Used by the round-trip suites
// when the real TU files are not supplied.

#include <random>
#include <vector>

#include "bba/smiles.hpp"

namespace test_support {

// One connected molecule graph: one or two (fused) aromatic rings plus
// tree substituents, occasionally a nitro-style group.
inline bba::MutagGraph random_molecule(std::mt19937& rng) {
  using bba::MutagGraph;
  MutagGraph g;
  std::uniform_int_distribution<int> ring_size_dist(5, 6);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> percent(0, 99);

  auto add_node = [&](int code) {
    g.nodes.push_back(code);
    return static_cast<int>(g.nodes.size() - 1);
  };

  // First aromatic ring: carbons with an occasional ring nitrogen.
  int ring_size = ring_size_dist(rng);
  std::vector<int> ring;
  for (int i = 0; i < ring_size; ++i) ring.push_back(add_node(percent(rng) < 15 ? 1 : 0));
  for (int i = 0; i < ring_size; ++i)
    g.edges.push_back({ring[i], ring[(i + 1) % ring_size], 0});

  // Optionally fuse a second aromatic ring on the first edge.
  if (coin(rng)) {
    int shared_a = ring[0];
    int shared_b = ring[1];
    int extra = ring_size_dist(rng) - 2;
    int prev = shared_b;
    for (int i = 0; i < extra; ++i) {
      int node = add_node(0);
      g.edges.push_back({prev, node, 0});
      prev = node;
    }
    g.edges.push_back({prev, shared_a, 0});
  }

  // Substituents until the target size.
  std::uniform_int_distribution<int> size_dist(static_cast<int>(g.nodes.size()) + 2, 26);
  int target = std::min(28, size_dist(rng));
  std::vector<int> degree(g.nodes.size(), 0);
  auto recount = [&] {
    degree.assign(g.nodes.size(), 0);
    for (const auto& e : g.edges) {
      ++degree[e.u];
      ++degree[e.v];
    }
  };
  recount();
  while (static_cast<int>(g.nodes.size()) < target) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(g.nodes.size()) - 1);
    int host = pick(rng);
    if (degree[host] >= 3) continue;
    int roll = percent(rng);
    if (roll < 20) {
      // nitro-style group: N with =O and -O
      int n = add_node(1);
      int o1 = add_node(2);
      int o2 = add_node(2);
      g.edges.push_back({host, n, 1});
      g.edges.push_back({n, o1, 2});
      g.edges.push_back({n, o2, 1});
    } else if (roll < 35) {
      int halogen = 3 + percent(rng) % 4;  // F, I, Cl, Br
      g.edges.push_back({host, add_node(halogen), 1});
    } else if (roll < 45) {
      int c = add_node(0);
      int n = add_node(1);
      g.edges.push_back({host, c, 1});
      g.edges.push_back({c, n, 3});  // nitrile
    } else if (roll < 60) {
      int o = add_node(2);
      g.edges.push_back({host, o, percent(rng) < 50 ? 1 : 2});
    } else {
      int c = add_node(0);
      g.edges.push_back({host, c, 1});
    }
    recount();
  }
  g.label = percent(rng) < 66 ? bba::ClassLabel::mutagenic : bba::ClassLabel::non_mutagenic;
  return g;
}

inline std::vector<bba::MutagGraph> synthetic_mutag_corpus(int count = 188,
                                                           unsigned seed = 20240188u) {
  std::mt19937 rng(seed);
  std::vector<bba::MutagGraph> corpus;
  corpus.reserve(count);
  for (int i = 0; i < count; ++i) corpus.push_back(random_molecule(rng));
  return corpus;
}

}  // namespace test_support
