#pragma once

// Test-only graph-isomorphism oracle: exhaustive backtracking with degree
// and label pruning (VF2 style), independent of the SMILES writer/parser
// under test. Intended for molecule-sized graphs (<= ~28 nodes).

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "bba/smiles.hpp"

namespace test_support {

struct LabeledGraph {
  std::vector<std::string> labels;               // element per node
  std::map<std::pair<int, int>, int> edges;      // canonical (u<v) -> bond code

  void add_edge(int u, int v, int code) {
    if (u > v) std::swap(u, v);
    edges[{u, v}] = code;
  }

  int edge_code(int u, int v) const {
    if (u > v) std::swap(u, v);
    auto it = edges.find({u, v});
    return it == edges.end() ? -1 : it->second;
  }

  std::vector<int> degrees() const {
    std::vector<int> d(labels.size(), 0);
    for (const auto& [pair, code] : edges) {
      ++d[pair.first];
      ++d[pair.second];
    }
    return d;
  }
};

inline LabeledGraph from_mutag(const bba::MutagGraph& g) {
  LabeledGraph out;
  for (int code : g.nodes) out.labels.push_back(bba::mutag_element(code));
  for (const auto& e : g.edges)
    out.add_edge(e.u, e.v, static_cast<int>(bba::mutag_bond_order(e.code)));
  return out;
}

inline LabeledGraph from_smiles(const bba::SmilesMolecule& m) {
  LabeledGraph out;
  for (const auto& atom : m.atoms) out.labels.push_back(atom.element);
  for (const auto& bond : m.bonds) out.add_edge(bond.a, bond.b, static_cast<int>(bond.order));
  return out;
}

namespace detail {

inline bool extend(const LabeledGraph& a, const LabeledGraph& b,
                   const std::vector<int>& order, std::size_t depth,
                   std::vector<int>& map_ab, std::vector<bool>& used_b,
                   const std::vector<int>& deg_a, const std::vector<int>& deg_b) {
  if (depth == order.size()) return true;
  int u = order[depth];
  for (int v = 0; v < static_cast<int>(b.labels.size()); ++v) {
    if (used_b[v]) continue;
    if (a.labels[u] != b.labels[v]) continue;
    if (deg_a[u] != deg_b[v]) continue;
    bool ok = true;
    for (std::size_t k = 0; k < depth && ok; ++k) {
      int w = order[k];
      if (a.edge_code(u, w) != b.edge_code(v, map_ab[w])) ok = false;
    }
    if (!ok) continue;
    map_ab[u] = v;
    used_b[v] = true;
    if (extend(a, b, order, depth + 1, map_ab, used_b, deg_a, deg_b)) return true;
    used_b[v] = false;
    map_ab[u] = -1;
  }
  return false;
}

}  // namespace detail

// Element- and bond-code-preserving isomorphism test.
inline bool isomorphic(const LabeledGraph& a, const LabeledGraph& b) {
  if (a.labels.size() != b.labels.size()) return false;
  if (a.edges.size() != b.edges.size()) return false;
  auto deg_a = a.degrees();
  auto deg_b = b.degrees();
  {
    auto sa = deg_a;
    auto sb = deg_b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
    auto la = a.labels;
    auto lb = b.labels;
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    if (la != lb) return false;
  }
  // Most-constrained-first ordering, keeping connectivity to the mapped
  // prefix where possible.
  std::vector<int> order;
  std::vector<bool> chosen(a.labels.size(), false);
  for (std::size_t step = 0; step < a.labels.size(); ++step) {
    int best = -1;
    bool best_connected = false;
    for (int u = 0; u < static_cast<int>(a.labels.size()); ++u) {
      if (chosen[u]) continue;
      bool connected = false;
      for (int w : order) {
        if (a.edge_code(u, w) >= 0) {
          connected = true;
          break;
        }
      }
      if (best == -1 || (connected && !best_connected) ||
          (connected == best_connected && deg_a[u] > deg_a[best])) {
        best = u;
        best_connected = connected;
      }
    }
    chosen[best] = true;
    order.push_back(best);
  }
  std::vector<int> map_ab(a.labels.size(), -1);
  std::vector<bool> used_b(b.labels.size(), false);
  return detail::extend(a, b, order, 0, map_ab, used_b, deg_a, deg_b);
}

}  // namespace test_support
