#ifndef HOPLP_EDGE_SET_HPP
#define HOPLP_EDGE_SET_HPP

#include "junction_tree.hpp"
#include "model.hpp"

namespace hoplp {

// A consistency set S: a subset of the model edges with a junction forest
// over the covered variables V(S). Variables outside V(S) stay singletons.
struct edge_set {
  std::vector<int> members;        // indices into model.edges, sorted ascending
  std::vector<vertex_pair> pairs;  // endpoints, aligned with members
  std::vector<int> covered;        // V(S), sorted
  std::vector<int> singletons;     // V - V(S), sorted
  elimination_order order;
  junction_forest forest;          // over V(S)
  int tw_bound = 0;                // induced width of `order`

  bool contains(int edge_index) const
  {
    return std::binary_search(members.begin(), members.end(), edge_index);
  }
};

inline edge_set build_edge_set(const energy_model& m, std::vector<int> edge_indices)
{
  std::sort(edge_indices.begin(), edge_indices.end());
  edge_indices.erase(std::unique(edge_indices.begin(), edge_indices.end()), edge_indices.end());
  edge_set s;
  for (int e : edge_indices) {
    if (e < 0 || e >= (int)m.edges.size()) throw input_error("edge set: edge index out of range");
    s.pairs.emplace_back(m.edges[e].i, m.edges[e].j);
  }
  s.members = std::move(edge_indices);

  std::vector<bool> in(m.n, false);
  for (auto [i, j] : s.pairs) in[i] = in[j] = true;
  for (int v = 0; v < m.n; ++v) (in[v] ? s.covered : s.singletons).push_back(v);

  s.order = treewidth_upper_bound(s.covered, s.pairs);
  s.tw_bound = s.order.width;
  s.forest = build_junction_forest(m.n, s.pairs, s.order);
  return s;
}

inline edge_set empty_edge_set(const energy_model& m) { return build_edge_set(m, {}); }

inline edge_set full_edge_set(const energy_model& m)
{
  std::vector<int> all(m.edges.size());
  std::iota(all.begin(), all.end(), 0);
  return build_edge_set(m, std::move(all));
}

// Additive terms layered on top of theta_alpha:
//   H(x) = theta_alpha(x) + sum_{e in S} edge_tables[e](x_i, x_j)
//                         + sum_v node_tables[v](x_v).
// Node tables cover singleton messages and, during edge selection, absorbed
// unary reparameterizations of covered variables.
struct hop_augment {
  std::vector<std::array<double, 4>> edge_tables;  // aligned with edge_set::pairs
  std::vector<std::array<double, 2>> node_tables;  // per variable id

  static hop_augment zeros(int n, std::size_t edge_count)
  {
    hop_augment a;
    a.edge_tables.assign(edge_count, {0.0, 0.0, 0.0, 0.0});
    a.node_tables.assign(n, {0.0, 0.0});
    return a;
  }
};

// Value of the augmented HOP term at one assignment (direct evaluation).
inline double augmented_hop_value(const hop_potential& hop, const edge_set& s, const hop_augment& aug,
                                  const assignment& x)
{
  double v = hop_value(hop, x);
  for (std::size_t e = 0; e < s.pairs.size(); ++e)
    v = sat_add(v, aug.edge_tables[e][x[s.pairs[e].first] * 2 + x[s.pairs[e].second]]);
  for (std::size_t i = 0; i < aug.node_tables.size(); ++i)
    v = sat_add(v, aug.node_tables[i][x[i]]);
  return v;
}

} // namespace hoplp

#endif
