#ifndef HOPLP_ELIMINATION_HPP
#define HOPLP_ELIMINATION_HPP

#include <set>
#include <vector>

#include "graph_utils.hpp"

namespace hoplp {

// A vertex elimination order together with the induced width it achieves.
// The width is an upper bound on the tree-width of the graph.
struct elimination_order {
  std::vector<int> order;
  int width = 0;
};

// Greedy min-fill: repeatedly eliminate the vertex whose elimination adds the
// fewest fill edges, breaking ties by lowest vertex index. Deterministic.
//
// `vertices` lists the vertex subset to eliminate; `edges` must connect only
// vertices from that subset.
inline elimination_order treewidth_upper_bound(const std::vector<int>& vertices,
                                               const std::vector<vertex_pair>& edges)
{
  elimination_order result;
  if (vertices.empty()) return result;

  std::vector<std::set<int>> adj;
  // Compact vertex ids for the working adjacency.
  std::vector<int> ids(vertices);
  std::sort(ids.begin(), ids.end());
  auto local = [&](int v) {
    return (int)(std::lower_bound(ids.begin(), ids.end(), v) - ids.begin());
  };
  const int m = (int)ids.size();
  adj.assign(m, {});
  for (auto [i, j] : edges) {
    adj[local(i)].insert(local(j));
    adj[local(j)].insert(local(i));
  }

  std::vector<bool> eliminated(m, false);
  result.width = 0;
  for (int step = 0; step < m; ++step) {
    int best = -1;
    long best_fill = -1;
    for (int v = 0; v < m; ++v) {
      if (eliminated[v]) continue;
      long fill = 0;
      for (auto it = adj[v].begin(); it != adj[v].end(); ++it)
        for (auto jt = std::next(it); jt != adj[v].end(); ++jt)
          if (!adj[*it].count(*jt)) ++fill;
      if (best == -1 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    // Connect the neighborhood, then remove the vertex.
    const std::vector<int> nbrs(adj[best].begin(), adj[best].end());
    result.width = std::max(result.width, (int)nbrs.size());
    for (std::size_t a = 0; a < nbrs.size(); ++a)
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        adj[nbrs[a]].insert(nbrs[b]);
        adj[nbrs[b]].insert(nbrs[a]);
      }
    for (int u : nbrs) adj[u].erase(best);
    adj[best].clear();
    eliminated[best] = true;
    result.order.push_back(ids[best]);
  }
  return result;
}

inline elimination_order treewidth_upper_bound(const std::vector<vertex_pair>& edges)
{
  std::set<int> vs;
  for (auto [i, j] : edges) {
    vs.insert(i);
    vs.insert(j);
  }
  return treewidth_upper_bound(std::vector<int>(vs.begin(), vs.end()), edges);
}

// Width induced by a fixed order; used to validate elimination_order invariants.
inline int induced_width(const std::vector<int>& order, const std::vector<vertex_pair>& edges)
{
  std::vector<std::set<int>> adj;
  std::vector<int> ids(order);
  std::sort(ids.begin(), ids.end());
  auto local = [&](int v) {
    return (int)(std::lower_bound(ids.begin(), ids.end(), v) - ids.begin());
  };
  adj.assign(ids.size(), {});
  for (auto [i, j] : edges) {
    adj[local(i)].insert(local(j));
    adj[local(j)].insert(local(i));
  }
  int width = 0;
  for (int v : order) {
    const int lv = local(v);
    const std::vector<int> nbrs(adj[lv].begin(), adj[lv].end());
    width = std::max(width, (int)nbrs.size());
    for (std::size_t a = 0; a < nbrs.size(); ++a)
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        adj[nbrs[a]].insert(nbrs[b]);
        adj[nbrs[b]].insert(nbrs[a]);
      }
    for (int u : nbrs) adj[u].erase(lv);
    adj[lv].clear();
  }
  return width;
}

} // namespace hoplp

#endif
