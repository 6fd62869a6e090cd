#ifndef HOPLP_GRAPH_UTILS_HPP
#define HOPLP_GRAPH_UTILS_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace hoplp {

using vertex_pair = std::pair<int, int>;

struct union_find {
  std::vector<int> parent, size;

  explicit union_find(int n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int v)
  {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }

  bool unite(int a, int b)
  {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
    return true;
  }
};

inline std::vector<std::vector<int>> adjacency_lists(int n, const std::vector<vertex_pair>& edges)
{
  std::vector<std::vector<int>> adj(n);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

} // namespace hoplp

#endif
