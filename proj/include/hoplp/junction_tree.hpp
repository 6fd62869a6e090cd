#ifndef HOPLP_JUNCTION_TREE_HPP
#define HOPLP_JUNCTION_TREE_HPP

#include <functional>
#include <map>
#include <set>

#include "elimination.hpp"
#include "ext_real.hpp"
#include "model.hpp"

// Junction forests over low-tree-width edge sets and an exact min-sum engine
// with min-marginals, lexicographic argmin decoding and tie enumeration.

namespace hoplp {

struct junction_clique {
  std::vector<int> vars;       // sorted ascending
  int parent = -1;             // clique index, -1 for roots
  std::vector<int> children;
  std::vector<int> separator;  // vars shared with parent
};

struct junction_forest {
  int n = 0;  // global variable count
  std::vector<junction_clique> cliques;
  std::vector<int> roots;
  std::vector<vertex_pair> edges;  // structure edges covered by the forest
  std::vector<int> edge_clique;    // covering clique per structure edge
  std::vector<int> home_clique;    // per variable: root-most clique containing it, -1 if uncovered
  std::vector<int> covered;        // sorted covered variable ids

  bool covers(int v) const { return home_clique[v] >= 0; }
};

namespace detail {

// Index of the separator assignment inside a clique assignment mask.
struct separator_indexer {
  std::vector<int> bit_of;  // per separator position: bit position inside the clique

  separator_indexer() = default;
  separator_indexer(const std::vector<int>& clique_vars, const std::vector<int>& sep_vars)
  {
    for (int s : sep_vars) {
      auto it = std::lower_bound(clique_vars.begin(), clique_vars.end(), s);
      assert(it != clique_vars.end() && *it == s);
      bit_of.push_back((int)(it - clique_vars.begin()));
    }
  }

  std::size_t operator()(std::size_t clique_mask) const
  {
    std::size_t idx = 0;
    for (std::size_t b = 0; b < bit_of.size(); ++b)
      idx |= ((clique_mask >> bit_of[b]) & 1u) << b;
    return idx;
  }
};

} // namespace detail

// Builds a junction forest for the structure edges `structure` by simulating
// vertex elimination along `order`. Each clique of an eliminated vertex is
// attached to the clique of the next eliminated vertex it contains; cliques
// that are subsets of a tree neighbour are absorbed. Every structure edge is
// assigned to exactly one covering clique.
inline junction_forest build_junction_forest(int n, const std::vector<vertex_pair>& structure,
                                             const elimination_order& order)
{
  junction_forest forest;
  forest.n = n;
  forest.edges = structure;
  forest.home_clique.assign(n, -1);

  std::set<int> needed;
  for (auto [i, j] : structure) {
    needed.insert(i);
    needed.insert(j);
  }
  std::set<int> in_order(order.order.begin(), order.order.end());
  for (int v : needed)
    if (!in_order.count(v)) throw input_error("junction forest: elimination order does not cover all structure vertices");
  if (in_order.size() != order.order.size()) throw input_error("junction forest: elimination order repeats a vertex");

  if (structure.empty() && order.order.empty()) return forest;

  // Elimination cliques with fill-in.
  std::map<int, std::set<int>> adj;
  for (int v : order.order) adj[v];
  for (auto [i, j] : structure) {
    adj[i].insert(j);
    adj[j].insert(i);
  }
  std::vector<int> position(n, -1);
  for (std::size_t p = 0; p < order.order.size(); ++p) position[order.order[p]] = (int)p;

  struct elim_clique {
    std::vector<int> vars;
    int vertex;
  };
  std::vector<elim_clique> elim;
  std::map<int, int> clique_of_vertex;
  for (int v : order.order) {
    std::vector<int> vars(adj[v].begin(), adj[v].end());
    for (std::size_t a = 0; a < vars.size(); ++a)
      for (std::size_t b = a + 1; b < vars.size(); ++b) {
        adj[vars[a]].insert(vars[b]);
        adj[vars[b]].insert(vars[a]);
      }
    for (int u : vars) adj[u].erase(v);
    vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    clique_of_vertex[v] = (int)elim.size();
    elim.push_back({std::move(vars), v});
  }

  // Tree edges: clique of v attaches to the clique of the next-eliminated
  // vertex among its other members.
  std::vector<std::pair<int, int>> links;
  for (std::size_t c = 0; c < elim.size(); ++c) {
    int next = -1;
    for (int u : elim[c].vars) {
      if (u == elim[c].vertex) continue;
      if (next == -1 || position[u] < position[next]) next = u;
    }
    if (next != -1) links.emplace_back((int)c, clique_of_vertex[next]);
  }

  // Absorb cliques that are subsets of a tree neighbour.
  std::vector<int> alias(elim.size());
  std::iota(alias.begin(), alias.end(), 0);
  std::function<int(int)> resolve = [&](int c) { return alias[c] == c ? c : alias[c] = resolve(alias[c]); };
  auto subset = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [a, b] : links) {
      int ca = resolve(a), cb = resolve(b);
      if (ca == cb) continue;
      if (subset(elim[ca].vars, elim[cb].vars)) {
        alias[ca] = cb;
        changed = true;
      } else if (subset(elim[cb].vars, elim[ca].vars)) {
        alias[cb] = ca;
        changed = true;
      }
    }
  }

  // Compact surviving cliques, rebuild tree adjacency.
  std::map<int, int> compact;
  for (std::size_t c = 0; c < elim.size(); ++c)
    if (resolve((int)c) == (int)c) {
      compact[(int)c] = (int)forest.cliques.size();
      junction_clique jc;
      jc.vars = elim[c].vars;
      forest.cliques.push_back(std::move(jc));
    }
  std::vector<std::set<int>> tree_adj(forest.cliques.size());
  for (auto& [a, b] : links) {
    int ca = compact[resolve(a)], cb = compact[resolve(b)];
    if (ca != cb) {
      tree_adj[ca].insert(cb);
      tree_adj[cb].insert(ca);
    }
  }

  // Root every component at its lowest clique index and orient.
  std::vector<bool> seen(forest.cliques.size(), false);
  for (std::size_t c = 0; c < forest.cliques.size(); ++c) {
    if (seen[c]) continue;
    forest.roots.push_back((int)c);
    std::vector<int> stack{(int)c};
    seen[c] = true;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int nb : tree_adj[cur]) {
        if (seen[nb]) continue;
        seen[nb] = true;
        forest.cliques[nb].parent = cur;
        forest.cliques[cur].children.push_back(nb);
        stack.push_back(nb);
      }
    }
  }
  for (auto& jc : forest.cliques) {
    if (jc.parent >= 0) {
      const auto& pv = forest.cliques[jc.parent].vars;
      std::set_intersection(jc.vars.begin(), jc.vars.end(), pv.begin(), pv.end(),
                            std::back_inserter(jc.separator));
    }
  }

  // Home clique per variable: the root-most clique containing it.
  std::vector<int> topo;
  for (int r : forest.roots) {
    std::vector<int> stack{r};
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      topo.push_back(cur);
      for (int ch : forest.cliques[cur].children) stack.push_back(ch);
    }
  }
  for (int c : topo)
    for (int v : forest.cliques[c].vars) {
      if (forest.home_clique[v] == -1) forest.home_clique[v] = c;
      forest.covered.push_back(v);
    }
  std::sort(forest.covered.begin(), forest.covered.end());
  forest.covered.erase(std::unique(forest.covered.begin(), forest.covered.end()), forest.covered.end());

  // Assign each structure edge to its first covering clique.
  for (auto [i, j] : structure) {
    int found = -1;
    for (std::size_t c = 0; c < forest.cliques.size() && found == -1; ++c) {
      const auto& vars = forest.cliques[c].vars;
      if (std::binary_search(vars.begin(), vars.end(), i) && std::binary_search(vars.begin(), vars.end(), j))
        found = (int)c;
    }
    assert(found != -1 && "triangulation must cover every structure edge");
    forest.edge_clique.push_back(found);
  }
  return forest;
}

// Appends isolated variables as one-clique roots so a single sweep can cover
// forest components and singletons together.
inline junction_forest with_singleton_cliques(junction_forest forest, const std::vector<int>& singles)
{
  for (int v : singles) {
    assert(forest.home_clique[v] == -1);
    junction_clique jc;
    jc.vars = {v};
    forest.home_clique[v] = (int)forest.cliques.size();
    forest.roots.push_back((int)forest.cliques.size());
    forest.covered.insert(std::lower_bound(forest.covered.begin(), forest.covered.end(), v), v);
    forest.cliques.push_back(std::move(jc));
  }
  return forest;
}

inline bool verify_running_intersection(const junction_forest& forest)
{
  // For every variable the cliques containing it must form a connected
  // subtree; with parent pointers it suffices that every non-home clique's
  // parent also contains the variable.
  for (std::size_t c = 0; c < forest.cliques.size(); ++c) {
    for (int v : forest.cliques[c].vars) {
      if (forest.home_clique[v] == (int)c) continue;
      const int p = forest.cliques[c].parent;
      if (p < 0) return false;
      const auto& pv = forest.cliques[p].vars;
      if (!std::binary_search(pv.begin(), pv.end(), v)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exact min-sum over a junction forest.

struct junction_potentials {
  // Additive table per clique (size 1 << |vars|, empty means all-zero) plus a
  // unary term per variable, applied at the variable's home clique.
  std::vector<std::vector<double>> clique_tables;
  std::vector<std::array<double, 2>> unary;
};

// clamp[v]: -1 free, 0/1 fixed. Assignments violating a clamp are skipped.
using clamp_vector = std::vector<std::int8_t>;

class junction_sweep {
public:
  junction_sweep(const junction_forest& forest, const junction_potentials& pot)
      : forest_(forest), pot_(pot)
  {
    const auto& cls = forest_.cliques;
    sep_index_.resize(cls.size());
    for (std::size_t c = 0; c < cls.size(); ++c)
      sep_index_[c] = detail::separator_indexer(cls[c].vars, cls[c].separator);
    child_sep_index_.resize(cls.size());
    for (std::size_t c = 0; c < cls.size(); ++c)
      for (int ch : cls[c].children)
        child_sep_index_[c].push_back(detail::separator_indexer(cls[c].vars, cls[ch].separator));
    effective_.resize(cls.size());
    for (std::size_t c = 0; c < cls.size(); ++c) {
      const auto& vars = cls[c].vars;
      std::vector<double> table(std::size_t(1) << vars.size(), 0.0);
      if (c < pot_.clique_tables.size() && !pot_.clique_tables[c].empty()) {
        assert(pot_.clique_tables[c].size() == table.size());
        table = pot_.clique_tables[c];
      }
      for (std::size_t b = 0; b < vars.size(); ++b) {
        const int v = vars[b];
        if (forest_.home_clique[v] != (int)c || v >= (int)pot_.unary.size()) continue;
        for (std::size_t mask = 0; mask < table.size(); ++mask)
          table[mask] = sat_add(table[mask], pot_.unary[v][(mask >> b) & 1]);
      }
      effective_[c] = std::move(table);
    }
  }

  // Minimum of the total under optional clamps.
  double min_value(const clamp_vector& clamp = {})
  {
    run_up(clamp);
    double total = 0.0;
    for (int r : forest_.roots) total = sat_add(total, root_min_[r]);
    return total;
  }

  // Lexicographically smallest minimizer over covered variables (0 preferred
  // on ties). Entries of uncovered variables are left at 0.
  assignment lex_argmin()
  {
    clamp_vector clamp(forest_.n, -1);
    assignment x(forest_.n, 0);
    for (int v : forest_.covered) {
      clamp[v] = 0;
      const double v0 = min_value(clamp);
      clamp[v] = 1;
      const double v1 = min_value(clamp);
      clamp[v] = (v0 <= v1) ? 0 : 1;
      x[v] = (std::uint8_t)clamp[v];
    }
    return x;
  }

  // Per-clique beliefs: belief(c)[mask] = min over all assignments consistent
  // with the clique assignment `mask`. Requires an up and a down pass.
  const std::vector<std::vector<double>>& beliefs(const clamp_vector& clamp = {})
  {
    run_up(clamp);
    run_down(clamp);
    beliefs_.assign(forest_.cliques.size(), {});
    for (std::size_t c = 0; c < forest_.cliques.size(); ++c) {
      const auto& cl = forest_.cliques[c];
      std::vector<double> bel = local_with_children(c, clamp);
      // All other trees of the forest contribute their minima additively.
      double rest = 0.0;
      int root = (int)c;
      while (forest_.cliques[root].parent >= 0) root = forest_.cliques[root].parent;
      for (int r : forest_.roots)
        if (r != root) rest = sat_add(rest, root_min_[r]);
      for (std::size_t mask = 0; mask < bel.size(); ++mask) {
        if (cl.parent >= 0) bel[mask] = sat_add(bel[mask], down_[c][sep_index_[c](mask)]);
        bel[mask] = sat_add(bel[mask], rest);
      }
      beliefs_[c] = std::move(bel);
    }
    return beliefs_;
  }

  std::array<double, 2> vertex_min_marginal(int v)
  {
    assert(!beliefs_.empty());
    const int c = forest_.home_clique[v];
    assert(c >= 0);
    const auto& vars = forest_.cliques[c].vars;
    const int bit = (int)(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
    std::array<double, 2> out{infinity_sentinel, infinity_sentinel};
    for (std::size_t mask = 0; mask < beliefs_[c].size(); ++mask)
      out[(mask >> bit) & 1] = std::min(out[(mask >> bit) & 1], beliefs_[c][mask]);
    return out;
  }

  std::array<double, 4> edge_min_marginal(int structure_edge)
  {
    assert(!beliefs_.empty());
    const int c = forest_.edge_clique[structure_edge];
    const auto [i, j] = forest_.edges[structure_edge];
    const auto& vars = forest_.cliques[c].vars;
    const int bi = (int)(std::lower_bound(vars.begin(), vars.end(), i) - vars.begin());
    const int bj = (int)(std::lower_bound(vars.begin(), vars.end(), j) - vars.begin());
    std::array<double, 4> out{infinity_sentinel, infinity_sentinel, infinity_sentinel, infinity_sentinel};
    for (std::size_t mask = 0; mask < beliefs_[c].size(); ++mask) {
      const std::size_t key = ((mask >> bi) & 1) * 2 + ((mask >> bj) & 1);
      out[key] = std::min(out[key], beliefs_[c][mask]);
    }
    return out;
  }

  // Enumerates assignments with total value <= budget in lexicographic order.
  // sink(x) returns false to stop early. Returns false when stopped.
  bool enumerate_within(double budget, const std::function<bool(const assignment&)>& sink)
  {
    clamp_vector clamp(forest_.n, -1);
    assignment x(forest_.n, 0);
    return enumerate_rec(0, budget, clamp, x, sink);
  }

private:
  bool enumerate_rec(std::size_t pos, double budget, clamp_vector& clamp, assignment& x,
                     const std::function<bool(const assignment&)>& sink)
  {
    if (pos == forest_.covered.size()) return sink(x);
    const int v = forest_.covered[pos];
    for (int label = 0; label < 2; ++label) {
      clamp[v] = (std::int8_t)label;
      if (min_value(clamp) <= budget) {
        x[v] = (std::uint8_t)label;
        if (!enumerate_rec(pos + 1, budget, clamp, x, sink)) {
          clamp[v] = -1;
          x[v] = 0;
          return false;
        }
      }
    }
    clamp[v] = -1;
    x[v] = 0;
    return true;
  }

  bool allowed(std::size_t mask, const std::vector<int>& vars, const clamp_vector& clamp) const
  {
    if (clamp.empty()) return true;
    for (std::size_t b = 0; b < vars.size(); ++b) {
      const auto c = clamp[vars[b]];
      if (c >= 0 && ((mask >> b) & 1) != (std::size_t)c) return false;
    }
    return true;
  }

  // Effective table plus child messages (no parent contribution).
  std::vector<double> local_with_children(std::size_t c, const clamp_vector& clamp)
  {
    const auto& cl = forest_.cliques[c];
    std::vector<double> table(effective_[c].size(), infinity_sentinel);
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
      if (!allowed(mask, cl.vars, clamp)) continue;
      double val = effective_[c][mask];
      for (std::size_t t = 0; t < cl.children.size(); ++t)
        val = sat_add(val, up_[cl.children[t]][child_sep_index_[c][t](mask)]);
      table[mask] = val;
    }
    return table;
  }

  void run_up(const clamp_vector& clamp)
  {
    const auto& cls = forest_.cliques;
    up_.assign(cls.size(), {});
    root_min_.assign(cls.size(), infinity_sentinel);
    // parents have lower DFS order than children only within roots ordering;
    // process by explicit post-order.
    std::vector<int> post;
    post.reserve(cls.size());
    for (int r : forest_.roots) {
      std::vector<std::pair<int, std::size_t>> stack{{r, 0}};
      while (!stack.empty()) {
        auto& [cur, next_child] = stack.back();
        if (next_child < cls[cur].children.size()) {
          stack.emplace_back(cls[cur].children[next_child++], 0);
        } else {
          post.push_back(cur);
          stack.pop_back();
        }
      }
    }
    for (int c : post) {
      std::vector<double> table = local_with_children(c, clamp);
      if (cls[c].parent < 0) {
        double best = infinity_sentinel;
        for (double v : table) best = std::min(best, v);
        root_min_[c] = best;
      } else {
        std::vector<double> msg(std::size_t(1) << cls[c].separator.size(), infinity_sentinel);
        for (std::size_t mask = 0; mask < table.size(); ++mask) {
          const std::size_t key = sep_index_[c](mask);
          msg[key] = std::min(msg[key], table[mask]);
        }
        up_[c] = std::move(msg);
      }
    }
  }

  void run_down(const clamp_vector& clamp)
  {
    const auto& cls = forest_.cliques;
    down_.assign(cls.size(), {});
    std::vector<int> pre;
    for (int r : forest_.roots) {
      std::vector<int> stack{r};
      while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        pre.push_back(cur);
        for (int ch : cls[cur].children) stack.push_back(ch);
      }
    }
    for (int p : pre) {
      const std::size_t d = cls[p].children.size();
      if (d == 0) continue;
      // prefix[t] = effective + parent inflow + first t child messages;
      // suffix[t] = messages of children t..d-1. Avoids min-sum "division".
      const std::size_t size = effective_[p].size();
      std::vector<double> acc(size);
      for (std::size_t mask = 0; mask < size; ++mask) {
        double val = allowed(mask, cls[p].vars, clamp) ? effective_[p][mask] : infinity_sentinel;
        if (cls[p].parent >= 0) val = sat_add(val, down_[p][sep_index_[p](mask)]);
        acc[mask] = val;
      }
      std::vector<std::vector<double>> prefix(d + 1), suffix(d + 1);
      prefix[0] = acc;
      for (std::size_t t = 0; t < d; ++t) {
        prefix[t + 1] = prefix[t];
        const int ch = cls[p].children[t];
        for (std::size_t mask = 0; mask < size; ++mask)
          prefix[t + 1][mask] = sat_add(prefix[t + 1][mask], up_[ch][child_sep_index_[p][t](mask)]);
      }
      suffix[d].assign(size, 0.0);
      for (std::size_t t = d; t-- > 0;) {
        suffix[t] = suffix[t + 1];
        const int ch = cls[p].children[t];
        for (std::size_t mask = 0; mask < size; ++mask)
          suffix[t][mask] = sat_add(suffix[t][mask], up_[ch][child_sep_index_[p][t](mask)]);
      }
      for (std::size_t t = 0; t < d; ++t) {
        const int ch = cls[p].children[t];
        std::vector<double> msg(std::size_t(1) << cls[ch].separator.size(), infinity_sentinel);
        for (std::size_t mask = 0; mask < size; ++mask) {
          const double val = sat_add(prefix[t][mask], suffix[t + 1][mask]);
          const std::size_t key = child_sep_index_[p][t](mask);
          msg[key] = std::min(msg[key], val);
        }
        down_[ch] = std::move(msg);
      }
    }
  }

  const junction_forest& forest_;
  const junction_potentials& pot_;
  std::vector<detail::separator_indexer> sep_index_;
  std::vector<std::vector<detail::separator_indexer>> child_sep_index_;
  std::vector<std::vector<double>> effective_;
  std::vector<std::vector<double>> up_;
  std::vector<std::vector<double>> down_;
  std::vector<double> root_min_;
  std::vector<std::vector<double>> beliefs_;
};

struct junction_min_result {
  double value = 0.0;
  assignment argmin;  // lexicographically smallest minimizer (covered vars)
};

// Exact minimum of clique potentials plus unary terms over the forest.
inline junction_min_result junction_min(const junction_forest& forest, const junction_potentials& pot)
{
  junction_sweep sweep(forest, pot);
  junction_min_result res;
  res.value = sweep.min_value();
  res.argmin = sweep.lex_argmin();
  return res;
}

} // namespace hoplp

#endif
