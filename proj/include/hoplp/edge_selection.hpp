#ifndef HOPLP_EDGE_SELECTION_HPP
#define HOPLP_EDGE_SELECTION_HPP

#include "dual.hpp"
#include "report.hpp"

// Growing a tractable consistency set: maximum-weight spanning tree start,
// weak cycle agreement (WCA) scoring of the remaining edges, and the
// sequential batch-addition loop under a tree-width budget.

namespace hoplp {

inline constexpr double default_wca_eps = 1e-7;

inline double spanning_weight(const edge_potential& e)
{
  return *std::max_element(e.theta.begin(), e.theta.end()) -
         *std::min_element(e.theta.begin(), e.theta.end());
}

// Maximum-weight spanning tree (forest on disconnected graphs) under
// w_ij = max(theta_ij) - min(theta_ij); Kruskal with lexicographic tie-break.
inline edge_set initial_tree(const energy_model& m)
{
  std::vector<int> order(m.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double wa = spanning_weight(m.edges[a]), wb = spanning_weight(m.edges[b]);
    if (wa != wb) return wa > wb;
    return std::make_pair(m.edges[a].i, m.edges[a].j) < std::make_pair(m.edges[b].i, m.edges[b].j);
  });
  union_find uf(m.n);
  std::vector<int> picked;
  for (int e : order)
    if (uf.unite(m.edges[e].i, m.edges[e].j)) picked.push_back(e);
  return build_edge_set(m, std::move(picked));
}

// WCA of an edge outside S: min over the HOP minimizers of the edge's
// reparameterized value, minus the table's unconstrained minimum. Positive
// WCA certifies that adding the edge strictly tightens the relaxation.
inline double wca_score(const std::array<double, 4>& theta_tilde, const std::vector<assignment>& argmins,
                        int i, int j)
{
  if (argmins.empty()) throw input_error("wca_score: empty argmin set");
  double over_argmins = infinity_sentinel;
  for (const auto& x : argmins)
    over_argmins = std::min(over_argmins, theta_tilde[x[i] * 2 + x[j]]);
  return over_argmins - *std::min_element(theta_tilde.begin(), theta_tilde.end());
}

struct edge_score {
  int edge = -1;  // model edge index
  double wca = 0.0;
  double spanning_weight = 0.0;
  bool admissible = false;        // tree-width budget respected after adding
  bool truncated_argmins = false; // score computed from a truncated minimizer set
};

struct selection_config {
  int batch_size = 8;  // edges added per round
  int tw_max = 6;
  double wca_eps = default_wca_eps;
  int max_rounds = 50;
  solve_config solve;
};

struct selection_addition {
  int edge = -1;
  double wca = 0.0;
  bool truncated = false;
};

struct selection_round {
  int round = 0;
  std::vector<selection_addition> added;
  int edges_in_s = 0;
  int tw_bound = 0;
  double converged_bound = 0.0;
  bool certificate = false;
};

using selection_trace = std::vector<selection_round>;

inline std::string selection_trace_csv(const selection_trace& trace)
{
  std::string out = "round,edges_in_S,edge_added,wca,treewidth_bound,converged_bound\n";
  for (const auto& r : trace) {
    if (r.added.empty())
      out += std::to_string(r.round) + "," + std::to_string(r.edges_in_s) + ",," + "," +
             std::to_string(r.tw_bound) + "," + format_double(r.converged_bound) + "\n";
    for (const auto& a : r.added)
      out += std::to_string(r.round) + "," + std::to_string(r.edges_in_s) + "," + std::to_string(a.edge) +
             "," + format_double(a.wca) + "," + std::to_string(r.tw_bound) + "," +
             format_double(r.converged_bound) + "\n";
  }
  return out;
}

namespace detail {

inline bool admissible_under_budget(const energy_model& m, const std::vector<int>& members, int extra,
                                    int tw_max)
{
  std::vector<vertex_pair> pairs;
  pairs.reserve(members.size() + 1);
  for (int e : members) pairs.emplace_back(m.edges[e].i, m.edges[e].j);
  pairs.emplace_back(m.edges[extra].i, m.edges[extra].j);
  return treewidth_upper_bound(pairs).width <= tw_max;
}

} // namespace detail

// Scores every edge outside `members` against the given reparameterized
// tables and minimizer set.
inline std::vector<edge_score> score_candidates(const energy_model& m, const std::vector<int>& members,
                                                const std::vector<std::array<double, 4>>& tilde,
                                                const argmin_set& argmins, int tw_max)
{
  std::vector<bool> in_s(m.edges.size(), false);
  for (int e : members) in_s[e] = true;
  std::vector<edge_score> scores;
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    if (in_s[e]) continue;
    edge_score score;
    score.edge = (int)e;
    score.wca = wca_score(tilde[e], argmins.assignments, m.edges[e].i, m.edges[e].j);
    score.spanning_weight = spanning_weight(m.edges[e]);
    score.truncated_argmins = argmins.truncated;
    score.admissible = detail::admissible_under_budget(m, members, (int)e, tw_max);
    scores.push_back(score);
  }
  return scores;
}

// One batch of additions. Each pick takes the admissible candidate with the
// largest WCA above threshold; before the next pick the chosen edge's
// reparameterized table is absorbed into the HOP term (an additive side table
// used only for re-computing the minimizers) and the WCAs are refreshed.
// Truncated minimizer sets raise the acceptance threshold to 10x wca_eps.
inline std::pair<edge_set, selection_round> select_and_add(const energy_model& m, const edge_set& s,
                                                           const solve_result& solved,
                                                           const selection_config& cfg)
{
  const solver_index idx(m, s);
  const reparameterization repam{m, s, solved.state, idx};

  selection_round round;
  round.tw_bound = s.tw_bound;
  round.edges_in_s = (int)s.members.size();

  std::vector<int> members = s.members;
  argmin_set argmins = solved.hop_argmins;

  std::vector<std::array<double, 4>> tilde(m.edges.size());
  for (std::size_t e = 0; e < m.edges.size(); ++e) tilde[e] = repam.edge((int)e);

  for (int pick = 0; pick < cfg.batch_size; ++pick) {
    // truncated minimizer sets only lower-bound the agreement, so the pick
    // must clear a stiffer threshold before we trust it
    const double threshold = argmins.truncated ? 10.0 * cfg.wca_eps : cfg.wca_eps;
    int best = -1;
    double best_wca = 0.0;
    for (const edge_score& score : score_candidates(m, members, tilde, argmins, cfg.tw_max)) {
      if (!score.admissible || score.wca <= threshold) continue;
      if (best == -1 || score.wca > best_wca) {
        best = score.edge;
        best_wca = score.wca;
      }
    }
    if (best == -1) break;

    members.push_back(best);
    round.added.push_back({best, best_wca, argmins.truncated});

    // Absorb the reparameterized tables of everything picked so far and
    // refresh the minimizer set over the enlarged structure.
    edge_set absorbed = build_edge_set(m, members);
    hop_augment aug = hop_augment::zeros(m.n, absorbed.pairs.size());
    std::vector<int> member_pos(m.edges.size(), -1);
    for (std::size_t k = 0; k < s.members.size(); ++k) member_pos[s.members[k]] = (int)k;
    for (std::size_t k = 0; k < absorbed.members.size(); ++k) {
      const int e = absorbed.members[k];
      if (const int p = member_pos[e]; p >= 0) {
        for (int key = 0; key < 4; ++key) aug.edge_tables[k][key] = -solved.state.delta_edge[p][key];
      } else {
        aug.edge_tables[k] = tilde[e];
      }
    }
    for (std::size_t t = 0; t < s.singletons.size(); ++t) {
      const int v = s.singletons[t];
      aug.node_tables[v][0] = -solved.state.delta_node[t][0];
      aug.node_tables[v][1] = -solved.state.delta_node[t][1];
    }
    argmins = hop_min(m.hop, absorbed, aug, cfg.solve.argmin_cap).argmins;
  }

  edge_set grown = build_edge_set(m, members);
  round.edges_in_s = (int)grown.members.size();
  round.tw_bound = grown.tw_bound;
  return {std::move(grown), std::move(round)};
}

struct tighten_result {
  edge_set s;
  selection_trace trace;
  solve_result final;
  bool wca_fixed_point = false;  // stopped with a positive gap but no WCA-positive edge
};

// Full loop: spanning-tree start, then [solve to convergence; stop on
// certificate; add a WCA batch; stop when nothing is added] with warm starts.
inline tighten_result tighten_loop(const energy_model& m, const selection_config& cfg = {})
{
  tighten_result res;
  res.s = initial_tree(m);
  res.final = solve(m, res.s, cfg.solve);

  selection_round round0;
  round0.round = 0;
  round0.edges_in_s = (int)res.s.members.size();
  round0.tw_bound = res.s.tw_bound;
  round0.converged_bound = res.final.bound;
  round0.certificate = res.final.certificate;
  res.trace.push_back(round0);

  for (int r = 1; r <= cfg.max_rounds; ++r) {
    if (res.final.certificate) return res;
    auto [grown, round] = select_and_add(m, res.s, res.final, cfg);
    if (round.added.empty()) {
      res.wca_fixed_point = res.final.gap > cfg.solve.cert_tol;
      return res;
    }
    dual_state warm = migrate_state(m, res.s, grown, res.final.state);
    res.s = std::move(grown);
    res.final = solve(m, res.s, cfg.solve, std::move(warm));
    round.round = r;
    round.converged_bound = res.final.bound;
    round.certificate = res.final.certificate;
    res.trace.push_back(std::move(round));
  }
  return res;
}

} // namespace hoplp

#endif
