#ifndef HOPLP_DUAL_HPP
#define HOPLP_DUAL_HPP

#include "hop_inference.hpp"

// Dual of LP_S and its block-coordinate ascent solver. Dual variables:
//   lambda_{e->i}(x_i)      edge-to-endpoint messages, every model edge;
//   delta_ij(x_i,x_j)       HOP-to-edge messages, ij in S;
//   delta_i(x_i)            HOP-to-node messages, i outside V(S).
// The reparameterization
//   ~theta_i  = theta_i  + sum_e lambda_{e->i} + [i singleton] delta_i
//   ~theta_ij = theta_ij - lambda_{e->i} - lambda_{e->j} + [ij in S] delta_ij
//   ~theta_a  = theta_a  - sum_{ij in S} delta_ij - sum_singleton delta_i
// sums to the original energy for every assignment; the dual bound
//   B = sum_i min ~theta_i + sum_ij min ~theta_ij + min_x ~theta_a
// is a lower bound on the MAP energy and every update below is monotone in it.

namespace hoplp {

struct dual_state {
  struct edge_messages {
    std::array<double, 2> to_i{0.0, 0.0};
    std::array<double, 2> to_j{0.0, 0.0};
  };
  std::vector<edge_messages> lambda;             // per model edge
  std::vector<std::array<double, 4>> delta_edge; // per S member
  std::vector<std::array<double, 2>> delta_node; // per singleton
};

inline dual_state zero_state(const energy_model& m, const edge_set& s)
{
  dual_state st;
  st.lambda.assign(m.edges.size(), {});
  st.delta_edge.assign(s.members.size(), {0.0, 0.0, 0.0, 0.0});
  st.delta_node.assign(s.singletons.size(), {0.0, 0.0});
  return st;
}

// Cached index structures for one (model, S) pair.
struct solver_index {
  std::vector<std::vector<std::pair<int, int>>> incident;  // per vertex: (edge, side 0/1)
  std::vector<int> member_pos;     // model edge -> position in S.members, -1 outside
  std::vector<int> singleton_pos;  // vertex -> position in S.singletons, -1 covered
  std::vector<int> sweep_order;    // model edges ascending by (i, j)

  solver_index(const energy_model& m, const edge_set& s)
  {
    incident.resize(m.n);
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
      incident[m.edges[e].i].emplace_back((int)e, 0);
      incident[m.edges[e].j].emplace_back((int)e, 1);
    }
    member_pos.assign(m.edges.size(), -1);
    for (std::size_t k = 0; k < s.members.size(); ++k) member_pos[s.members[k]] = (int)k;
    singleton_pos.assign(m.n, -1);
    for (std::size_t t = 0; t < s.singletons.size(); ++t) singleton_pos[s.singletons[t]] = (int)t;
    sweep_order.resize(m.edges.size());
    std::iota(sweep_order.begin(), sweep_order.end(), 0);
    std::sort(sweep_order.begin(), sweep_order.end(), [&](int a, int b) {
      return std::make_pair(m.edges[a].i, m.edges[a].j) < std::make_pair(m.edges[b].i, m.edges[b].j);
    });
  }
};

struct reparameterization {
  const energy_model& m;
  const edge_set& s;
  const dual_state& st;
  const solver_index& idx;

  std::array<double, 2> unary(int v) const
  {
    std::array<double, 2> t = m.unary[v];
    for (auto [e, side] : idx.incident[v]) {
      const auto& msg = side == 0 ? st.lambda[e].to_i : st.lambda[e].to_j;
      t[0] = sat_add(t[0], msg[0]);
      t[1] = sat_add(t[1], msg[1]);
    }
    if (const int p = idx.singleton_pos[v]; p >= 0) {
      t[0] = sat_add(t[0], st.delta_node[p][0]);
      t[1] = sat_add(t[1], st.delta_node[p][1]);
    }
    return t;
  }

  std::array<double, 4> edge(int e) const
  {
    std::array<double, 4> t = m.edges[e].theta;
    const int member = idx.member_pos[e];
    for (int xi = 0; xi < 2; ++xi)
      for (int xj = 0; xj < 2; ++xj) {
        double v = sat_add(t[xi * 2 + xj], -st.lambda[e].to_i[xi] - st.lambda[e].to_j[xj]);
        if (member >= 0) v = sat_add(v, st.delta_edge[member][xi * 2 + xj]);
        t[xi * 2 + xj] = v;
      }
    return t;
  }

  // Additive tables turning theta_alpha into ~theta_alpha.
  hop_augment hop_augment_tables() const
  {
    hop_augment aug = hop_augment::zeros(m.n, s.pairs.size());
    for (std::size_t k = 0; k < s.members.size(); ++k)
      for (int key = 0; key < 4; ++key) aug.edge_tables[k][key] = -st.delta_edge[k][key];
    for (std::size_t t = 0; t < s.singletons.size(); ++t) {
      aug.node_tables[s.singletons[t]][0] = -st.delta_node[t][0];
      aug.node_tables[s.singletons[t]][1] = -st.delta_node[t][1];
    }
    return aug;
  }

  double hop_term(const assignment& x) const
  {
    return augmented_hop_value(m.hop, s, hop_augment_tables(), x);
  }

  // total reparameterized energy at x; equals evaluate_energy(m, x)
  double total(const assignment& x) const
  {
    double v = hop_term(x);
    for (int i = 0; i < m.n; ++i) v = sat_add(v, unary(i)[x[i]]);
    for (std::size_t e = 0; e < m.edges.size(); ++e)
      v = sat_add(v, edge((int)e)[x[m.edges[e].i] * 2 + x[m.edges[e].j]]);
    return v;
  }
};

inline double dual_bound(const energy_model& m, const edge_set& s, const dual_state& st,
                         const solver_index& idx, dp_stats* stats = nullptr)
{
  const reparameterization repam{m, s, st, idx};
  double b = 0.0;
  for (int v = 0; v < m.n; ++v) {
    const auto t = repam.unary(v);
    b = sat_add(b, std::min(t[0], t[1]));
  }
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const auto t = repam.edge((int)e);
    b = sat_add(b, *std::min_element(t.begin(), t.end()));
  }
  b = sat_add(b, hop_min_value(m.hop, s, repam.hop_augment_tables(), stats));
  if (is_forbidden(b)) throw infeasible_error("dual_bound: bound in the forbidden region");
  return b;
}

inline double dual_bound(const energy_model& m, const edge_set& s, const dual_state& st)
{
  return dual_bound(m, s, st, solver_index(m, s));
}

// MPLP-style edge update: split min_{x_j} G and min_{x_i} G evenly between
// the two endpoint messages. G collects the edge table, its HOP message when
// ij is in S, and both endpoint contexts. Forbidden entries are clamped so
// messages stay finite; the sentinel keeps sitting in the original tables.
inline void update_pairwise_block(const energy_model& m, const edge_set& s, dual_state& st,
                                  const solver_index& idx, int e)
{
  const reparameterization repam{m, s, st, idx};
  const int i = m.edges[e].i, j = m.edges[e].j;
  const auto ti = repam.unary(i), tj = repam.unary(j);
  std::array<double, 2> eta_i{ti[0] - st.lambda[e].to_i[0], ti[1] - st.lambda[e].to_i[1]};
  std::array<double, 2> eta_j{tj[0] - st.lambda[e].to_j[0], tj[1] - st.lambda[e].to_j[1]};

  const int member = idx.member_pos[e];
  std::array<double, 4> g{};
  for (int xi = 0; xi < 2; ++xi)
    for (int xj = 0; xj < 2; ++xj) {
      double v = sat_add(m.edges[e].theta[xi * 2 + xj], sat_add(eta_i[xi], eta_j[xj]));
      if (member >= 0) v = sat_add(v, st.delta_edge[member][xi * 2 + xj]);
      g[xi * 2 + xj] = v;
    }
  clamp_forbidden_fixed(g, "pairwise update: edge");
  clamp_forbidden_fixed(eta_i, "pairwise update: endpoint");
  clamp_forbidden_fixed(eta_j, "pairwise update: endpoint");

  for (int xi = 0; xi < 2; ++xi)
    st.lambda[e].to_i[xi] = 0.5 * std::min(g[xi * 2], g[xi * 2 + 1]) - eta_i[xi];
  for (int xj = 0; xj < 2; ++xj)
    st.lambda[e].to_j[xj] = 0.5 * std::min(g[xj], g[2 + xj]) - eta_j[xj];
}

// Factor update: distribute the min-marginals of the augmented factor
//   F(x) = theta_alpha(x) + sum_blocks eta_c(x_c)
// evenly over the N blocks (S edges and singletons). Afterwards the blocks
// carry min F between them and min ~theta_alpha becomes zero.
inline void update_hop_block(const energy_model& m, const edge_set& s, dual_state& st,
                             const solver_index& idx, dp_stats* stats = nullptr)
{
  const std::size_t n_blocks = s.members.size() + s.singletons.size();
  if (n_blocks == 0) return;
  const double inv = 1.0 / (double)n_blocks;

  hop_augment f_aug = hop_augment::zeros(m.n, s.pairs.size());
  std::vector<std::array<double, 4>> eta_edges(s.members.size());
  std::vector<std::array<double, 2>> eta_nodes(s.singletons.size());
  for (std::size_t k = 0; k < s.members.size(); ++k) {
    const int e = s.members[k];
    for (int xi = 0; xi < 2; ++xi)
      for (int xj = 0; xj < 2; ++xj)
        eta_edges[k][xi * 2 + xj] =
            sat_add(m.edges[e].theta[xi * 2 + xj], -st.lambda[e].to_i[xi] - st.lambda[e].to_j[xj]);
    f_aug.edge_tables[k] = eta_edges[k];
  }
  const reparameterization repam{m, s, st, idx};
  for (std::size_t t = 0; t < s.singletons.size(); ++t) {
    const int v = s.singletons[t];
    auto u = repam.unary(v);
    u[0] -= st.delta_node[t][0];
    u[1] -= st.delta_node[t][1];
    eta_nodes[t] = u;
    f_aug.node_tables[v] = u;
  }

  hop_block_marginals mu = hop_min_marginals(m.hop, s, f_aug, stats);

  for (std::size_t k = 0; k < s.members.size(); ++k) {
    clamp_forbidden_fixed(mu.edges[k], "hop update: edge min-marginal");
    clamp_forbidden_fixed(eta_edges[k], "hop update: edge context");
    for (int key = 0; key < 4; ++key)
      st.delta_edge[k][key] = inv * mu.edges[k][key] - eta_edges[k][key];
  }
  for (std::size_t t = 0; t < s.singletons.size(); ++t) {
    clamp_forbidden_fixed(mu.nodes[t], "hop update: node min-marginal");
    clamp_forbidden_fixed(eta_nodes[t], "hop update: node context");
    for (int key = 0; key < 2; ++key)
      st.delta_node[t][key] = inv * mu.nodes[t][key] - eta_nodes[t][key];
  }
}

struct solve_config {
  int max_sweeps = 2000;
  double tol_bound = 1e-8;
  double cert_tol = 1e-6;
  int argmin_cap = default_argmin_cap;
  // Coordinate ascent shows plateau sweeps where messages reposition while
  // the bound holds still; stop only after this many stalled sweeps in a row.
  int stall_sweeps = 3;
};

struct solve_result {
  std::vector<double> bound_trace;  // entry 0 = bound before any sweep
  dual_state state;
  double bound = 0.0;
  assignment decoded;
  double decoded_energy = 0.0;
  double gap = 0.0;
  bool certificate = false;
  bool converged = false;  // stopped because the bound stalled below tol_bound
  int sweeps = 0;
  argmin_set hop_argmins;
};

// Decoding: evaluate a handful of integral candidates on the original energy
// and keep the best. Candidates: unary argmins, the first HOP minimizer, and
// the junction-tree argmin of the reparameterized S-structure.
inline assignment decode(const energy_model& m, const edge_set& s, const dual_state& st,
                         const solver_index& idx, const argmin_set* hop_argmins = nullptr)
{
  const reparameterization repam{m, s, st, idx};
  std::vector<assignment> candidates;

  assignment unary_pick(m.n, 0);
  for (int v = 0; v < m.n; ++v) {
    const auto t = repam.unary(v);
    unary_pick[v] = t[1] < t[0] ? 1 : 0;
  }
  candidates.push_back(std::move(unary_pick));

  argmin_set local;
  if (!hop_argmins) {
    local = hop_min(m.hop, s, repam.hop_augment_tables()).argmins;
    hop_argmins = &local;
  }
  if (!hop_argmins->assignments.empty()) candidates.push_back(hop_argmins->assignments.front());

  {
    junction_forest extended = with_singleton_cliques(s.forest, s.singletons);
    junction_potentials pot;
    pot.clique_tables.resize(extended.cliques.size());
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
      const int c = extended.edge_clique[k];
      const auto& vars = extended.cliques[c].vars;
      auto& table = pot.clique_tables[c];
      if (table.empty()) table.assign(std::size_t(1) << vars.size(), 0.0);
      const auto bit = [&](int v) {
        return (int)(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
      };
      const int bi = bit(s.pairs[k].first), bj = bit(s.pairs[k].second);
      const auto table_e = repam.edge(s.members[k]);
      for (std::size_t mask = 0; mask < table.size(); ++mask)
        table[mask] = sat_add(table[mask], table_e[((mask >> bi) & 1) * 2 + ((mask >> bj) & 1)]);
    }
    pot.unary.resize(m.n);
    for (int v = 0; v < m.n; ++v) pot.unary[v] = repam.unary(v);
    candidates.push_back(junction_sweep(extended, pot).lex_argmin());
  }

  const assignment* best = nullptr;
  double best_energy = infinity_sentinel;
  for (const auto& x : candidates) {
    const double e = evaluate_energy(m, x);
    if (!best || e < best_energy || (e == best_energy && assignment_lex_less(x, *best))) {
      best = &x;
      best_energy = e;
    }
  }
  return *best;
}

// Block-coordinate ascent: all pairwise blocks in ascending (i, j) order,
// then the HOP block, until the bound gain over a full sweep drops below
// tol_bound or max_sweeps is reached.
inline solve_result solve(const energy_model& m, const edge_set& s, const solve_config& cfg = {},
                          dual_state warm_start = {}, dp_stats* stats = nullptr)
{
  const solver_index idx(m, s);
  solve_result res;
  res.state = warm_start.lambda.empty() ? zero_state(m, s) : std::move(warm_start);
  assert(res.state.lambda.size() == m.edges.size());
  assert(res.state.delta_edge.size() == s.members.size());
  assert(res.state.delta_node.size() == s.singletons.size());

  double bound = dual_bound(m, s, res.state, idx, stats);
  res.bound_trace.push_back(bound);
  int stalled = 0;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    for (int e : idx.sweep_order) update_pairwise_block(m, s, res.state, idx, e);
    update_hop_block(m, s, res.state, idx, stats);
    const double next = dual_bound(m, s, res.state, idx, stats);
    res.bound_trace.push_back(next);
    ++res.sweeps;
    stalled = (next - bound < cfg.tol_bound) ? stalled + 1 : 0;
    bound = next;
    if (stalled >= cfg.stall_sweeps) {
      res.converged = true;
      break;
    }
  }
  res.bound = bound;

  const reparameterization repam{m, s, res.state, idx};
  res.hop_argmins = hop_min(m.hop, s, repam.hop_augment_tables(), cfg.argmin_cap, stats).argmins;
  res.decoded = decode(m, s, res.state, idx, &res.hop_argmins);
  res.decoded_energy = evaluate_energy(m, res.decoded);
  res.gap = res.decoded_energy - res.bound;
  res.certificate = res.gap <= cfg.cert_tol;
  return res;
}

// Rewrites a converged state for S onto a larger set T without changing any
// reparameterized table: new delta_ij start at zero; the delta_i of a vertex
// that stops being a singleton is folded into one incident new edge (into its
// lambda and its delta together, which cancels everywhere except the HOP term
// bookkeeping). The dual bound is preserved exactly.
inline dual_state migrate_state(const energy_model& m, const edge_set& s_old, const edge_set& s_new,
                                const dual_state& old)
{
  dual_state st;
  st.lambda = old.lambda;
  st.delta_edge.assign(s_new.members.size(), {0.0, 0.0, 0.0, 0.0});
  st.delta_node.assign(s_new.singletons.size(), {0.0, 0.0});

  std::vector<int> old_member_pos(m.edges.size(), -1);
  for (std::size_t k = 0; k < s_old.members.size(); ++k) old_member_pos[s_old.members[k]] = (int)k;
  for (std::size_t k = 0; k < s_new.members.size(); ++k)
    if (const int p = old_member_pos[s_new.members[k]]; p >= 0) st.delta_edge[k] = old.delta_edge[p];

  std::vector<int> new_single_pos(m.n, -1);
  for (std::size_t t = 0; t < s_new.singletons.size(); ++t) new_single_pos[s_new.singletons[t]] = (int)t;

  for (std::size_t t = 0; t < s_old.singletons.size(); ++t) {
    const int v = s_old.singletons[t];
    if (const int p = new_single_pos[v]; p >= 0) {
      st.delta_node[p] = old.delta_node[t];
      continue;
    }
    // v is now covered: fold its delta into the first new incident member.
    int fold_pos = -1;
    for (std::size_t k = 0; k < s_new.members.size() && fold_pos < 0; ++k) {
      const int e = s_new.members[k];
      if (old_member_pos[e] >= 0) continue;
      if (m.edges[e].i == v || m.edges[e].j == v) fold_pos = (int)k;
    }
    assert(fold_pos >= 0 && "covering edge for a former singleton must be new");
    const int e = s_new.members[fold_pos];
    const bool at_i = m.edges[e].i == v;
    auto& msg = at_i ? st.lambda[e].to_i : st.lambda[e].to_j;
    for (int xv = 0; xv < 2; ++xv) {
      msg[xv] += old.delta_node[t][xv];
      for (int xo = 0; xo < 2; ++xo) {
        const int key = at_i ? xv * 2 + xo : xo * 2 + xv;
        st.delta_edge[fold_pos][key] += old.delta_node[t][xv];
      }
    }
  }
  return st;
}

} // namespace hoplp

#endif
