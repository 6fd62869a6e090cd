#ifndef HOPLP_HOP_INFERENCE_HPP
#define HOPLP_HOP_INFERENCE_HPP

#include <set>

#include "brute_force.hpp"
#include "cardinality.hpp"

// min, argmin set and block min-marginals of the augmented HOP term
//   H(x) = theta_alpha(x) + sum_{e in S} A_e(x_i,x_j) + sum_v A_v(x_v)
// for the three HOP families. Cardinality HOPs run the count-augmented
// junction sweep, pattern HOPs solve one junction problem per pattern, table
// HOPs are enumerated (oracle path).

namespace hoplp {

inline constexpr int default_argmin_cap = 100;
inline constexpr double argmin_tie_tol = 1e-9;

struct argmin_set {
  std::vector<assignment> assignments;  // distinct, sorted lexicographically
  bool truncated = false;
  int cap = default_argmin_cap;
};

struct hop_min_result {
  double value = 0.0;
  argmin_set argmins;
};

namespace detail {

struct pattern_problems {
  junction_forest forest;  // S forest extended by singleton cliques
  junction_potentials base;

  pattern_problems(const edge_set& s, const hop_augment& aug)
      : forest(with_singleton_cliques(s.forest, s.singletons))
  {
    base.clique_tables.resize(forest.cliques.size());
    for (std::size_t e = 0; e < s.pairs.size(); ++e) {
      const int c = forest.edge_clique[e];
      const auto& vars = forest.cliques[c].vars;
      auto& table = base.clique_tables[c];
      if (table.empty()) table.assign(std::size_t(1) << vars.size(), 0.0);
      const auto bit = [&](int v) {
        return (int)(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
      };
      const int bi = bit(s.pairs[e].first), bj = bit(s.pairs[e].second);
      for (std::size_t mask = 0; mask < table.size(); ++mask)
        table[mask] = sat_add(table[mask], aug.edge_tables[e][((mask >> bi) & 1) * 2 + ((mask >> bj) & 1)]);
    }
    base.unary.assign(aug.node_tables.begin(), aug.node_tables.end());
  }

  junction_potentials for_pattern(const std::vector<double>& w) const
  {
    junction_potentials pot = base;
    for (std::size_t v = 0; v < w.size(); ++v) pot.unary[v][1] = sat_add(pot.unary[v][1], w[v]);
    return pot;
  }
};

// Collects distinct assignments until one past the cap, for truncation
// detection; final content is the sorted prefix.
struct argmin_collector {
  std::set<assignment> seen;
  int cap;

  explicit argmin_collector(int cap) : cap(cap) {}

  bool offer(const assignment& x)
  {
    seen.insert(x);
    return (int)seen.size() <= cap;
  }

  argmin_set take()
  {
    argmin_set out;
    out.cap = cap;
    out.truncated = (int)seen.size() > cap;
    for (const auto& x : seen) {
      if ((int)out.assignments.size() == cap) break;
      out.assignments.push_back(x);
    }
    return out;
  }
};

} // namespace detail

// Minimum of the augmented HOP term. Throws infeasible_error when every
// assignment is forbidden.
inline double hop_min_value(const hop_potential& hop, const edge_set& s, const hop_augment& aug,
                            dp_stats* stats = nullptr)
{
  double value = infinity_sentinel;
  if (const auto* c = std::get_if<cardinality_hop>(&hop)) {
    value = cardinality_engine(*c, s, aug, stats).min_value();
  } else if (const auto* p = std::get_if<pattern_hop>(&hop)) {
    detail::pattern_problems problems(s, aug);
    for (const auto& w : p->patterns) {
      const junction_potentials pot = problems.for_pattern(w);
      value = std::min(value, junction_sweep(problems.forest, pot).min_value());
    }
  } else {
    const auto& t = std::get<table_hop>(hop);
    const int n = (int)aug.node_tables.size();
    assignment x(n, 0);
    for (std::size_t idx = 0; idx < t.values.size(); ++idx) {
      for (int i = 0; i < n; ++i) x[i] = (idx >> (n - 1 - i)) & 1;
      value = std::min(value, augmented_hop_value(hop, s, aug, x));
    }
  }
  if (is_forbidden(value)) throw infeasible_error("hop_min: every assignment is forbidden");
  return value;
}

// Minimum plus the set of minimizers (within argmin_tie_tol, capped).
inline hop_min_result hop_min(const hop_potential& hop, const edge_set& s, const hop_augment& aug,
                              int cap = default_argmin_cap, dp_stats* stats = nullptr)
{
  hop_min_result res;
  detail::argmin_collector collector(cap);
  if (const auto* c = std::get_if<cardinality_hop>(&hop)) {
    cardinality_engine engine(*c, s, aug, stats);
    res.value = engine.min_value();
    if (is_forbidden(res.value)) throw infeasible_error("hop_min: every assignment is forbidden");
    engine.enumerate_argmins(argmin_tie_tol, [&](const assignment& x) { return collector.offer(x); });
  } else if (const auto* p = std::get_if<pattern_hop>(&hop)) {
    detail::pattern_problems problems(s, aug);
    std::vector<double> per_pattern;
    res.value = infinity_sentinel;
    for (const auto& w : p->patterns) {
      const junction_potentials pot = problems.for_pattern(w);
      per_pattern.push_back(junction_sweep(problems.forest, pot).min_value());
      res.value = std::min(res.value, per_pattern.back());
    }
    if (is_forbidden(res.value)) throw infeasible_error("hop_min: every assignment is forbidden");
    for (std::size_t k = 0; k < p->patterns.size() && (int)collector.seen.size() <= cap; ++k) {
      if (per_pattern[k] > res.value + argmin_tie_tol) continue;
      const junction_potentials pot = problems.for_pattern(p->patterns[k]);
      junction_sweep sweep(problems.forest, pot);
      sweep.enumerate_within(res.value + argmin_tie_tol,
                             [&](const assignment& x) { return collector.offer(x); });
    }
  } else {
    auto [value, mins] = brute_force_hop_argmins(hop, s, aug, argmin_tie_tol);
    res.value = value;
    if (is_forbidden(res.value)) throw infeasible_error("hop_min: every assignment is forbidden");
    for (const auto& x : mins)
      if (!collector.offer(x)) break;
  }
  res.argmins = collector.take();
  return res;
}

// Block min-marginals over the S edges and singletons. Entries may sit in the
// forbidden region; only a fully forbidden term raises infeasible_error.
inline hop_block_marginals hop_min_marginals(const hop_potential& hop, const edge_set& s,
                                             const hop_augment& aug, dp_stats* stats = nullptr)
{
  hop_block_marginals out;
  if (const auto* c = std::get_if<cardinality_hop>(&hop)) {
    cardinality_engine engine(*c, s, aug, stats);
    if (is_forbidden(engine.min_value()))
      throw infeasible_error("hop_min_marginals: every assignment is forbidden");
    out = engine.min_marginals();
  } else if (const auto* p = std::get_if<pattern_hop>(&hop)) {
    detail::pattern_problems problems(s, aug);
    out.edges.assign(s.pairs.size(), {infinity_sentinel, infinity_sentinel, infinity_sentinel, infinity_sentinel});
    out.nodes.assign(s.singletons.size(), {infinity_sentinel, infinity_sentinel});
    double best = infinity_sentinel;
    for (const auto& w : p->patterns) {
      const junction_potentials pot = problems.for_pattern(w);
      junction_sweep sweep(problems.forest, pot);
      sweep.beliefs();
      best = std::min(best, sweep.min_value());
      for (std::size_t e = 0; e < s.pairs.size(); ++e) {
        const auto table = sweep.edge_min_marginal((int)e);
        for (int key = 0; key < 4; ++key) out.edges[e][key] = std::min(out.edges[e][key], table[key]);
      }
      for (std::size_t t = 0; t < s.singletons.size(); ++t) {
        const auto table = sweep.vertex_min_marginal(s.singletons[t]);
        for (int key = 0; key < 2; ++key) out.nodes[t][key] = std::min(out.nodes[t][key], table[key]);
      }
    }
    if (is_forbidden(best)) throw infeasible_error("hop_min_marginals: every assignment is forbidden");
  } else {
    out.edges.resize(s.pairs.size());
    out.nodes.resize(s.singletons.size());
    double best = infinity_sentinel;
    for (std::size_t e = 0; e < s.pairs.size(); ++e) {
      const auto table = brute_force_hop_min_marginals(hop, s, aug, hop_block::edge((int)e));
      std::copy(table.begin(), table.end(), out.edges[e].begin());
      for (double v : table) best = std::min(best, v);
    }
    for (std::size_t t = 0; t < s.singletons.size(); ++t) {
      const auto table = brute_force_hop_min_marginals(hop, s, aug, hop_block::node(s.singletons[t]));
      std::copy(table.begin(), table.end(), out.nodes[t].begin());
      for (double v : table) best = std::min(best, v);
    }
    if (s.pairs.empty() && s.singletons.empty()) best = 0.0;
    if (is_forbidden(best)) throw infeasible_error("hop_min_marginals: every assignment is forbidden");
  }
  return out;
}

} // namespace hoplp

#endif
