#ifndef HOPLP_BRUTE_FORCE_HPP
#define HOPLP_BRUTE_FORCE_HPP

#include "edge_set.hpp"
#include "model.hpp"

// Enumeration oracles. Deliberately independent of the message-passing code
// paths: everything here evaluates energies assignment by assignment.

namespace hoplp {

inline constexpr int brute_force_map_max_vars = 25;
inline constexpr int brute_force_marginal_max_vars = 20;

struct map_result {
  assignment argmin;
  double energy = 0.0;
};

// Exhaustive MAP. Ties broken towards the lexicographically smallest
// assignment (x_0 most significant, 0 preferred).
inline map_result brute_force_map(const energy_model& m)
{
  if (m.n > brute_force_map_max_vars)
    throw input_error("brute_force_map: refusing n > 25 variables");
  map_result best;
  best.energy = infinity_sentinel;
  assignment x(m.n, 0);
  const std::size_t total = std::size_t(1) << m.n;
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (int i = 0; i < m.n; ++i) x[i] = (idx >> (m.n - 1 - i)) & 1;
    const double e = evaluate_energy(m, x);
    if (e < best.energy) {
      best.energy = e;
      best.argmin = x;
    }
  }
  return best;
}

struct hop_block {
  // Either an edge of S (edge_index >= 0, an index into edge_set::members
  // alignment) or a singleton variable (edge_index == -1).
  int edge_index = -1;
  int variable = -1;

  static hop_block edge(int index) { return {index, -1}; }
  static hop_block node(int variable) { return {-1, variable}; }
};

// Min-marginal of the augmented HOP term over one block, by enumerating all
// 2^n assignments. Blocks must be an S edge or a singleton of S.
inline std::vector<double> brute_force_hop_min_marginals(const hop_potential& hop, const edge_set& s,
                                                         const hop_augment& aug, const hop_block& block)
{
  const int n = (int)aug.node_tables.size();
  if (n > brute_force_marginal_max_vars)
    throw input_error("brute_force_hop_min_marginals: refusing n > 20 variables");
  int bi = -1, bj = -1;
  std::vector<double> out;
  if (block.edge_index >= 0) {
    if (block.edge_index >= (int)s.pairs.size())
      throw input_error("brute_force_hop_min_marginals: block edge is not in S");
    bi = s.pairs[block.edge_index].first;
    bj = s.pairs[block.edge_index].second;
    out.assign(4, infinity_sentinel);
  } else {
    if (!std::binary_search(s.singletons.begin(), s.singletons.end(), block.variable))
      throw input_error("brute_force_hop_min_marginals: block variable is not a singleton of S");
    bi = block.variable;
    out.assign(2, infinity_sentinel);
  }

  assignment x(n, 0);
  const std::size_t total = std::size_t(1) << n;
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (int i = 0; i < n; ++i) x[i] = (idx >> (n - 1 - i)) & 1;
    const double v = augmented_hop_value(hop, s, aug, x);
    const std::size_t key = (bj >= 0) ? (std::size_t)(x[bi] * 2 + x[bj]) : (std::size_t)x[bi];
    out[key] = std::min(out[key], v);
  }
  return out;
}

// All minimizers of the augmented HOP term within `tie_tol` of the minimum,
// sorted lexicographically. Enumeration oracle for the argmin machinery.
inline std::pair<double, std::vector<assignment>> brute_force_hop_argmins(const hop_potential& hop,
                                                                          const edge_set& s,
                                                                          const hop_augment& aug,
                                                                          double tie_tol = 1e-9)
{
  const int n = (int)aug.node_tables.size();
  if (n > brute_force_marginal_max_vars)
    throw input_error("brute_force_hop_argmins: refusing n > 20 variables");
  double best = infinity_sentinel;
  assignment x(n, 0);
  const std::size_t total = std::size_t(1) << n;
  std::vector<double> values(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (int i = 0; i < n; ++i) x[i] = (idx >> (n - 1 - i)) & 1;
    values[idx] = augmented_hop_value(hop, s, aug, x);
    best = std::min(best, values[idx]);
  }
  std::vector<assignment> mins;
  for (std::size_t idx = 0; idx < total; ++idx)
    if (values[idx] <= best + tie_tol) mins.push_back(assignment_from_index(idx, n));
  return {best, std::move(mins)};
}

} // namespace hoplp

#endif
