#ifndef HOPLP_GENERATORS_HPP
#define HOPLP_GENERATORS_HPP

#include <random>

#include "brute_force.hpp"
#include "model.hpp"

// Seeded model families used by the experiments. All generators are
// deterministic in their arguments; the same seed reproduces the same model
// bit for bit.

namespace hoplp {

namespace detail {

inline edge_potential attractive_edge(int i, int j, double cost)
{
  return {i, j, {0.0, cost, cost, 0.0}};
}

} // namespace detail

// Chain with attractive couplings, a small bias towards zero on every node
// and an exclusion of the all-zeros assignment; the optimum is then the
// runner-up of the unconstrained model.
inline energy_model gen_chain_exclusion(int n, double c, double eps)
{
  if (n < 2 || n % 2 != 0) throw input_error("gen_chain_exclusion: n must be even and >= 2");
  if (c <= 0 || eps <= 0) throw input_error("gen_chain_exclusion: c and eps must be positive");
  energy_model m;
  m.n = n;
  m.unary.assign(n, {0.0, eps});
  for (int i = 0; i + 1 < n; ++i) m.edges.push_back(detail::attractive_edge(i, i + 1, c));
  m.hop = exclusion_hop(assignment(n, 0), 1, n);
  validate_model(m);
  return m;
}

// Chain with attractive couplings and the balanced-partition reward
// f(m) = -lambda * m * (n - m).
inline energy_model gen_avgcut_chain(int n, double c, double lambda)
{
  if (n < 2 || n % 2 != 0) throw input_error("gen_avgcut_chain: n must be even and >= 2");
  if (c <= 0 || lambda <= 0) throw input_error("gen_avgcut_chain: c and lambda must be positive");
  energy_model m;
  m.n = n;
  m.unary.assign(n, {0.0, 0.0});
  for (int i = 0; i + 1 < n; ++i) m.edges.push_back(detail::attractive_edge(i, i + 1, c));
  cardinality_hop hop;
  hop.f.resize(n + 1);
  for (int k = 0; k <= n; ++k) hop.f[k] = -lambda * k * (n - k);
  m.hop = std::move(hop);
  validate_model(m);
  return m;
}

// Uniformly random labeled tree from a seeded random Pruefer sequence.
inline std::vector<vertex_pair> random_tree_edges(int n, std::mt19937_64& rng)
{
  std::vector<vertex_pair> edges;
  if (n == 1) return edges;
  if (n == 2) {
    edges.emplace_back(0, 1);
    return edges;
  }
  std::vector<int> pruefer(n - 2);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (auto& p : pruefer) p = pick(rng);
  std::vector<int> degree(n, 1);
  for (int p : pruefer) ++degree[p];
  std::set<int> leaves;
  for (int v = 0; v < n; ++v)
    if (degree[v] == 1) leaves.insert(v);
  for (int p : pruefer) {
    const int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    edges.emplace_back(std::min(leaf, p), std::max(leaf, p));
    if (--degree[p] == 1) leaves.insert(p);
  }
  const int a = *leaves.begin(), b = *std::next(leaves.begin());
  edges.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Random tree with attractive couplings of strength lambda_attract, random
// preference for zero on every node and a Hamming-ball exclusion of radius k
// around the all-zeros assignment.
inline energy_model gen_hamming_tree(int n, double lambda_attract, int k, std::uint64_t seed)
{
  if (n < 2) throw input_error("gen_hamming_tree: n must be >= 2");
  if (k < 1 || k > n) throw input_error("gen_hamming_tree: k must be in [1, n]");
  std::mt19937_64 rng(seed);
  energy_model m;
  m.n = n;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& [i, j] : random_tree_edges(n, rng))
    m.edges.push_back(detail::attractive_edge(i, j, lambda_attract));
  m.unary.assign(n, {0.0, 0.0});
  for (int i = 0; i < n; ++i) m.unary[i] = {0.0, unit(rng)};
  m.hop = exclusion_hop(assignment(n, 0), k, n);
  validate_model(m);
  return m;
}

// 4-connected grid with random attractive costs, theta_0(0) forbidden to
// break the all-equal symmetry, and the balanced-partition reward. When
// lambda is omitted it is tuned by bisection so the exact optimum is zero.
inline energy_model gen_avgcut_grid(int rows, int cols, std::uint64_t seed, double lambda)
{
  if (rows < 1 || cols < 1 || rows * cols < 2) throw input_error("gen_avgcut_grid: grid too small");
  if (lambda <= 0) throw input_error("gen_avgcut_grid: lambda must be positive");
  const int n = rows * cols;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  energy_model m;
  m.n = n;
  m.unary.assign(n, {0.0, 0.0});
  m.unary[0] = {infinity_sentinel, 0.0};
  const auto at = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      // U(0, 1]: reject exact zeros
      if (c + 1 < cols) {
        double w = 1.0 - unit(rng);
        m.edges.push_back(detail::attractive_edge(at(r, c), at(r, c + 1), w));
      }
      if (r + 1 < rows) {
        double w = 1.0 - unit(rng);
        m.edges.push_back(detail::attractive_edge(at(r, c), at(r + 1, c), w));
      }
    }
  std::sort(m.edges.begin(), m.edges.end(),
            [](const edge_potential& a, const edge_potential& b) {
              return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
            });
  cardinality_hop hop;
  hop.f.resize(n + 1);
  for (int k = 0; k <= n; ++k) hop.f[k] = -lambda * k * (n - k);
  m.hop = std::move(hop);
  validate_model(m);
  return m;
}

// Auto-tuned variant: bisects lambda until the exact optimum is zero within
// 1e-9 and sits at the boundary where a balanced cut starts to pay off.
// Requires the exhaustive oracle, hence the size guard.
inline std::pair<energy_model, double> gen_avgcut_grid_autotune(int rows, int cols, std::uint64_t seed)
{
  if (rows * cols > brute_force_map_max_vars)
    throw input_error("gen_avgcut_grid: auto-tuning needs rows*cols <= 25; supply lambda explicitly");
  const int n = rows * cols;

  // Per-count best cut cost over feasible assignments (x_0 = 1), computed
  // once; the optimum for any lambda is then a scan over counts.
  const energy_model probe = gen_avgcut_grid(rows, cols, seed, 1.0);
  std::vector<double> best_cut(n + 1, infinity_sentinel);
  assignment x(n, 0);
  const std::size_t total = std::size_t(1) << n;
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (int i = 0; i < n; ++i) x[i] = (idx >> (n - 1 - i)) & 1;
    if (x[0] == 0) continue;
    double cut = 0.0;
    int ones = 0;
    for (const auto& e : probe.edges) cut += e.theta[x[e.i] * 2 + x[e.j]];
    for (int i = 0; i < n; ++i) ones += x[i];
    best_cut[ones] = std::min(best_cut[ones], cut);
  }
  const auto optimum = [&](double lambda) {
    double best = 0.0;  // the all-ones assignment always scores zero
    for (int k = 1; k < n; ++k)
      if (!is_forbidden(best_cut[k])) best = std::min(best, best_cut[k] - lambda * k * (n - k));
    return best;
  };

  double lo = 1e-12, hi = 1.0;
  while (optimum(hi) > -1e-9) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (optimum(mid) > -1e-9 ? lo : hi) = mid;
  }
  return {gen_avgcut_grid(rows, cols, seed, lo), lo};
}

} // namespace hoplp

#endif
