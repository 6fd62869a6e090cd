#ifndef HOPLP_TEST_UTIL_HPP
#define HOPLP_TEST_UTIL_HPP

#include <random>

#include "hoplp/hoplp.hpp"

// Seeded random instance builders shared across the suites.

namespace hoplp::testing {

inline std::uniform_real_distribution<double> unit_interval(-1.0, 1.0);

inline cardinality_hop random_cardinality(std::mt19937_64& rng, int n, bool with_flip = true)
{
  cardinality_hop h;
  h.f.resize(n + 1);
  for (auto& v : h.f) v = unit_interval(rng);
  if (with_flip) {
    h.flip_mask.resize(n);
    for (auto& b : h.flip_mask) b = (std::uint8_t)std::uniform_int_distribution<int>(0, 1)(rng);
  }
  return h;
}

inline pattern_hop random_pattern(std::mt19937_64& rng, int n)
{
  pattern_hop p;
  const int patterns = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int k = 0; k < patterns; ++k) {
    std::vector<double> w(n);
    for (auto& v : w) v = unit_interval(rng);
    p.patterns.push_back(std::move(w));
  }
  return p;
}

// Random connected model: a random tree plus a few extra edges, random unary
// and pairwise tables, and a random HOP of the requested kind.
inline energy_model random_model(std::mt19937_64& rng, int n, const char* hop_kind = "cardinality",
                                 int extra_edges = -1)
{
  energy_model m;
  m.n = n;
  m.unary.resize(n);
  for (auto& t : m.unary) t = {unit_interval(rng), unit_interval(rng)};
  for (auto [i, j] : random_tree_edges(n, rng))
    m.edges.push_back({i, j, {unit_interval(rng), unit_interval(rng), unit_interval(rng), unit_interval(rng)}});
  if (extra_edges < 0) extra_edges = std::uniform_int_distribution<int>(0, n)(rng);
  for (int a = 0; a < extra_edges && n > 2; ++a) {
    const int i = std::uniform_int_distribution<int>(0, n - 2)(rng);
    const int j = std::uniform_int_distribution<int>(i + 1, n - 1)(rng);
    bool dup = false;
    for (const auto& e : m.edges) dup |= (e.i == i && e.j == j);
    if (!dup)
      m.edges.push_back({i, j, {unit_interval(rng), unit_interval(rng), unit_interval(rng), unit_interval(rng)}});
  }
  const std::string kind = hop_kind;
  if (kind == "cardinality")
    m.hop = random_cardinality(rng, n);
  else if (kind == "pattern")
    m.hop = random_pattern(rng, n);
  else if (kind == "zero")
    m.hop = cardinality_hop{std::vector<double>(n + 1, 0.0), {}};
  else
    throw std::logic_error("unknown hop kind in test helper");
  validate_model(m);
  return m;
}

// Random S with an induced-width cap, by rejection.
inline edge_set random_edge_subset(std::mt19937_64& rng, const energy_model& m, int tw_cap)
{
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<int> sub;
    for (std::size_t e = 0; e < m.edges.size(); ++e)
      if (std::uniform_int_distribution<int>(0, 2)(rng) != 0) sub.push_back((int)e);
    edge_set s = build_edge_set(m, sub);
    if (s.tw_bound <= tw_cap) return s;
  }
  return empty_edge_set(m);
}

inline hop_augment random_augment(std::mt19937_64& rng, int n, std::size_t edge_count)
{
  hop_augment aug = hop_augment::zeros(n, edge_count);
  for (auto& t : aug.edge_tables)
    for (auto& v : t) v = unit_interval(rng);
  for (auto& t : aug.node_tables)
    for (auto& v : t) v = unit_interval(rng);
  return aug;
}

inline dual_state random_state(std::mt19937_64& rng, const energy_model& m, const edge_set& s)
{
  dual_state st = zero_state(m, s);
  for (auto& l : st.lambda) {
    for (auto& v : l.to_i) v = unit_interval(rng);
    for (auto& v : l.to_j) v = unit_interval(rng);
  }
  for (auto& t : st.delta_edge)
    for (auto& v : t) v = unit_interval(rng);
  for (auto& t : st.delta_node)
    for (auto& v : t) v = unit_interval(rng);
  return st;
}

inline assignment random_assignment(std::mt19937_64& rng, int n)
{
  assignment x(n);
  for (auto& b : x) b = (std::uint8_t)std::uniform_int_distribution<int>(0, 1)(rng);
  return x;
}

} // namespace hoplp::testing

#endif
