#ifndef HOPLP_MODEL_HPP
#define HOPLP_MODEL_HPP

#include <array>
#include <cstdint>
#include <numeric>
#include <variant>
#include <vector>

#include "ext_real.hpp"

// Energy models over binary variables: unary tables, pairwise edge tables and
// exactly one high-order potential (HOP) coupling all variables.

namespace hoplp {

// One binary label per variable, 0/1.
using assignment = std::vector<std::uint8_t>;

inline bool assignment_lex_less(const assignment& a, const assignment& b)
{
  assert(a.size() == b.size());
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// theta_alpha(x) = f(sum_i (x_i XOR flip_mask_i)). `f` has n+1 entries and at
// least one finite one; an empty flip mask means no flips.
struct cardinality_hop {
  std::vector<double> f;
  std::vector<std::uint8_t> flip_mask;
};

// theta_alpha(x) = min_k sum_i w_i^(k) x_i, the lower envelope of K linear
// functions. All weights finite.
struct pattern_hop {
  std::vector<std::vector<double>> patterns;
};

// Explicit table over all 2^n assignments, indexed with x_0 as the most
// significant bit. Enumeration oracle only; n <= 20.
struct table_hop {
  std::vector<double> values;
};

using hop_potential = std::variant<cardinality_hop, pattern_hop, table_hop>;

struct edge_potential {
  int i = 0, j = 0;               // 0 <= i < j < n
  std::array<double, 4> theta{};  // theta[x_i*2 + x_j]
};

struct energy_model {
  int n = 0;
  std::vector<std::array<double, 2>> unary;
  std::vector<edge_potential> edges;
  hop_potential hop = cardinality_hop{{0.0, 0.0}, {}};
};

inline constexpr std::size_t table_hop_max_vars = 20;

namespace detail {

inline void check_energy_value(double v, const char* where)
{
  if (v != v) throw input_error(std::string(where) + ": NaN energy");
  if (v <= -forbidden_threshold) throw input_error(std::string(where) + ": negative infinity is not representable");
  if (is_forbidden(v) && v != infinity_sentinel)
    throw input_error(std::string(where) + ": finite energies must stay below 1e14");
}

} // namespace detail

inline void validate_hop(const hop_potential& hop, int n)
{
  if (const auto* c = std::get_if<cardinality_hop>(&hop)) {
    if ((int)c->f.size() != n + 1)
      throw input_error("cardinality hop: f must have n+1 entries");
    bool any_finite = false;
    for (double v : c->f) {
      detail::check_energy_value(v, "cardinality hop f");
      any_finite |= !is_forbidden(v);
    }
    if (!any_finite) throw input_error("cardinality hop: f has no finite entry");
    if (!c->flip_mask.empty()) {
      if ((int)c->flip_mask.size() != n) throw input_error("cardinality hop: flip_mask must have n bits");
      for (auto b : c->flip_mask)
        if (b > 1) throw input_error("cardinality hop: flip_mask entries must be 0/1");
    }
  } else if (const auto* p = std::get_if<pattern_hop>(&hop)) {
    if (p->patterns.empty()) throw input_error("pattern hop: need at least one pattern");
    for (const auto& w : p->patterns) {
      if ((int)w.size() != n) throw input_error("pattern hop: each pattern needs n weights");
      for (double v : w)
        if (v != v || is_forbidden(v) || v <= -forbidden_threshold)
          throw input_error("pattern hop: weights must be finite");
    }
  } else {
    const auto& t = std::get<table_hop>(hop);
    if (n > (int)table_hop_max_vars) throw input_error("table hop: limited to n <= 20");
    if (t.values.size() != (std::size_t(1) << n)) throw input_error("table hop: values must have 2^n entries");
    for (double v : t.values) detail::check_energy_value(v, "table hop values");
  }
}

inline void validate_model(const energy_model& m)
{
  if (m.n <= 0) throw input_error("model: n must be positive");
  if ((int)m.unary.size() != m.n) throw input_error("model: need one unary table per variable");
  for (const auto& u : m.unary)
    for (double v : u) detail::check_energy_value(v, "unary");
  std::vector<std::uint64_t> seen;
  seen.reserve(m.edges.size());
  for (const auto& e : m.edges) {
    if (e.i < 0 || e.j >= m.n) throw input_error("edge: endpoint index out of range");
    if (e.i >= e.j) throw input_error("edge: requires i < j");
    seen.push_back((std::uint64_t(e.i) << 32) | std::uint64_t(e.j));
    for (double v : e.theta) detail::check_energy_value(v, "edge theta");
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw input_error("edge: duplicate edge");
  validate_hop(m.hop, m.n);
}

inline void validate_assignment(const energy_model& m, const assignment& x)
{
  if ((int)x.size() != m.n) throw input_error("assignment: length mismatch");
  for (auto b : x)
    if (b > 1) throw input_error("assignment: labels must be 0/1");
}

// Index of x in a full 2^n table, x_0 most significant.
inline std::size_t assignment_index(const assignment& x)
{
  std::size_t idx = 0;
  for (auto b : x) idx = (idx << 1) | b;
  return idx;
}

inline assignment assignment_from_index(std::size_t idx, int n)
{
  assignment x(n);
  for (int i = n - 1; i >= 0; --i, idx >>= 1) x[i] = idx & 1;
  return x;
}

inline double hop_value(const hop_potential& hop, const assignment& x)
{
  if (const auto* c = std::get_if<cardinality_hop>(&hop)) {
    int count = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      count += c->flip_mask.empty() ? x[i] : (x[i] ^ c->flip_mask[i]);
    return c->f[count];
  }
  if (const auto* p = std::get_if<pattern_hop>(&hop)) {
    double best = infinity_sentinel;
    for (const auto& w : p->patterns) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) s += w[i];
      best = std::min(best, s);
    }
    return best;
  }
  return std::get<table_hop>(hop).values[assignment_index(x)];
}

inline double evaluate_energy(const energy_model& m, const assignment& x)
{
  validate_assignment(m, x);
  double e = 0.0;
  for (int i = 0; i < m.n; ++i) e = sat_add(e, m.unary[i][x[i]]);
  for (const auto& ep : m.edges) e = sat_add(e, ep.theta[x[ep.i] * 2 + x[ep.j]]);
  return sat_add(e, hop_value(m.hop, x));
}

// Cardinality HOP forbidding everything within Hamming distance < radius of
// x_star: f(c) = inf for c < radius, 0 otherwise, with flip_mask = x_star.
inline cardinality_hop exclusion_hop(const assignment& x_star, int radius, int n)
{
  if ((int)x_star.size() != n) throw input_error("exclusion hop: center has wrong length");
  if (radius < 1 || radius > n) throw input_error("exclusion hop: radius must be in [1, n]");
  cardinality_hop hop;
  hop.f.assign(n + 1, 0.0);
  for (int c = 0; c < radius; ++c) hop.f[c] = infinity_sentinel;
  hop.flip_mask.assign(x_star.begin(), x_star.end());
  return hop;
}

} // namespace hoplp

#endif
