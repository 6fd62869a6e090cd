#ifndef HOPLP_CARDINALITY_HPP
#define HOPLP_CARDINALITY_HPP

#include <functional>

#include "edge_set.hpp"

// Count-augmented min-sum over the S-structure for cardinality HOPs.
//
// For H(x) = f(sum_v x_v xor flip_v) + sum_{e in S} A_e(x_i,x_j) + sum_v A_v(x_v)
// every connected component of the S-forest (and every singleton) is swept
// bottom-up with an extra per-state coordinate counting flipped ones. The
// per-component count profiles are then combined by min-plus convolution and
// matched against f. Cost is O(n^2 * 2^(tw+1)) profile cells per full pass.

namespace hoplp {

// g[c] = minimum, over component assignments with exactly c flipped ones, of
// the component's additive terms.
using cardinality_profile = std::vector<double>;

struct dp_stats {
  std::size_t cells = 0;
};

inline cardinality_profile minplus_convolve(const cardinality_profile& a, const cardinality_profile& b,
                                            dp_stats* stats = nullptr)
{
  assert(!a.empty() && !b.empty());
  cardinality_profile h(a.size() + b.size() - 1, infinity_sentinel);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t l = 0; l < b.size(); ++l)
      h[k + l] = std::min(h[k + l], sat_add(a[k], b[l]));
  if (stats) stats->cells += a.size() * b.size();
  return h;
}

// Min-marginal tables of the augmented HOP term, aligned with the edge set.
struct hop_block_marginals {
  std::vector<std::array<double, 4>> edges;  // one per S edge
  std::vector<std::array<double, 2>> nodes;  // one per singleton
};

class cardinality_engine {
public:
  cardinality_engine(const cardinality_hop& hop, const edge_set& s, const hop_augment& aug,
                     dp_stats* stats = nullptr)
      : hop_(hop), s_(s), aug_(aug), stats_(stats), n_((int)aug.node_tables.size())
  {
    assert(n_ == s_.forest.n || s_.forest.cliques.empty());
    assert((int)hop_.f.size() == n_ + 1);
    build_psi();
    build_components();
    run_up();
    for (auto& comp : components_) comp.g = compute_profile(comp);
    total_ = components_.empty() ? cardinality_profile{0.0} : components_.front().g;
    for (std::size_t r = 1; r < components_.size(); ++r)
      total_ = minplus_convolve(total_, components_[r].g, stats_);
    assert((int)total_.size() == n_ + 1);
  }

  // min_x H(x); forbidden-region results are reported as-is (callers decide
  // whether that constitutes infeasibility).
  double min_value() const
  {
    double best = infinity_sentinel;
    for (int m = 0; m <= n_; ++m) best = std::min(best, sat_add(hop_.f[m], total_[m]));
    return best;
  }

  std::size_t component_count() const { return components_.size(); }
  int component_smallest_vertex(std::size_t r) const { return components_[r].smallest; }

  // Block min-marginals: mu_c(x_c) = min over assignments consistent with x_c.
  // The downward pass carries cost-to-go profiles indexed by the receiving
  // subtree's count, with f and the other components' profiles folded in at
  // the root, keeping every message as short as the subtree below it.
  hop_block_marginals min_marginals()
  {
    build_cross_component_tables();
    run_down_folded();
    hop_block_marginals out;
    out.edges.assign(s_.pairs.size(), {infinity_sentinel, infinity_sentinel, infinity_sentinel, infinity_sentinel});
    out.nodes.assign(s_.singletons.size(), {infinity_sentinel, infinity_sentinel});

    for (std::size_t e = 0; e < s_.pairs.size(); ++e) {
      const int c = s_.forest.edge_clique[e];
      const auto& cl = s_.forest.cliques[c];
      const auto [i, j] = s_.pairs[e];
      const int bi = bit_of(cl.vars, i), bj = bit_of(cl.vars, j);
      for (std::size_t mask = 0; mask < psi_[c].size(); ++mask) {
        const std::size_t key = ((mask >> bi) & 1) * 2 + ((mask >> bj) & 1);
        cardinality_profile below{0.0};
        for (std::size_t t = 0; t < cl.children.size(); ++t)
          below = minplus_convolve(below, up_[cl.children[t]][child_key(c, t, mask)], stats_mutable());
        const auto& to_go = cost_to_go_[c][sep_key(c, mask)];
        const int shift = own_bits(c, mask);
        double best = out.edges[e][key];
        for (std::size_t k = 0; k < below.size(); ++k) {
          best = std::min(best, sat_add(psi_[c][mask], sat_add(below[k], to_go[k + shift])));
          if (stats_) stats_->cells += 1;
        }
        out.edges[e][key] = best;
      }
    }
    for (std::size_t t = 0; t < s_.singletons.size(); ++t) {
      const int v = s_.singletons[t];
      const auto& w = w_of_[component_of_singleton_.at(v)];
      for (int label = 0; label < 2; ++label)
        out.nodes[t][label] = sat_add(aug_.node_tables[v][label], w[label ^ flip_of(v)]);
    }
    return out;
  }

  // Enumerates minimizers within tie_tol of the minimum into `sink`
  // (which returns false to stop, e.g. when a cap is reached).
  void enumerate_argmins(double tie_tol, const std::function<bool(const assignment&)>& sink)
  {
    const double value = min_value();
    const double budget_total = value + tie_tol;
    suffix_.assign(components_.size() + 1, {});
    suffix_[components_.size()] = {0.0};
    for (std::size_t r = components_.size(); r-- > 0;)
      suffix_[r] = minplus_convolve(components_[r].g, suffix_[r + 1], stats_);

    assignment x(n_, 0);
    for (int m = 0; m <= n_; ++m) {
      if (sat_add(hop_.f[m], total_[m]) > budget_total) continue;
      if (!enum_components(0, m, budget_total - hop_.f[m], x, sink)) return;
    }
  }

private:
  struct component {
    bool singleton = false;
    int var = -1;           // singleton variable
    int root = -1;          // forest root clique
    std::vector<int> cliques;  // post-order (children first)
    int m = 0;              // variables owned by this component
    int smallest = 0;
    cardinality_profile g;
  };

  static int bit_of(const std::vector<int>& vars, int v)
  {
    return (int)(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
  }

  int flip_of(int v) const { return hop_.flip_mask.empty() ? 0 : hop_.flip_mask[v]; }

  void build_psi()
  {
    const auto& forest = s_.forest;
    psi_.resize(forest.cliques.size());
    own_vars_.resize(forest.cliques.size());
    for (std::size_t c = 0; c < forest.cliques.size(); ++c) {
      const auto& vars = forest.cliques[c].vars;
      psi_[c].assign(std::size_t(1) << vars.size(), 0.0);
      for (std::size_t b = 0; b < vars.size(); ++b)
        if (forest.home_clique[vars[b]] == (int)c) {
          own_vars_[c].push_back((int)b);
          for (std::size_t mask = 0; mask < psi_[c].size(); ++mask)
            psi_[c][mask] = sat_add(psi_[c][mask], aug_.node_tables[vars[b]][(mask >> b) & 1]);
        }
    }
    for (std::size_t e = 0; e < s_.pairs.size(); ++e) {
      const int c = forest.edge_clique[e];
      const auto& vars = forest.cliques[c].vars;
      const int bi = bit_of(vars, s_.pairs[e].first), bj = bit_of(vars, s_.pairs[e].second);
      for (std::size_t mask = 0; mask < psi_[c].size(); ++mask)
        psi_[c][mask] = sat_add(psi_[c][mask], aug_.edge_tables[e][((mask >> bi) & 1) * 2 + ((mask >> bj) & 1)]);
    }
  }

  void build_components()
  {
    const auto& forest = s_.forest;
    component_of_clique_.assign(forest.cliques.size(), -1);
    sub_home_.assign(forest.cliques.size(), 0);
    for (int r : forest.roots) {
      component comp;
      comp.root = r;
      // post-order
      std::vector<std::pair<int, std::size_t>> stack{{r, 0}};
      while (!stack.empty()) {
        auto& [cur, next] = stack.back();
        if (next < forest.cliques[cur].children.size()) {
          stack.emplace_back(forest.cliques[cur].children[next++], 0);
        } else {
          comp.cliques.push_back(cur);
          stack.pop_back();
        }
      }
      comp.smallest = n_;
      for (int c : comp.cliques) {
        component_of_clique_[c] = (int)components_.size();
        sub_home_[c] = (int)own_vars_[c].size();
        for (int ch : forest.cliques[c].children) sub_home_[c] += sub_home_[ch];
        comp.m += (int)own_vars_[c].size();
        comp.smallest = std::min(comp.smallest, forest.cliques[c].vars.front());
      }
      components_.push_back(std::move(comp));
    }
    for (int v : s_.singletons) {
      component comp;
      comp.singleton = true;
      comp.var = v;
      comp.m = 1;
      comp.smallest = v;
      components_.push_back(std::move(comp));
    }
    std::sort(components_.begin(), components_.end(),
              [](const component& a, const component& b) { return a.smallest < b.smallest; });
    for (std::size_t r = 0; r < components_.size(); ++r) {
      if (components_[r].singleton)
        component_of_singleton_[components_[r].var] = (int)r;
      else
        for (int c : components_[r].cliques) component_of_clique_[c] = (int)r;
    }
  }

  int own_bits(std::size_t c, std::size_t mask) const
  {
    int bits = 0;
    for (int b : own_vars_[c]) bits += ((mask >> b) & 1) ^ flip_of(s_.forest.cliques[c].vars[b]);
    return bits;
  }

  // Subtree profile of one clique assignment: children's messages convolved,
  // shifted by the clique's own flipped bits, plus the clique potential.
  cardinality_profile local_profile(std::size_t c, std::size_t mask) const
  {
    const auto& cl = s_.forest.cliques[c];
    cardinality_profile prof{0.0};
    for (std::size_t t = 0; t < cl.children.size(); ++t) {
      const int ch = cl.children[t];
      prof = minplus_convolve(prof, up_[ch][child_key(c, t, mask)], stats_mutable());
    }
    const int shift = own_bits(c, mask);
    cardinality_profile out(sub_home_[c] + 1, infinity_sentinel);
    for (std::size_t k = 0; k < prof.size(); ++k) {
      out[k + shift] = sat_add(prof[k], psi_[c][mask]);
      if (stats_) stats_mutable()->cells += 1;
    }
    return out;
  }

  std::size_t sep_key(std::size_t c, std::size_t mask) const
  {
    const auto& cl = s_.forest.cliques[c];
    std::size_t key = 0;
    for (std::size_t b = 0; b < cl.separator.size(); ++b)
      key |= ((mask >> bit_of(cl.vars, cl.separator[b])) & 1) << b;
    return key;
  }

  std::size_t child_key(std::size_t parent, std::size_t t, std::size_t parent_mask) const
  {
    const auto& pv = s_.forest.cliques[parent].vars;
    const auto& sep = s_.forest.cliques[s_.forest.cliques[parent].children[t]].separator;
    std::size_t key = 0;
    for (std::size_t b = 0; b < sep.size(); ++b)
      key |= ((parent_mask >> bit_of(pv, sep[b])) & 1) << b;
    return key;
  }

  void run_up()
  {
    const auto& forest = s_.forest;
    up_.assign(forest.cliques.size(), {});
    for (const auto& comp : components_) {
      if (comp.singleton) continue;
      for (int c : comp.cliques) {
        const auto& cl = forest.cliques[c];
        const std::size_t keys = std::size_t(1) << cl.separator.size();
        std::vector<cardinality_profile> msg(keys, cardinality_profile(sub_home_[c] + 1, infinity_sentinel));
        for (std::size_t mask = 0; mask < psi_[c].size(); ++mask) {
          const cardinality_profile prof = local_profile(c, mask);
          auto& slot = msg[sep_key(c, mask)];
          for (std::size_t k = 0; k < prof.size(); ++k) slot[k] = std::min(slot[k], prof[k]);
          if (stats_) stats_->cells += prof.size();
        }
        up_[c] = std::move(msg);
      }
    }
  }

  cardinality_profile compute_profile(const component& comp) const
  {
    if (comp.singleton) {
      const int v = comp.var;
      cardinality_profile g(2);
      g[0] = aug_.node_tables[v][flip_of(v)];
      g[1] = aug_.node_tables[v][1 ^ flip_of(v)];
      return g;
    }
    // up message of the root over its (empty) separator
    return up_[comp.root][0];
  }

public:
  // Profile of the r-th component (components ordered by smallest vertex).
  const cardinality_profile& profile(std::size_t r) const { return components_[r].g; }

private:
  // cost_to_go_[c][sep key](k) = best completion outside subtree(c), plus the
  // HOP term, given that the subtree will contribute k flipped ones. At the
  // root this is W_r; below it shrinks with the subtree.
  void run_down_folded()
  {
    const auto& forest = s_.forest;
    cost_to_go_.assign(forest.cliques.size(), {});
    for (std::size_t r = 0; r < components_.size(); ++r) {
      const auto& comp = components_[r];
      if (comp.singleton) continue;
      cost_to_go_[comp.root] = {w_of_[r]};
      for (auto it = comp.cliques.rbegin(); it != comp.cliques.rend(); ++it) {
        const int p = *it;
        const auto& cl = forest.cliques[p];
        const std::size_t d = cl.children.size();
        if (d == 0) continue;
        for (int ch : cl.children) {
          const std::size_t keys = std::size_t(1) << forest.cliques[ch].separator.size();
          cost_to_go_[ch].assign(keys, cardinality_profile(sub_home_[ch] + 1, infinity_sentinel));
        }
        for (std::size_t mask = 0; mask < psi_[p].size(); ++mask) {
          std::vector<cardinality_profile> prefix(d + 1), suffix(d + 1);
          prefix[0] = {0.0};
          for (std::size_t t = 0; t < d; ++t)
            prefix[t + 1] = minplus_convolve(prefix[t], up_[cl.children[t]][child_key(p, t, mask)], stats_mutable());
          suffix[d] = {0.0};
          for (std::size_t t = d; t-- > 0;)
            suffix[t] = minplus_convolve(up_[cl.children[t]][child_key(p, t, mask)], suffix[t + 1], stats_mutable());
          const int shift = own_bits(p, mask);
          const auto& to_go = cost_to_go_[p][sep_key(p, mask)];
          for (std::size_t t = 0; t < d; ++t) {
            const int ch = cl.children[t];
            const cardinality_profile siblings = minplus_convolve(prefix[t], suffix[t + 1], stats_mutable());
            auto& slot = cost_to_go_[ch][child_key(p, t, mask)];
            for (std::size_t k = 0; k < slot.size(); ++k) {
              double best = slot[k];
              for (std::size_t j = 0; j < siblings.size(); ++j)
                best = std::min(best, sat_add(psi_[p][mask], sat_add(siblings[j], to_go[k + shift + j])));
              slot[k] = best;
            }
            if (stats_) stats_->cells += slot.size() * siblings.size();
          }
        }
      }
    }
  }

  // W_r(c) = min_{m'} [f(c + m') + others_r(m')] where others_r convolves all
  // component profiles except r's. Cached prefix/suffix convolutions.
  void build_cross_component_tables()
  {
    const std::size_t R = components_.size();
    std::vector<cardinality_profile> prefix(R + 1), suffix(R + 1);
    prefix[0] = {0.0};
    for (std::size_t r = 0; r < R; ++r) prefix[r + 1] = minplus_convolve(prefix[r], components_[r].g, stats_mutable());
    suffix[R] = {0.0};
    for (std::size_t r = R; r-- > 0;) suffix[r] = minplus_convolve(components_[r].g, suffix[r + 1], stats_mutable());
    w_of_.assign(R, {});
    for (std::size_t r = 0; r < R; ++r) {
      const cardinality_profile others = minplus_convolve(prefix[r], suffix[r + 1], stats_mutable());
      cardinality_profile w(components_[r].m + 1, infinity_sentinel);
      for (std::size_t c = 0; c < w.size(); ++c) {
        for (std::size_t k = 0; k < others.size(); ++k) {
          w[c] = std::min(w[c], sat_add(hop_.f[c + k], others[k]));
          if (stats_) stats_->cells += 1;
        }
      }
      w_of_[r] = std::move(w);
    }
  }

  bool enum_components(std::size_t r, int count_left, double budget, assignment& x,
                       const std::function<bool(const assignment&)>& sink)
  {
    if (r == components_.size()) {
      assert(count_left == 0);
      return sink(x);
    }
    const auto& comp = components_[r];
    for (int c = 0; c <= std::min(count_left, comp.m); ++c) {
      const int rest = count_left - c;
      if (rest >= (int)suffix_[r + 1].size()) continue;
      const double lb_rest = suffix_[r + 1][rest];
      if (sat_add(comp.g[c], lb_rest) > budget) continue;
      const double comp_budget = budget - lb_rest;
      bool keep_going = true;
      if (comp.singleton) {
        const int label = c ^ flip_of(comp.var);
        const double v = aug_.node_tables[comp.var][label];
        if (v <= comp_budget) {
          x[comp.var] = (std::uint8_t)label;
          keep_going = enum_components(r + 1, rest, budget - v, x, sink);
        }
      } else {
        keep_going = enum_clique(comp.root, 0, false, c, comp_budget, x, [&](double v) {
          return enum_components(r + 1, rest, budget - v, x, sink);
        });
      }
      if (!keep_going) return false;
    }
    return true;
  }

  // Enumerates subtree assignments with exactly `count` flipped ones and
  // subtree value <= budget; cont(value) continues the surrounding search.
  bool enum_clique(int c, std::size_t key, bool has_key, int count, double budget, assignment& x,
                   const std::function<bool(double)>& cont)
  {
    const auto& cl = s_.forest.cliques[c];
    const std::size_t d = cl.children.size();
    for (std::size_t mask = 0; mask < psi_[c].size(); ++mask) {
      if (has_key && sep_key(c, mask) != key) continue;
      const int own = own_bits(c, mask);
      if (own > count) continue;
      const int rest = count - own;
      const double base = psi_[c][mask];
      // suffix feasibility profiles over the children at this mask
      std::vector<cardinality_profile> sufc(d + 1);
      sufc[d] = {0.0};
      for (std::size_t t = d; t-- > 0;)
        sufc[t] = minplus_convolve(up_[cl.children[t]][child_key(c, t, mask)], sufc[t + 1], stats_mutable());
      if (rest >= (int)sufc[0].size()) continue;
      if (sat_add(base, sufc[0][rest]) > budget) continue;
      for (std::size_t b = 0; b < cl.vars.size(); ++b) x[cl.vars[b]] = (mask >> b) & 1;
      if (!alloc_children(c, mask, 0, rest, base, budget, sufc, x, cont)) return false;
    }
    return true;
  }

  bool alloc_children(int c, std::size_t mask, std::size_t t, int rest, double acc, double budget,
                      const std::vector<cardinality_profile>& sufc, assignment& x,
                      const std::function<bool(double)>& cont)
  {
    const auto& cl = s_.forest.cliques[c];
    if (t == cl.children.size()) {
      assert(rest == 0);
      return cont(acc);
    }
    const int ch = cl.children[t];
    const auto& up = up_[ch][child_key(c, t, mask)];
    for (int k = 0; k <= std::min(rest, (int)up.size() - 1); ++k) {
      if (rest - k >= (int)sufc[t + 1].size()) continue;
      const double lb = sat_add(up[k], sufc[t + 1][rest - k]);
      if (sat_add(acc, lb) > budget) continue;
      const double child_budget = budget - acc - sufc[t + 1][rest - k];
      if (!enum_clique(ch, child_key(c, t, mask), true, k, child_budget, x, [&](double v) {
            return alloc_children(c, mask, t + 1, rest - k, acc + v, budget, sufc, x, cont);
          }))
        return false;
    }
    return true;
  }

  dp_stats* stats_mutable() const { return stats_; }

  const cardinality_hop& hop_;
  const edge_set& s_;
  const hop_augment& aug_;
  dp_stats* stats_;
  int n_;

  std::vector<std::vector<double>> psi_;
  std::vector<std::vector<int>> own_vars_;  // bit positions within each clique
  std::vector<int> sub_home_;
  std::vector<component> components_;
  std::vector<int> component_of_clique_;
  std::map<int, int> component_of_singleton_;
  std::vector<std::vector<cardinality_profile>> up_;          // per clique, per separator key
  std::vector<std::vector<cardinality_profile>> cost_to_go_;  // per clique, per separator key
  std::vector<cardinality_profile> w_of_;
  std::vector<cardinality_profile> suffix_;
  cardinality_profile total_;
};

} // namespace hoplp

#endif
