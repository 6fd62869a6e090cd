#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace hoplp;

namespace {

energy_model cycle_model(int n, double weight)
{
  energy_model m;
  m.n = n;
  m.unary.assign(n, {0.0, 0.0});
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    m.edges.push_back({std::min(i, j), std::max(i, j), {0.0, weight, weight, 0.0}});
  }
  std::sort(m.edges.begin(), m.edges.end(), [](const edge_potential& a, const edge_potential& b) {
    return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
  });
  m.hop = cardinality_hop{std::vector<double>(n + 1, 0.0), {}};
  validate_model(m);
  return m;
}

} // namespace

TEST_CASE("initial tree picks maximum weight with lexicographic ties", "[edgesel]")
{
  SECTION("equal weights on a cycle: lexicographically smallest n-1 edges")
  {
    const energy_model m = cycle_model(5, 1.0);
    const edge_set s = initial_tree(m);
    std::vector<vertex_pair> got = s.pairs;
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<vertex_pair>{{0, 1}, {0, 4}, {1, 2}, {2, 3}});
  }
  SECTION("triangle keeps the two heaviest edges")
  {
    energy_model m;
    m.n = 3;
    m.unary.assign(3, {0.0, 0.0});
    m.edges.push_back({0, 1, {0, 3, 3, 0}});
    m.edges.push_back({0, 2, {0, 2, 2, 0}});
    m.edges.push_back({1, 2, {0, 1, 1, 0}});
    m.hop = cardinality_hop{{0, 0, 0, 0}, {}};
    const edge_set s = initial_tree(m);
    CHECK(s.members == std::vector<int>{0, 1});
  }
  SECTION("grid result is a spanning tree")
  {
    const energy_model m = gen_avgcut_grid(5, 5, 3, 0.01);
    const edge_set s = initial_tree(m);
    CHECK(s.members.size() == 24);
    CHECK(s.tw_bound == 1);
    union_find uf(m.n);
    for (auto [i, j] : s.pairs) CHECK(uf.unite(i, j));
  }
  SECTION("3x3 grid: total weight matches exhaustive spanning-tree search")
  {
    const energy_model m = gen_avgcut_grid(3, 3, 11, 0.01);
    const edge_set s = initial_tree(m);
    double got = 0.0;
    for (int e : s.members) got += spanning_weight(m.edges[e]);
    // enumerate all 8-edge subsets of the 12 grid edges
    double best = 0.0;
    const int E = (int)m.edges.size();
    for (std::size_t mask = 0; mask < (std::size_t(1) << E); ++mask) {
      if (std::popcount(mask) != m.n - 1) continue;
      union_find uf(m.n);
      double weight = 0.0;
      bool acyclic = true;
      for (int e = 0; e < E && acyclic; ++e) {
        if (!((mask >> e) & 1)) continue;
        acyclic = uf.unite(m.edges[e].i, m.edges[e].j);
        weight += spanning_weight(m.edges[e]);
      }
      if (acyclic) best = std::max(best, weight);
    }
    CHECK_THAT(got, Catch::Matchers::WithinAbs(best, 1e-12));
  }
}

TEST_CASE("wca_score formula", "[edgesel]")
{
  SECTION("uniform table scores zero")
  {
    CHECK(wca_score({2.0, 2.0, 2.0, 2.0}, {{0, 1}, {1, 0}}, 0, 1) == 0.0);
  }
  SECTION("all minimizers on one off-diagonal cell")
  {
    CHECK(wca_score({0.0, 5.0, 5.0, 0.0}, {{0, 1}}, 0, 1) == 5.0);
  }
  SECTION("a minimizer hitting the table minimum scores zero")
  {
    CHECK(wca_score({0.0, 5.0, 5.0, 0.0}, {{0, 1}, {1, 1}}, 0, 1) == 0.0);
  }
  SECTION("empty minimizer set is an input error")
  {
    CHECK_THROWS_AS(wca_score({0, 0, 0, 0}, {}, 0, 1), input_error);
  }
  SECTION("never negative beyond noise")
  {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 200; ++t) {
      std::array<double, 4> table;
      for (auto& v : table) v = testing::unit_interval(rng);
      std::vector<assignment> mins;
      for (int k = std::uniform_int_distribution<int>(1, 5)(rng); k-- > 0;)
        mins.push_back(testing::random_assignment(rng, 2));
      CHECK(wca_score(table, mins, 0, 1) >= -1e-9);
    }
  }
}

TEST_CASE("score_candidates reports wca, weight and admissibility per edge", "[edgesel]")
{
  energy_model m = cycle_model(4, 1.0);
  cardinality_hop h;
  h.f.resize(5);
  for (int k = 0; k <= 4; ++k) h.f[k] = -1.0 * k * (4 - k);
  m.hop = std::move(h);
  m.unary[0] = {infinity_sentinel, 0.0};
  validate_model(m);
  const edge_set s = initial_tree(m);
  const auto solved = solve(m, s);
  const solver_index idx(m, s);
  const reparameterization repam{m, s, solved.state, idx};
  std::vector<std::array<double, 4>> tilde(m.edges.size());
  for (std::size_t e = 0; e < m.edges.size(); ++e) tilde[e] = repam.edge((int)e);

  const auto scores = score_candidates(m, s.members, tilde, solved.hop_argmins, 4);
  REQUIRE(scores.size() == 1);  // one chord outside the spanning tree
  CHECK(scores[0].wca > default_wca_eps);
  CHECK(scores[0].spanning_weight >= 0.0);
  CHECK(scores[0].admissible);
  CHECK_FALSE(scores[0].truncated_argmins);
  // with a tree-width budget of 1 the chord is inadmissible
  const auto tight = score_candidates(m, s.members, tilde, solved.hop_argmins, 1);
  CHECK_FALSE(tight[0].admissible);
}

TEST_CASE("select_and_add behavior", "[edgesel]")
{
  SECTION("zero couplings: every WCA is zero, nothing is added")
  {
    const energy_model m = cycle_model(5, 0.0);
    const edge_set s = initial_tree(m);
    const auto solved = solve(m, s);
    const auto [grown, round] = select_and_add(m, s, solved, {});
    CHECK(round.added.empty());
    CHECK(grown.members == s.members);
  }
  SECTION("a positive-WCA edge is added even with a large batch")
  {
    // average-cut 4-cycle in the regime where the relaxation over a tree is
    // loose; the single chord has positive WCA.
    energy_model m = cycle_model(4, 1.0);
    cardinality_hop h;
    h.f.resize(5);
    for (int k = 0; k <= 4; ++k) h.f[k] = -1.0 * k * (4 - k);
    m.hop = std::move(h);
    m.unary[0] = {infinity_sentinel, 0.0};
    validate_model(m);
    const edge_set s = initial_tree(m);
    const auto solved = solve(m, s);
    REQUIRE_FALSE(solved.certificate);
    selection_config cfg;
    cfg.batch_size = 8;
    const auto [grown, round] = select_and_add(m, s, solved, cfg);
    REQUIRE(round.added.size() == 1);
    CHECK(round.added[0].wca > default_wca_eps);
    CHECK(grown.members.size() == s.members.size() + 1);
  }
}

TEST_CASE("tighten_loop on tree-structured models stops in round zero", "[edgesel]")
{
  std::mt19937_64 rng(42);
  const energy_model m = testing::random_model(rng, 8, "cardinality", 0);
  const auto res = tighten_loop(m);
  CHECK(res.trace.size() == 1);
  CHECK(res.final.certificate);
  CHECK_THAT(res.final.bound, Catch::Matchers::WithinAbs(brute_force_map(m).energy, 1e-6));
}

TEST_CASE("tighten_loop solves the average-cut chain outright", "[edgesel]")
{
  const energy_model m = gen_avgcut_chain(6, 1.0, 0.5);
  const auto res = tighten_loop(m);
  CHECK(res.trace.size() == 1);
  CHECK(res.final.certificate);
  CHECK_THAT(res.final.bound, Catch::Matchers::WithinAbs(brute_force_map(m).energy, 1e-6));
}

TEST_CASE("tighten_loop certifies tuned grids within the tree-width budget", "[edgesel]")
{
  for (std::uint64_t seed : {21, 22, 24}) {
    const auto [m, lambda] = gen_avgcut_grid_autotune(4, 4, seed);
    selection_config cfg;
    cfg.batch_size = 1;
    cfg.tw_max = 4;
    const auto res = tighten_loop(m, cfg);
    CHECK(res.final.certificate);
    CHECK_THAT(res.final.bound, Catch::Matchers::WithinAbs(0.0, 1e-6));
    CHECK(res.s.tw_bound <= cfg.tw_max);
    // selection trace bounds never decrease; positive non-truncated WCA
    // additions strictly tighten
    for (std::size_t r = 1; r < res.trace.size(); ++r) {
      CHECK(res.trace[r].converged_bound >= res.trace[r - 1].converged_bound - 1e-9);
      bool certified_pick = false;
      for (const auto& a : res.trace[r].added) certified_pick |= (!a.truncated && a.wca > cfg.wca_eps);
      if (certified_pick) CHECK(res.trace[r].converged_bound > res.trace[r - 1].converged_bound);
    }
  }
}

TEST_CASE("tighten_loop reports a WCA fixed point when no edge scores", "[edgesel]")
{
  // Seed 23 converges over the initial tree to a dual point where every
  // candidate edge's minimizers overlap the HOP minimizers: the WCA signal
  // vanishes while the gap stays positive, and the loop stops and says so.
  const auto [m, lambda] = gen_avgcut_grid_autotune(4, 4, 23);
  selection_config cfg;
  cfg.batch_size = 1;
  cfg.tw_max = 4;
  const auto res = tighten_loop(m, cfg);
  CHECK_FALSE(res.final.certificate);
  CHECK(res.wca_fixed_point);
  CHECK(res.final.gap > cfg.solve.cert_tol);
  CHECK(res.final.bound < brute_force_map(m).energy + 1e-9);
  // edge consistency over the full grid still certifies this instance
  const auto full = solve(m, full_edge_set(m));
  CHECK(full.certificate);
}

TEST_CASE("selection trace serializes to CSV", "[edgesel]")
{
  const auto [m, lambda] = gen_avgcut_grid_autotune(3, 3, 5);
  selection_config cfg;
  cfg.batch_size = 2;
  cfg.tw_max = 3;
  const auto res = tighten_loop(m, cfg);
  const std::string csv = selection_trace_csv(res.trace);
  CHECK(csv.rfind("round,edges_in_S,edge_added,wca,treewidth_bound,converged_bound\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 2);
}
