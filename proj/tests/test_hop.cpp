#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace hoplp;

TEST_CASE("minplus_convolve basics", "[hop]")
{
  SECTION("singleton zero profile is the identity")
  {
    const cardinality_profile b{3.0, -1.0, 2.5};
    CHECK(minplus_convolve({0.0}, b) == b);
  }
  SECTION("hand-checked convolution")
  {
    CHECK(minplus_convolve({0.0, 1.0}, {0.0, 2.0}) == cardinality_profile{0.0, 1.0, 3.0});
  }
  SECTION("commutative and associative against a direct double loop")
  {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 50; ++t) {
      const auto rand_profile = [&](int len) {
        cardinality_profile p(len);
        for (auto& v : p) v = testing::unit_interval(rng);
        return p;
      };
      const auto a = rand_profile(std::uniform_int_distribution<int>(1, 6)(rng));
      const auto b = rand_profile(std::uniform_int_distribution<int>(1, 6)(rng));
      const auto c = rand_profile(std::uniform_int_distribution<int>(1, 6)(rng));
      const auto ab = minplus_convolve(a, b);
      CHECK(ab == minplus_convolve(b, a));
      const auto left = minplus_convolve(ab, c);
      const auto right = minplus_convolve(a, minplus_convolve(b, c));
      REQUIRE(left.size() == right.size());
      for (std::size_t k = 0; k < left.size(); ++k)
        CHECK_THAT(left[k], Catch::Matchers::WithinAbs(right[k], 1e-12));
      // direct reference
      cardinality_profile ref(a.size() + b.size() - 1, infinity_sentinel);
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) ref[i + j] = std::min(ref[i + j], a[i] + b[j]);
      CHECK(ab == ref);
    }
  }
}

TEST_CASE("component profiles", "[hop]")
{
  SECTION("singleton with zero messages")
  {
    energy_model m;
    m.n = 1;
    m.unary = {{0.0, 0.0}};
    m.hop = cardinality_hop{{0.0, 0.0}, {}};
    const edge_set s = empty_edge_set(m);
    const hop_augment aug = hop_augment::zeros(1, 0);
    cardinality_engine engine(std::get<cardinality_hop>(m.hop), s, aug);
    CHECK(engine.profile(0) == cardinality_profile{0.0, 0.0});
  }
  SECTION("singleton carrying a message")
  {
    // the term entering the hop is -delta, so delta = (0, 3) gives (0, -3)
    energy_model m;
    m.n = 1;
    m.unary = {{0.0, 0.0}};
    m.hop = cardinality_hop{{0.0, 0.0}, {}};
    const edge_set s = empty_edge_set(m);
    hop_augment aug = hop_augment::zeros(1, 0);
    aug.node_tables[0] = {-0.0, -3.0};
    cardinality_engine engine(std::get<cardinality_hop>(m.hop), s, aug);
    CHECK(engine.profile(0) == cardinality_profile{0.0, -3.0});
  }
  SECTION("two-edge chain component equals per-count enumeration")
  {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 30; ++t) {
      energy_model m;
      m.n = 3;
      m.unary.assign(3, {0.0, 0.0});
      m.edges.push_back({0, 1, {0, 0, 0, 0}});
      m.edges.push_back({1, 2, {0, 0, 0, 0}});
      m.hop = testing::random_cardinality(rng, 3);
      const edge_set s = full_edge_set(m);
      const hop_augment aug = testing::random_augment(rng, 3, 2);
      cardinality_engine engine(std::get<cardinality_hop>(m.hop), s, aug);
      REQUIRE(engine.component_count() == 1);
      const auto& flip = std::get<cardinality_hop>(m.hop).flip_mask;
      cardinality_profile want(4, infinity_sentinel);
      for (int bits = 0; bits < 8; ++bits) {
        const assignment x{(std::uint8_t)(bits & 1), (std::uint8_t)((bits >> 1) & 1),
                           (std::uint8_t)((bits >> 2) & 1)};
        int count = 0;
        double value = 0.0;
        for (int v = 0; v < 3; ++v) {
          count += x[v] ^ flip[v];
          value += aug.node_tables[v][x[v]];
        }
        value += aug.edge_tables[0][x[0] * 2 + x[1]];
        value += aug.edge_tables[1][x[1] * 2 + x[2]];
        want[count] = std::min(want[count], value);
      }
      const auto& got = engine.profile(0);
      REQUIRE(got.size() == want.size());
      for (std::size_t k = 0; k < want.size(); ++k)
        CHECK_THAT(got[k], Catch::Matchers::WithinAbs(want[k], 1e-12));
    }
  }
}

TEST_CASE("hop_min corner cases", "[hop]")
{
  SECTION("all-zero cardinality: everything ties, set truncates")
  {
    energy_model m;
    m.n = 10;
    m.unary.assign(10, {0.0, 0.0});
    m.hop = cardinality_hop{std::vector<double>(11, 0.0), {}};
    const edge_set s = empty_edge_set(m);
    const auto res = hop_min(m.hop, s, hop_augment::zeros(10, 0));
    CHECK(res.value == 0.0);
    CHECK(res.argmins.truncated);
    CHECK((int)res.argmins.assignments.size() == res.argmins.cap);
  }
  SECTION("average-cut chain at zero messages: all balanced assignments")
  {
    const energy_model m = gen_avgcut_chain(4, 1.0, 0.1);
    const edge_set s = empty_edge_set(m);
    const auto res = hop_min(m.hop, s, hop_augment::zeros(4, 0));
    CHECK_THAT(res.value, Catch::Matchers::WithinAbs(-0.4, 1e-12));
    REQUIRE(res.argmins.assignments.size() == 6);
    for (const auto& x : res.argmins.assignments)
      CHECK(std::count(x.begin(), x.end(), 1) == 2);
    CHECK_FALSE(res.argmins.truncated);
  }
  SECTION("an all-forbidden term reports infeasibility")
  {
    energy_model m;
    m.n = 2;
    m.unary.assign(2, {0.0, 0.0});
    m.hop = table_hop{{infinity_sentinel, infinity_sentinel, infinity_sentinel, infinity_sentinel}};
    validate_model(m);
    const edge_set s = empty_edge_set(m);
    CHECK_THROWS_AS(hop_min(m.hop, s, hop_augment::zeros(2, 0)), infeasible_error);
    CHECK_THROWS_AS(hop_min_marginals(m.hop, s, hop_augment::zeros(2, 0)), infeasible_error);
  }
}

TEST_CASE("hop_min and hop_min_marginals match enumeration", "[hop]")
{
  std::mt19937_64 rng(23);
  int done = 0;
  while (done < 150) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    const char* kind = done % 3 == 0 ? "pattern" : "cardinality";
    const energy_model m = testing::random_model(rng, n, kind);
    const edge_set s = testing::random_edge_subset(rng, m, 3);
    const hop_augment aug = testing::random_augment(rng, n, s.pairs.size());

    const auto res = hop_min(m.hop, s, aug);
    const auto [want_value, want_mins] = brute_force_hop_argmins(m.hop, s, aug);
    REQUIRE_THAT(res.value, Catch::Matchers::WithinAbs(want_value, 1e-9));
    REQUIRE_FALSE(res.argmins.truncated);
    REQUIRE(res.argmins.assignments == want_mins);

    const auto marg = hop_min_marginals(m.hop, s, aug);
    for (std::size_t e = 0; e < s.pairs.size(); ++e) {
      const auto want = brute_force_hop_min_marginals(m.hop, s, aug, hop_block::edge((int)e));
      for (int key = 0; key < 4; ++key)
        REQUIRE_THAT(marg.edges[e][key], Catch::Matchers::WithinAbs(want[key], 1e-9));
    }
    for (std::size_t t = 0; t < s.singletons.size(); ++t) {
      const auto want = brute_force_hop_min_marginals(m.hop, s, aug, hop_block::node(s.singletons[t]));
      for (int key = 0; key < 2; ++key)
        REQUIRE_THAT(marg.nodes[t][key], Catch::Matchers::WithinAbs(want[key], 1e-9));
    }
    ++done;
  }
}

TEST_CASE("min-marginal identities", "[hop]")
{
  SECTION("single variable, direct formula")
  {
    energy_model m;
    m.n = 1;
    m.unary = {{0.0, 0.0}};
    m.hop = cardinality_hop{{0.0, -1.0}, {}};
    const edge_set s = empty_edge_set(m);
    const auto marg = hop_min_marginals(m.hop, s, hop_augment::zeros(1, 0));
    REQUIRE(marg.nodes.size() == 1);
    CHECK(marg.nodes[0][0] == 0.0);
    CHECK(marg.nodes[0][1] == -1.0);
  }
  SECTION("every block's minimum equals the hop minimum, entries never below it")
  {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 40; ++t) {
      const int n = std::uniform_int_distribution<int>(2, 10)(rng);
      const energy_model m = testing::random_model(rng, n, t % 2 ? "pattern" : "cardinality");
      const edge_set s = testing::random_edge_subset(rng, m, 3);
      const hop_augment aug = testing::random_augment(rng, n, s.pairs.size());
      const double value = hop_min_value(m.hop, s, aug);
      const auto marg = hop_min_marginals(m.hop, s, aug);
      for (const auto& table : marg.edges) {
        CHECK_THAT(*std::min_element(table.begin(), table.end()),
                   Catch::Matchers::WithinAbs(value, 1e-9));
        for (double v : table) CHECK(v >= value - 1e-9);
      }
      for (const auto& table : marg.nodes) {
        CHECK_THAT(*std::min_element(table.begin(), table.end()),
                   Catch::Matchers::WithinAbs(value, 1e-9));
        for (double v : table) CHECK(v >= value - 1e-9);
      }
    }
  }
}

TEST_CASE("argmin sets re-evaluate to the reported minimum", "[hop]")
{
  std::mt19937_64 rng(25);
  for (int t = 0; t < 40; ++t) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    const energy_model m = testing::random_model(rng, n, t % 2 ? "pattern" : "cardinality");
    const edge_set s = testing::random_edge_subset(rng, m, 3);
    const hop_augment aug = testing::random_augment(rng, n, s.pairs.size());
    const auto res = hop_min(m.hop, s, aug);
    REQUIRE_FALSE(res.argmins.assignments.empty());
    for (const auto& x : res.argmins.assignments)
      CHECK_THAT(augmented_hop_value(m.hop, s, aug, x), Catch::Matchers::WithinAbs(res.value, 1e-9));
    // distinct and sorted
    CHECK(std::adjacent_find(res.argmins.assignments.begin(), res.argmins.assignments.end()) ==
          res.argmins.assignments.end());
    CHECK(std::is_sorted(res.argmins.assignments.begin(), res.argmins.assignments.end()));
  }
}

TEST_CASE("cardinality engine agrees with the explicit-table path", "[hop]")
{
  std::mt19937_64 rng(26);
  for (int t = 0; t < 40; ++t) {
    const int n = std::uniform_int_distribution<int>(2, 9)(rng);
    energy_model m = testing::random_model(rng, n, "cardinality");
    const edge_set s = testing::random_edge_subset(rng, m, 3);
    const hop_augment aug = testing::random_augment(rng, n, s.pairs.size());
    // same hop as an explicit table
    energy_model tabled = m;
    table_hop table;
    table.values.resize(std::size_t(1) << n);
    for (std::size_t idx = 0; idx < table.values.size(); ++idx)
      table.values[idx] = hop_value(m.hop, assignment_from_index(idx, n));
    tabled.hop = std::move(table);

    const auto a = hop_min(m.hop, s, aug);
    const auto b = hop_min(tabled.hop, s, aug);
    CHECK_THAT(a.value, Catch::Matchers::WithinAbs(b.value, 1e-9));
    CHECK(a.argmins.assignments == b.argmins.assignments);
  }
}

TEST_CASE("one min-marginal pass stays within the state budget", "[hop]")
{
  std::mt19937_64 rng(27);
  int done = 0;
  while (done < 60) {
    const int n = std::uniform_int_distribution<int>(2, 14)(rng);
    const energy_model m = testing::random_model(rng, n, "cardinality");
    const edge_set s = testing::random_edge_subset(rng, m, 3);
    const hop_augment aug = testing::random_augment(rng, n, s.pairs.size());
    dp_stats stats;
    cardinality_engine engine(std::get<cardinality_hop>(m.hop), s, aug, &stats);
    engine.min_marginals();
    const double budget = 4.0 * (n + 1) * (n + 1) * double(1 << (s.tw_bound + 1));
    CHECK((double)stats.cells <= budget);
    ++done;
  }
}

TEST_CASE("pattern argmins take the union over patterns at the global minimum", "[hop]")
{
  energy_model m;
  m.n = 2;
  m.unary.assign(2, {0.0, 0.0});
  // pattern 0 minimized by (0,0) and (0,1); pattern 1 by (1,1); both reach -1
  m.hop = pattern_hop{{{1.0, 0.0}, {-0.5, -0.5}}};
  validate_model(m);
  const edge_set s = empty_edge_set(m);
  hop_augment aug = hop_augment::zeros(2, 0);
  aug.node_tables[0] = {0.0, -1.0};
  // values: pattern0: (0,0)->0, (0,1)->0, (1,0)->0, (1,1)->0 ; pattern1: (1,1)->-2
  // with the node term: x0=1 adds -1
  const auto res = hop_min(m.hop, s, aug);
  const auto [want_value, want_mins] = brute_force_hop_argmins(m.hop, s, aug);
  CHECK_THAT(res.value, Catch::Matchers::WithinAbs(want_value, 1e-12));
  CHECK(res.argmins.assignments == want_mins);
}

TEST_CASE("argmin cap keeps the first assignments and flags truncation", "[hop]")
{
  energy_model m;
  m.n = 6;
  m.unary.assign(6, {0.0, 0.0});
  m.hop = cardinality_hop{std::vector<double>(7, 0.0), {}};
  const edge_set s = empty_edge_set(m);
  const auto res = hop_min(m.hop, s, hop_augment::zeros(6, 0), 10);
  CHECK(res.argmins.truncated);
  CHECK(res.argmins.assignments.size() == 10);
  CHECK(res.argmins.cap == 10);
  CHECK(std::is_sorted(res.argmins.assignments.begin(), res.argmins.assignments.end()));
}
