#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace hoplp;

namespace {

bool models_equal(const energy_model& a, const energy_model& b)
{
  if (a.n != b.n || a.unary != b.unary) return false;
  if (a.edges.size() != b.edges.size()) return false;
  for (std::size_t e = 0; e < a.edges.size(); ++e)
    if (a.edges[e].i != b.edges[e].i || a.edges[e].j != b.edges[e].j || a.edges[e].theta != b.edges[e].theta)
      return false;
  if (a.hop.index() != b.hop.index()) return false;
  if (const auto* c = std::get_if<cardinality_hop>(&a.hop)) {
    const auto& d = std::get<cardinality_hop>(b.hop);
    return c->f == d.f && c->flip_mask == d.flip_mask;
  }
  if (const auto* p = std::get_if<pattern_hop>(&a.hop))
    return p->patterns == std::get<pattern_hop>(b.hop).patterns;
  return std::get<table_hop>(a.hop).values == std::get<table_hop>(b.hop).values;
}

} // namespace

TEST_CASE("model round-trip is bit-exact, infinities included", "[model]")
{
  const energy_model m = gen_chain_exclusion(2, 0.3141592653589793, 1e-7);
  const energy_model back = read_model(write_model(m));
  CHECK(models_equal(m, back));
  // a second round trip reproduces the exact same document
  CHECK(write_model(back) == write_model(m));
}

TEST_CASE("round-trip across the hop families", "[model]")
{
  std::mt19937_64 rng(7);
  for (const char* kind : {"cardinality", "pattern"}) {
    const energy_model m = testing::random_model(rng, 5, kind);
    CHECK(models_equal(m, read_model(write_model(m))));
  }
  energy_model t;
  t.n = 2;
  t.unary.assign(2, {0.0, 0.5});
  t.hop = table_hop{{0.0, infinity_sentinel, -1.25, 3.0}};
  validate_model(t);
  CHECK(models_equal(t, read_model(write_model(t))));
}

TEST_CASE("parse errors name the offending field", "[model]")
{
  SECTION("edge endpoint out of range")
  {
    const std::string doc = R"({"n": 3, "unary": [[0,0],[0,0],[0,0]],
      "edges": [{"i": 3, "j": 1, "theta": [[0,0],[0,0]]}],
      "hop": {"type": "cardinality", "f": [0,0,0,0]}})";
    CHECK_THROWS_MATCHES(read_model(doc), input_error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("out of range")));
  }
  SECTION("cardinality f of the wrong length")
  {
    const std::string doc = R"({"n": 3, "unary": [[0,0],[0,0],[0,0]], "edges": [],
      "hop": {"type": "cardinality", "f": [0,0,0]}})";
    CHECK_THROWS_MATCHES(read_model(doc), input_error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("hop.f")));
  }
  SECTION("more than one hop")
  {
    const std::string doc = R"({"n": 1, "unary": [[0,0]], "edges": [],
      "hop": [{"type": "cardinality", "f": [0,0]}, {"type": "cardinality", "f": [0,0]}]})";
    CHECK_THROWS_AS(read_model(doc), input_error);
  }
  SECTION("malformed JSON")
  {
    CHECK_THROWS_AS(read_model("{"), input_error);
  }
  SECTION("negative infinity token")
  {
    const std::string doc = R"({"n": 1, "unary": [["-inf", 0]], "edges": [],
      "hop": {"type": "cardinality", "f": [0, 0]}})";
    CHECK_THROWS_AS(read_model(doc), input_error);
  }
  SECTION("finite energy beyond the representable range")
  {
    const std::string doc = R"({"n": 1, "unary": [[1e14, 0]], "edges": [],
      "hop": {"type": "cardinality", "f": [0, 0]}})";
    CHECK_THROWS_AS(read_model(doc), input_error);
  }
  SECTION("i >= j")
  {
    const std::string doc = R"({"n": 3, "unary": [[0,0],[0,0],[0,0]],
      "edges": [{"i": 1, "j": 0, "theta": [[0,0],[0,0]]}],
      "hop": {"type": "cardinality", "f": [0,0,0,0]}})";
    CHECK_THROWS_AS(read_model(doc), input_error);
  }
}

TEST_CASE("infinity is encoded as the string token", "[model]")
{
  const energy_model m = gen_chain_exclusion(2, 1.0, 0.1);
  const std::string text = write_model(m);
  CHECK(text.find("\"inf\"") != std::string::npos);
  const energy_model back = read_model(text);
  CHECK(std::get<cardinality_hop>(back.hop).f[0] == infinity_sentinel);
}
