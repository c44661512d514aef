#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace tsnac;

namespace {
std::vector<NodeId> nodes_of(const Route& r) {
  std::vector<NodeId> out{r.source()};
  for (const auto& l : r.links) out.push_back(l.to);
  return out;
}
}  // namespace

TEST_CASE("unique route on a line", "[routing]") {
  auto l = fx::line(1);
  auto r = k_shortest(l.g, l.a, l.b, 3);
  REQUIRE(r);
  REQUIRE(r->size() == 1);
  CHECK(r->front().length() == 2);
  CHECK(r->front().source() == l.a);
  CHECK(r->front().destination() == l.b);
}

TEST_CASE("equal-length disjoint routes come in lexicographic order", "[routing]") {
  NetworkGraph g;
  const auto s1 = g.add_node("SW1", NodeKind::Switch);
  const auto s2 = g.add_node("SW2", NodeKind::Switch);
  const auto s3 = g.add_node("SW3", NodeKind::Switch);
  const auto s4 = g.add_node("SW4", NodeKind::Switch);
  const auto a = g.add_node("ES1", NodeKind::EndSystem);
  const auto b = g.add_node("ES2", NodeKind::EndSystem);
  g.connect(a, s1, 1e8);
  g.connect(s1, s3, 1e8);
  g.connect(s1, s2, 1e8);
  g.connect(s2, s4, 1e8);
  g.connect(s3, s4, 1e8);
  g.connect(s4, b, 1e8);
  auto r = k_shortest(g, a, b, 3);
  REQUIRE(r);
  REQUIRE(r->size() == 2);
  CHECK(nodes_of((*r)[0]) == std::vector<NodeId>{a, s1, s2, s4, b});
  CHECK(nodes_of((*r)[1]) == std::vector<NodeId>{a, s1, s3, s4, b});
}

TEST_CASE("end systems never forward", "[routing]") {
  NetworkGraph g;
  const auto s1 = g.add_node("SW1", NodeKind::Switch);
  const auto s2 = g.add_node("SW2", NodeKind::Switch);
  const auto a = g.add_node("ES1", NodeKind::EndSystem);
  const auto m = g.add_node("ES2", NodeKind::EndSystem);
  const auto b = g.add_node("ES3", NodeKind::EndSystem);
  g.connect(a, s1, 1e8);
  g.connect(s1, m, 1e8);
  g.connect(m, s2, 1e8);
  g.connect(s2, b, 1e8);
  auto r = k_shortest(g, a, b, 3);
  REQUIRE_FALSE(r);
  CHECK(r.error().kind == RoutingError::Kind::NoPath);
  CHECK(k_shortest(g, a, a, 3).error().kind == RoutingError::Kind::InvalidEndpoints);
  CHECK(k_shortest(g, a, s1, 3).error().kind == RoutingError::Kind::InvalidEndpoints);
}

TEST_CASE("k shortest equals exhaustive enumeration on small ER graphs", "[routing][oracle]") {
  int pairs = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SyntheticSpec spec;
    spec.n_sw = 3 + seed % 6;
    spec.n_es = 6;
    spec.p = 0.5;
    spec.seed = seed;
    const auto g = gen_er_topology(spec);
    const auto es = g.end_systems();
    for (NodeId s : es)
      for (NodeId d : es) {
        if (s == d) continue;
        for (std::size_t k : {1u, 3u, 5u}) {
          auto all = oracle::all_simple_paths(g, s, d);
          if (all.size() > k) all.resize(k);
          auto r = k_shortest(g, s, d, k);
          REQUIRE(r);
          std::vector<std::vector<NodeId>> got;
          for (const auto& route : *r) got.push_back(nodes_of(route));
          CHECK(got == all);
        }
        ++pairs;
      }
  }
  CHECK(pairs > 500);
}

TEST_CASE("candidate table", "[routing]") {
  SyntheticSpec spec;
  spec.n_sw = 10;
  spec.n_es = 50;
  spec.seed = 4;
  const auto g = gen_er_topology(spec);
  const auto t0 = std::chrono::steady_clock::now();
  const auto table = build_candidate_table(g, 3);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
  CHECK(table.size() == 50u * 49u);
  const auto es = g.end_systems();
  for (std::size_t i = 0; i < es.size(); i += 7)
    for (std::size_t j = 1; j < es.size(); j += 11)
      if (es[i] != es[j]) CHECK(table.lookup(es[i], es[j]) == *k_shortest(g, es[i], es[j], 3));
  CHECK(table.lookup(es[0], es[0]).empty());
  CHECK(table.lookup(static_cast<NodeId>(9999), es[0]).empty());

  const std::vector<CandidateRouteTable::Pair> some{{es[0], es[1]}, {es[2], es[3]}};
  const auto partial = build_candidate_table(g, 3, some);
  CHECK(partial.size() == 2);
  CHECK(partial.lookup(es[0], es[1]) == table.lookup(es[0], es[1]));
}

TEST_CASE("candidate table JSON round trip", "[routing][serialize]") {
  SyntheticSpec spec;
  spec.n_sw = 6;
  spec.n_es = 12;
  spec.seed = 4;
  const auto g = gen_er_topology(spec);
  const auto table = build_candidate_table(g, 3);
  const auto back = route_table_from_json(Json::parse(to_json(table, g).dump()), g);
  CHECK(back == table);

  auto bad = to_json(table, g);
  bad["entries"][0]["routes"][0] = Json::array({"ES1", "ES2"});
  CHECK_THROWS_AS(route_table_from_json(bad, g), SchemaError);
  bad = to_json(table, g);
  bad["k"] = 0;
  CHECK_THROWS_AS(route_table_from_json(bad, g), SchemaError);
}
