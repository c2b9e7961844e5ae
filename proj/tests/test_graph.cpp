#include <doctest.h>

#include <random>

#include "esep/fixtures.hpp"
#include "esep/graph.hpp"
#include "oracle.hpp"

using namespace esep;

TEST_CASE("varset keeps names sorted and unique") {
  CHECK_THROWS_AS(VarSet({"B", "A", "B"}), Error);
  VarSet s{"B", "A"};
  s.insert("B");  // re-insertion is a no-op
  CHECK(s.size() == 2);
  CHECK(s.names() == std::vector<std::string>{"A", "B"});
  CHECK(s.joined() == "AB");
  CHECK(s.joined(",") == "A,B");
  CHECK(s.unite({"C"}).size() == 3);
  CHECK(s.minus({"A"}) == VarSet{"B"});
  CHECK(s.intersect({"B", "C"}) == VarSet{"B"});
  CHECK(s.disjoint_with({"C"}));
  CHECK(VarSet{"A"}.subset_of(s));
}

TEST_CASE("dag construction rejects malformed input") {
  CHECK_THROWS_AS(Dag({{"A", true}}, {{"A", "A"}}), Error);                 // self-loop
  CHECK_THROWS_AS(Dag({{"A", true}}, {{"A", "B"}}), Error);                 // undeclared
  CHECK_THROWS_AS(Dag({{"A", true}, {"A", true}}, {}), Error);              // duplicate
  CHECK_THROWS_AS(Dag({{"A", true}, {"B", true}},
                      {{"A", "B"}, {"B", "A"}}),
                  Error);                                                   // cycle
  CHECK_THROWS_AS(Dag({{"A", true}, {"B", true}},
                      {{"A", "B"}, {"A", "B"}}),
                  Error);                                                   // dup edge
}

TEST_CASE("descendants and ancestors") {
  Dag g = fixtures::instrumental_graph();
  CHECK(descendants(g, {"D"}) == VarSet{"B", "D"});
  CHECK(descendants(g, {}) == VarSet{});
  CHECK(ancestors(g, {"B"}) == VarSet{"A", "B", "D", "U"});
  Dag chain({{"X", true}, {"Y", true}, {"Z", true}}, {{"X", "Y"}, {"Y", "Z"}});
  CHECK(descendants(chain, {"X"}) == VarSet{"X", "Y", "Z"});
}

TEST_CASE("node deletion drops a node and its edges") {
  Dag g = fixtures::instrumental_graph();
  Dag h = delete_nodes(g, {"D"});
  CHECK(h.all_nodes() == VarSet{"A", "B", "U"});
  CHECK(h.edges() == std::vector<std::pair<std::string, std::string>>{{"U", "B"}});
  CHECK(delete_nodes(g, {}).edges() == g.edges());
  CHECK(delete_nodes(g, g.all_nodes()).node_count() == 0);
}

TEST_CASE("splitting reroutes outgoing edges to the twin node") {
  Dag g = fixtures::instrumental_graph();
  Dag s = split(g, {"D"});
  CHECK(s.has_node("D@split"));
  CHECK(s.observed("D@split"));
  CHECK(s.has_edge("A", "D"));
  CHECK(s.has_edge("U", "D"));
  CHECK(s.has_edge("D@split", "B"));
  CHECK(!s.has_edge("D", "B"));
  CHECK(split(g, {}).edges() == g.edges());
  Dag clash({{"D", true}, {"D@split", true}}, {});
  CHECK_THROWS_AS(split(clash, {"D"}), Error);
}

TEST_CASE("mutilation removes incoming edges only") {
  Dag g = fixtures::adjustment_graph(fixtures::AdjustmentVariant::kPlain);
  Dag m = mutilate(g, {"C"});
  CHECK(m.parents("C").empty());
  CHECK(m.has_edge("C", "D"));
  CHECK(m.has_edge("C", "B"));
  CHECK(mutilate(g, {}).edges() == g.edges());
  CHECK(mutilate(g, {"U2"}).edges() == g.edges());  // root untouched
}

TEST_CASE("d-separation on the instrumental structure") {
  Dag g = fixtures::instrumental_graph();
  CHECK(d_separated(g, {"A"}, {"B"}, {"D", "U"}));
  CHECK(!d_separated(g, {"A"}, {"B"}, {"D"}));
  CHECK(!d_separated(g, {"A"}, {"B"}, {}));
  Dag iso({{"A", true}, {"B", true}}, {});
  CHECK(d_separated(iso, {"A"}, {"B"}, {}));
  CHECK_THROWS_AS(d_separated(g, {"A"}, {"A"}, {}), Error);
}

TEST_CASE("e-separation via deletion") {
  Dag g = fixtures::instrumental_graph();
  CHECK(e_separated(g, {{"A"}, {"B"}, {}, {"D"}}));
  CHECK(!e_separated(g, {{"A"}, {"B"}, {}, {}}));
  Dag ts_a = fixtures::timeseries_graph(false);
  Dag ts_b = fixtures::timeseries_graph(true);
  EsepRelation r{{"Y1"}, {"Y3", "Y4"}, {"Y2"}, {"Y5"}};
  CHECK(e_separated(ts_a, r));
  CHECK(!e_separated(ts_b, r));
  CHECK(e_separated(ts_b, {{"Y1"}, {"Y3"}, {"Y2"}, {"Y5"}}));
  CHECK(e_separated(ts_b, {{"Y2"}, {"Y4"}, {"Y1"}, {"Y3"}}));
}

TEST_CASE("minimal bottleneck flags") {
  Dag g = fixtures::instrumental_graph();
  CHECK(is_minimal_bottleneck(g, {{"A"}, {"B"}, {}, {"D"}}));
  Dag g2({{"A", true}, {"B", true}, {"D", true}, {"E", true}, {"U", false}},
         {{"A", "D"}, {"D", "B"}, {"U", "D"}, {"U", "B"}});
  CHECK(!is_minimal_bottleneck(g2, {{"A"}, {"B"}, {}, {"D", "E"}}));
  Dag iso({{"A", true}, {"B", true}}, {});
  CHECK(is_minimal_bottleneck(iso, {{"A"}, {"B"}, {}, {}}));
  CHECK_THROWS_AS(is_minimal_bottleneck(g, {{"A"}, {"B"}, {}, {}}), Error);
}

TEST_CASE("relation enumeration") {
  Dag iso({{"A", true}, {"B", true}}, {});
  auto rels = enumerate_esep(iso);
  bool found = false;
  for (const auto& e : rels) {
    if (e.rel == EsepRelation{{"A"}, {"B"}, {}, {}}) found = true;
  }
  CHECK(found);

  Dag complete({{"A", true}, {"B", true}, {"C", true}},
               {{"A", "B"}, {"A", "C"}, {"B", "C"}});
  CHECK(enumerate_esep(complete, {2, 2, 1, 0}).empty());

  // The three relations behind the published constraint trio.
  Dag ts = fixtures::timeseries_graph(false);
  auto entries = enumerate_esep(ts, {2, 2, 2, 1});
  auto has = [&](const EsepRelation& r) {
    for (const auto& e : entries) {
      if (e.rel == r) return true;
    }
    return false;
  };
  CHECK(has({{"Y1"}, {"Y3", "Y4"}, {"Y2"}, {"Y5"}}));
  CHECK(has({{"Y1", "Y2"}, {"Y4"}, {}, {"Y3"}}));
  CHECK(has({{"Y2"}, {"Y4"}, {"Y1"}, {"Y3"}}));
  for (const auto& e : entries) CHECK(e_separated(ts, e.rel));
}

TEST_CASE("reachability agrees with the path-enumeration oracle") {
  std::mt19937_64 rng(20240811);
  std::vector<Dag> graphs = {fixtures::instrumental_graph(),
                             fixtures::gated_confounder_graph(),
                             fixtures::mediated_chain_graph(false),
                             fixtures::mediated_chain_graph(true),
                             fixtures::timeseries_graph(false),
                             fixtures::timeseries_graph(true),
                             fixtures::confounded_pair_graph(false),
                             fixtures::confounded_pair_graph(true)};
  for (int i = 0; i < 200; ++i) {
    graphs.push_back(testutil::random_dag(rng, 3 + static_cast<int>(rng() % 6), 0.35, 0.3));
  }
  int checked = 0;
  for (const auto& g : graphs) {
    auto names = g.all_nodes().names();
    for (int trial = 0; trial < 30; ++trial) {
      std::shuffle(names.begin(), names.end(), rng);
      if (names.size() < 2) continue;
      VarSet a{names[0]}, b{names[1]}, c, d;
      for (std::size_t k = 2; k < names.size(); ++k) {
        switch (rng() % 3) {
          case 0: c.insert(names[k]); break;
          case 1: d.insert(names[k]); break;
          default: break;
        }
      }
      CHECK(d_separated(g, a, b, c) == testutil::dsep_by_paths(g, a, b, c));

      // e-separation matches d-separation in the split graph given the twins.
      EsepRelation rel{a, b, c, d};
      Dag sg = split(g, d);
      VarSet cond = c;
      for (const auto& n : d.names()) cond.insert(n + kSplitSuffix);
      CHECK(e_separated(g, rel) == d_separated(sg, a, b, cond));

      // d-separation given c and d jointly implies the deletion relation.
      if (d_separated(g, a, b, c.unite(d))) CHECK(e_separated(g, rel));

      // Deleting more never re-opens a separation.
      if (e_separated(g, rel)) {
        const VarSet all = g.all_nodes();
        for (const auto& n : all.names()) {
          if (a.contains(n) || b.contains(n) || c.contains(n) || d.contains(n)) continue;
          VarSet d2 = d;
          d2.insert(n);
          CHECK(e_separated(g, {a, b, c, d2}));
        }
      }
      ++checked;
    }
  }
  CHECK(checked > 1000);
}
