#include <doctest.h>

#include <cmath>
#include <random>

#include "esep/fixtures.hpp"
#include "esep/sem.hpp"
#include "oracle.hpp"

using namespace esep;

namespace {

double binary_entropy(double p) {
  return -(p * std::log2(p) + (1 - p) * std::log2(1 - p));
}

// Checks that the joint factorizes node-by-node over the graph.
void check_factorization(const SemModel& sem, const JointTable& t) {
  const Dag& g = sem.dag();
  t.for_each([&](const std::vector<Value>& vals, double p) {
    if (p <= 0.0) return;
    Assignment full;
    for (std::size_t i = 0; i < t.variables().size(); ++i) {
      full.set(t.variables()[i], vals[i]);
    }
    double prod = 1.0;
    for (const auto& nd : g.node_decls()) {
      VarSet pa(g.parents(nd.name));
      Assignment cond;
      for (const auto& pn : pa.names()) cond.set(pn, full.at(pn));
      JointTable local = pa.empty() ? t : condition(t, cond);
      prod *= marginal(local, {nd.name}).prob({{nd.name, full.at(nd.name)}});
    }
    CHECK(prod == doctest::Approx(p).epsilon(1e-9));
  });
}

}  // namespace

TEST_CASE("builder validates the model") {
  Dag g({{"A", true}, {"B", true}}, {{"A", "B"}});
  SemBuilder b(g);
  b.domain("A", {0, 1}).noise("A", {{0, 0.5}, {1, 0.5}});
  b.mech("A", [](const Assignment&, Value n) { return n; });
  CHECK_THROWS_AS(b.build(), Error);  // B missing
  b.domain("B", {0, 1}).noise("B", {{0, 1.0}});
  b.mech("B", [](const Assignment& pa, Value) { return pa.at("A") + 5; });
  CHECK_THROWS_AS(b.build(), Error);  // out-of-domain output
  b.mech("B", [](const Assignment& pa, Value) { return pa.at("A"); });
  SemModel m = b.build();
  CHECK(m.mech_value("B", {{"A", 1}}, 0) == 1);
  CHECK_THROWS_AS(SemBuilder(g).noise("A", {{0, 0.5}, {1, 0.4}}), Error);  // sums to 0.9
}

TEST_CASE("joint of the null-ACE model") {
  JointTable t = fixtures::null_ace_sem().joint();
  CHECK(t.prob({{"X", 0}, {"Y", 0}}) == doctest::Approx(0.25));
  CHECK(t.prob({{"X", 0}, {"Y", 2}}) == doctest::Approx(0.25));
  CHECK(t.prob({{"X", 1}, {"Y", 1}}) == doctest::Approx(0.5));
  CHECK(t.prob({{"X", 1}, {"Y", 0}}) == doctest::Approx(0.0));
}

TEST_CASE("joint of simple hand-built models") {
  // two independent coins
  Dag g2({{"A", true}, {"B", true}}, {});
  SemBuilder b2(g2);
  for (const char* n : {"A", "B"}) {
    b2.domain(n, {0, 1}).noise(n, {{0, 0.5}, {1, 0.5}});
    b2.mech(n, [](const Assignment&, Value v) { return v; });
  }
  JointTable t2 = b2.build().joint();
  t2.for_each([](const std::vector<Value>&, double p) { CHECK(p == doctest::Approx(0.25)); });

  // deterministic chain collapses to a point mass
  Dag g3({{"A", true}, {"B", true}}, {{"A", "B"}});
  SemBuilder b3(g3);
  b3.domain("A", {1}).noise("A", {{0, 1.0}});
  b3.mech("A", [](const Assignment&, Value) { return 1; });
  b3.domain("B", {0, 1}).noise("B", {{0, 1.0}});
  b3.mech("B", [](const Assignment& pa, Value) { return pa.at("A"); });
  JointTable t3 = b3.build().joint();
  CHECK(t3.prob({{"A", 1}, {"B", 1}}) == doctest::Approx(1.0));
}

TEST_CASE("joint factorizes over the graph") {
  check_factorization(fixtures::null_ace_sem(), fixtures::null_ace_sem().joint());
  SemModel gate = gated_confounder_fixture(2);
  check_factorization(gate, gate.joint());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Dag g = testutil::random_dag(rng, 4, 0.4, 0.0);
    SemModel sem = random_sem(g, 2, rng());
    check_factorization(sem, sem.joint());
  }
}

TEST_CASE("state cap guards enumeration") {
  Dag g({{"A", true}}, {});
  SemBuilder b(g);
  b.domain("A", {0, 1}).noise("A", {{0, 0.5}, {1, 0.5}});
  b.mech("A", [](const Assignment&, Value v) { return v; });
  SemModel m = b.build();
  CHECK_THROWS_AS(m.joint(1), Error);
}

TEST_CASE("interventions replace mechanisms") {
  SemModel m = fixtures::null_ace_sem();
  JointTable t = intervene(m, {{"X", 1}}).joint();
  CHECK(marginal(t, {"Y"}).prob({{"Y", 1}}) == doctest::Approx(1.0));
  JointTable t0 = intervene(m, {{"X", 0}}).joint();
  CHECK(marginal(t0, {"Y"}).prob({{"Y", 0}}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(intervene(m, {{"X", 9}}), Error);

  // do(nothing) and forcing a root to its only supported value are no-ops
  JointTable same = intervene(m, {}).joint();
  CHECK(same.prob({{"X", 1}, {"Y", 1}}) == doctest::Approx(0.5));
  Dag g({{"A", true}, {"B", true}}, {{"A", "B"}});
  SemBuilder b(g);
  b.domain("A", {0, 1}).noise("A", {{0, 1.0}});
  b.mech("A", [](const Assignment&, Value) { return 1; });
  b.domain("B", {0, 1}).noise("B", {{0, 0.5}, {1, 0.5}});
  b.mech("B", [](const Assignment& pa, Value n) { return pa.at("A") ^ n; });
  SemModel fixed = b.build();
  JointTable before = fixed.observed_joint();
  JointTable after = intervene(fixed, {{"A", 1}}).observed_joint();
  before.for_each([&](const std::vector<Value>& v, double p) {
    CHECK(after.prob({{"A", v[0]}, {"B", v[1]}}) == doctest::Approx(p).epsilon(1e-12));
  });
}

TEST_CASE("seeded models are reproducible") {
  Dag g = fixtures::instrumental_graph();
  JointTable a = random_sem(g, 2, 99).observed_joint();
  JointTable b = random_sem(g, 2, 99).observed_joint();
  JointTable c = random_sem(g, 2, 100).observed_joint();
  bool all_equal = true, any_diff = false;
  a.for_each([&](const std::vector<Value>& v, double p) {
    Assignment cell{{"A", v[0]}, {"B", v[1]}, {"D", v[2]}};
    if (b.prob(cell) != p) all_equal = false;
    if (std::abs(c.prob(cell) - p) > 1e-15) any_diff = true;
  });
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("carrier model along a chain, fork, and collider") {
  Dag chain({{"A", true}, {"M", true}, {"B", true}}, {{"A", "M"}, {"M", "B"}});
  JointTable tc = path_witness(chain, {"A", "M", "B"}, {}).joint();
  CHECK(mutual_info(tc, {"A"}, {"B"}) == doctest::Approx(1.0).epsilon(1e-12));

  Dag fork({{"A", true}, {"F", true}, {"B", true}}, {{"F", "A"}, {"F", "B"}});
  JointTable tf = path_witness(fork, {"A", "F", "B"}, {}).joint();
  CHECK(mutual_info(tf, {"A"}, {"B"}) == doctest::Approx(1.0).epsilon(1e-12));

  Dag coll({{"A", true}, {"K", true}, {"B", true}}, {{"A", "K"}, {"B", "K"}});
  JointTable tk = path_witness(coll, {"A", "K", "B"}, {"K"}).joint();
  CHECK(pointwise_cmi(tk, {"A"}, {"B"}, {{"K", 1}}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mutual_info(tk, {"A"}, {"B"}) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(path_witness(coll, {"A", "K", "B"}, {}), Error);   // collider missing
  CHECK_THROWS_AS(path_witness(chain, {"A", "B"}, {}), Error);       // not adjacent
  CHECK_THROWS_AS(path_witness(chain, {"A"}, {}), Error);            // too short
}

TEST_CASE("violating model for a non-separating relation") {
  Dag ts = fixtures::timeseries_graph(true);
  EsepRelation rel{{"Y1"}, {"Y3", "Y4"}, {"Y2"}, {"Y5"}};
  SemModel sem = violation_witness(ts, rel, 0.99);
  JointTable t = sem.observed_joint();
  double lhs = cond_mutual_info(t, rel.a, rel.b.unite(rel.d), rel.c);
  double rhs = cond_entropy(t, rel.d, rel.c);
  CHECK(lhs == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rhs == doctest::Approx(binary_entropy(0.99)).epsilon(1e-9));
  CHECK(lhs - rhs > 0.5);

  Dag g = fixtures::instrumental_graph();
  CHECK_THROWS_AS(violation_witness(g, {{"A"}, {"B"}, {}, {"D"}}, 0.99), Error);
  CHECK_THROWS_AS(violation_witness(ts, rel, 0.5), Error);
  CHECK_THROWS_AS(violation_witness(ts, rel, 1.0), Error);
}

TEST_CASE("gate fixture: bottleneck entropy below endpoint information") {
  JointTable t2 = gated_confounder_fixture(2).observed_joint();
  CHECK(entropy(t2, {"D"}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mutual_info(t2, {"A"}, {"B"}) == doctest::Approx(1.5).epsilon(1e-12));
  JointTable t3 = gated_confounder_fixture(3).observed_joint();
  CHECK(entropy(t3, {"D"}) == doctest::Approx(binary_entropy(1.0 / 3)).epsilon(1e-9));
  CHECK(mutual_info(t3, {"A"}, {"B"}) > entropy(t3, {"D"}));
  CHECK_THROWS_AS(gated_confounder_fixture(1), Error);
}

TEST_CASE("xor cancellation fixture and backdoor adjustment") {
  SemModel sem = xor_cancellation_fixture(0.99);
  JointTable obs = sem.observed_joint();
  JointTable adj = adjustment_eval(obs, {"A"}, {"B"}, {"D"}, {{"C", 0}}, {"X"});
  CHECK(adj.total() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mutual_info(adj, {"A"}, {"B"}) ==
        doctest::Approx(1.0 - binary_entropy(0.99)).epsilon(1e-9));
  CHECK(entropy(adj, {"D"}) == doctest::Approx(binary_entropy(0.99)).epsilon(1e-9));

  // maximum-entropy noise destroys the correlation entirely
  JointTable flat = adjustment_eval(xor_cancellation_fixture(0.5).observed_joint(),
                                    {"A"}, {"B"}, {"D"}, {{"C", 0}}, {"X"});
  CHECK(mutual_info(flat, {"A"}, {"B"}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(xor_cancellation_fixture(0.4), Error);
  CHECK_THROWS_AS(xor_cancellation_fixture(1.0), Error);
}

TEST_CASE("adjustment matches the do-operator where it is valid") {
  std::mt19937_64 rng(17);
  for (auto variant : {fixtures::AdjustmentVariant::kPlain,
                       fixtures::AdjustmentVariant::kMediatorConfounded}) {
    Dag g = fixtures::adjustment_graph(variant);
    for (int i = 0; i < 10; ++i) {
      SemModel sem = random_sem(g, 2, 1000 + i);
      JointTable obs = sem.observed_joint();
      for (Value cval : {0, 1}) {
        JointTable px = marginal(obs, {"X"});
        JointTable pcx = marginal(obs, {"C", "X"});
        bool supported = true;
        px.for_each([&](const std::vector<Value>& v, double p) {
          if (p > 0.0 && pcx.prob({{"C", cval}, {"X", v[0]}}) <= 0.0) supported = false;
        });
        if (!supported) continue;
        JointTable adj = adjustment_eval(obs, {"A"}, {"B"}, {"D"}, {{"C", cval}}, {"X"});
        JointTable doc =
            marginal(intervene(sem, {{"C", cval}}).observed_joint(), {"A", "B", "D"});
        adj.for_each([&](const std::vector<Value>& v, double p) {
          Assignment cell{{"A", v[0]}, {"B", v[1]}, {"D", v[2]}};
          CHECK(doc.prob(cell) == doctest::Approx(p).epsilon(1e-9));
        });
      }
    }
  }
}

TEST_CASE("adjustment rejects zero propensities") {
  Dag g({{"C", true}, {"X", true}, {"B", true}}, {{"X", "C"}, {"C", "B"}});
  SemBuilder b(g);
  b.domain("X", {0, 1}).noise("X", {{0, 0.5}, {1, 0.5}});
  b.mech("X", [](const Assignment&, Value n) { return n; });
  b.domain("C", {0, 1}).noise("C", {{0, 1.0}});
  b.mech("C", [](const Assignment& pa, Value) { return pa.at("X"); });
  b.domain("B", {0, 1}).noise("B", {{0, 1.0}});
  b.mech("B", [](const Assignment& pa, Value) { return pa.at("C"); });
  JointTable t = b.build().joint();
  CHECK_THROWS_AS(adjustment_eval(t, {"B"}, {}, {}, {{"C", 0}}, {"X"}),
                  ZeroProbabilityError);
}
