#include "esep/fixtures.hpp"

namespace esep {
namespace fixtures {

Dag instrumental_graph() {
  return Dag({{"A", true}, {"B", true}, {"D", true}, {"U", false}},
             {{"A", "D"}, {"D", "B"}, {"U", "D"}, {"U", "B"}});
}

Dag gated_confounder_graph() {
  return Dag({{"A", true}, {"B", true}, {"D", true}, {"U1", false}, {"U2", false}},
             {{"U1", "D"}, {"U2", "D"}, {"U1", "A"}, {"U2", "B"}, {"D", "A"}, {"D", "B"}});
}

Dag mediated_chain_graph(bool direct_link) {
  std::vector<std::pair<std::string, std::string>> edges = {
      {"A", "X"}, {"X", "Y"}, {"Y", "Z"}, {"U", "Y"}, {"U", "Z"}};
  if (direct_link) edges.push_back({"X", "Z"});
  return Dag({{"A", true}, {"X", true}, {"Y", true}, {"Z", true}, {"U", false}},
             std::move(edges));
}

Dag timeseries_graph(bool direct_effect) {
  std::vector<std::pair<std::string, std::string>> edges = {
      {"Y1", "Y2"}, {"Y2", "Y3"}, {"Y3", "Y4"}, {"Y5", "Y3"},
      {"U1", "Y2"}, {"U1", "Y5"}, {"U2", "Y5"}, {"U2", "Y4"},
      {"U3", "Y3"}, {"U3", "Y4"}};
  if (direct_effect) edges.push_back({"Y1", "Y4"});
  return Dag({{"Y1", true},
              {"Y2", true},
              {"Y3", true},
              {"Y4", true},
              {"Y5", true},
              {"U1", false},
              {"U2", false},
              {"U3", false}},
             std::move(edges));
}

Dag confounded_pair_graph(bool direct_effect) {
  std::vector<std::pair<std::string, std::string>> edges = {{"U", "X"}, {"U", "Y"}};
  if (direct_effect) edges.push_back({"X", "Y"});
  return Dag({{"X", true}, {"Y", true}, {"U", false}}, std::move(edges));
}

Dag adjustment_graph(AdjustmentVariant variant) {
  std::vector<NodeDecl> nodes = {{"A", true}, {"B", true}, {"C", true},
                                 {"D", true}, {"X", true}, {"U2", false}};
  std::vector<std::pair<std::string, std::string>> edges = {
      {"U2", "X"}, {"U2", "A"}, {"X", "C"}, {"X", "D"},
      {"C", "D"},  {"C", "B"},  {"D", "B"}};
  if (variant != AdjustmentVariant::kPlain) {
    nodes.push_back({"U3", false});
    if (variant == AdjustmentVariant::kTreatmentConfounded) {
      edges.push_back({"U3", "C"});
    } else {
      edges.push_back({"U3", "D"});
    }
    edges.push_back({"U3", "B"});
  }
  return Dag(std::move(nodes), std::move(edges));
}

SemModel null_ace_sem() {
  Dag g({{"X", true}, {"Y", true}}, {{"X", "Y"}});
  SemBuilder b(g);
  b.domain("X", {0, 1}).noise("X", {{0, 0.5}, {1, 0.5}});
  b.mech("X", [](const Assignment&, Value noise) { return noise; });
  b.domain("Y", {0, 1, 2}).noise("Y", {{0, 0.5}, {2, 0.5}});
  b.mech("Y", [](const Assignment& pa, Value noise) {
    return pa.at("X") == 1 ? 1 : noise;
  });
  return b.build();
}

}  // namespace fixtures
}  // namespace esep
