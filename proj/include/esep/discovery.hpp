#pragma once

#include <map>
#include <string>
#include <vector>

#include "esep/constraints.hpp"
#include "esep/dist.hpp"
#include "esep/graph.hpp"

namespace esep {

struct EqualityCheck {
  VarSet a, b, c;  // d-separation a ⊥ b | c in the candidate graph
  double cmi_bits = 0.0;
  bool pass = true;
};

struct CardinalityCheck {
  std::string latent;  // declared-size latent node
  long long declared = 0;
  double required_bits = 0.0;  // max-over-values mutual information bound
  long long required = 0;      // its cardinality ceiling
  bool pass = true;
};

struct ModelVerdict {
  std::string graph_id;
  std::vector<EqualityCheck> equalities;
  std::vector<ConstraintReport> inequalities;
  std::vector<CardinalityCheck> cardinalities;
  bool falsified = false;
  double worst_violation = 0.0;  // bits; 0 when nothing fails
};

/// A candidate model: a graph, a display id, and optional declared latent
/// cardinalities enabling the counting bound.
struct Candidate {
  std::string id;
  Dag graph;
  std::map<std::string, long long> latent_cards;
};

// Every observed-only d-separation within the caps, tested as an exact
// conditional-independence equality at eps_eq.
std::vector<EqualityCheck> ci_check(const Dag& g, const JointTable& t,
                                    EsepCaps caps = {}, double eps_eq = 1e-9);

// Equality + inequality (+ cardinality, when declared) screening of each
// candidate; verdicts sorted worst-first by (falsified, worst violation).
std::vector<ModelVerdict> compare(const std::vector<Candidate>& candidates,
                                  const JointTable& t, EsepCaps caps = {},
                                  double eps_eq = 1e-9, double eps_ineq = 1e-9);

}  // namespace esep
