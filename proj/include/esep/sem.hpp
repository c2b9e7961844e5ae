#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "esep/dist.hpp"
#include "esep/graph.hpp"

namespace esep {

inline constexpr std::size_t kDefaultStateCap = 10'000'000;

struct NoiseDist {
  std::vector<Value> values;
  std::vector<double> probs;
};

// Mechanism callback: parent assignment plus noise value -> node value.
using MechFn = std::function<Value(const Assignment&, Value)>;

/// Structural equation model over finite domains: per-node noise
/// distributions and total mechanism tables. Immutable once built.
class SemModel {
 public:
  const Dag& dag() const { return dag_; }
  const std::vector<Value>& domain(const std::string& node) const;
  const NoiseDist& noise(const std::string& node) const;
  const std::vector<std::string>& mech_parents(const std::string& node) const;
  Value mech_value(const std::string& node, const Assignment& parent_values,
                   Value noise_value) const;

  // Calls fn(parent_assignment, noise_value, node_value) for every mechanism row.
  void for_each_mech_row(
      const std::string& node,
      const std::function<void(const Assignment&, Value, Value)>& fn) const;

  // Exact joint over all nodes by enumerating noise configurations.
  JointTable joint(std::size_t state_cap = kDefaultStateCap) const;
  // Joint with latent-marked nodes summed out.
  JointTable observed_joint(std::size_t state_cap = kDefaultStateCap) const;

 private:
  friend class SemBuilder;
  friend SemModel intervene(const SemModel&, const Assignment&);

  int node_index(const std::string& node) const;
  std::size_t mech_index(int node, const std::vector<std::size_t>& parent_value_idx,
                         std::size_t noise_idx) const;

  Dag dag_{{}, {}};
  std::vector<std::vector<Value>> domains_;           // per node, sorted
  std::vector<NoiseDist> noises_;                     // per node
  std::vector<std::vector<std::string>> mech_parents_;  // sorted parent names
  std::vector<std::vector<Value>> mech_table_;  // mixed radix: parents then noise
};

class SemBuilder {
 public:
  explicit SemBuilder(Dag dag);

  SemBuilder& domain(const std::string& node, std::vector<Value> values);
  SemBuilder& noise(const std::string& node,
                    std::vector<std::pair<Value, double>> dist);
  SemBuilder& mech(const std::string& node, MechFn fn);
  // Mechanism table given directly, one value per (parent assignment, noise) row.
  SemBuilder& mech_table(const std::string& node, std::vector<Value> table);
  SemBuilder& constant(const std::string& node, Value v);

  SemModel build() const;

 private:
  Dag dag_;
  std::vector<std::vector<Value>> domains_;
  std::vector<NoiseDist> noises_;
  std::vector<MechFn> fns_;
  std::vector<std::vector<Value>> tables_;
  std::vector<bool> has_table_;
};

// Replaces each assigned node's mechanism with the constant and cuts its
// incoming edges.
SemModel intervene(const SemModel& sem, const Assignment& on);

// Reproducible random mechanisms and full-support noises, all domains of the
// given size.
SemModel random_sem(const Dag& g, int domain_size, std::uint64_t seed);

// SEM in which every non-collider along the path is a uniform bit and,
// conditional on all in-path colliders taking the value 1, the endpoints are
// perfectly correlated. `colliders` must list exactly the in-path colliders.
SemModel path_witness(const Dag& g, const std::vector<std::string>& path,
                      const VarSet& colliders);

// SEM Markov to g whose observed joint violates the bottleneck inequality for
// a relation that is NOT an e-separation: the open path carries one bit while
// every node in rel.d is an ignored, heavily biased coin.
SemModel violation_witness(const Dag& g, const EsepRelation& rel, double d_bias);

// Gated-confounder model: two latent confounders with values 1..u_domain_size,
// a binary gate D that detects agreement, and endpoints that reveal their
// confounder only when the gate is open. Gives H(D) < I(A:B).
SemModel gated_confounder_fixture(int u_domain_size);

// XOR-cancellation model on the confounded adjustment graph: applying the
// backdoor formula for do(C) to its observed joint yields a strongly
// correlated (A,B) pair next to a near-deterministic D.
SemModel xor_cancellation_fixture(double eps_bias);

// Backdoor adjustment sum_x P(a,b,c,d,x) / P(c|x) as a table over a∪b∪d.
JointTable adjustment_eval(const JointTable& t, const VarSet& a, const VarSet& b,
                           const VarSet& d, const Assignment& c_assign,
                           const VarSet& x);

}  // namespace esep
