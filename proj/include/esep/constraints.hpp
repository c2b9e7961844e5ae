#pragma once

#include <optional>
#include <string>
#include <vector>

#include "esep/dist.hpp"
#include "esep/graph.hpp"

namespace esep {

// Strength tier of a derived inequality, decided by descendant structure.
enum class Tier { kBase, kCClear, kAClear };

std::string tier_name(Tier t);

/// One symbolic inequality induced by a bottleneck relation:
///   base:    I(a:b | c,d)      <= H(d)
///   c-clear: I(a:b | c,d)      <= H(d|c)    (averaged or per c-value)
///   a-clear: I(a : b∪d | c)    <= H(d|c)    (averaged or per c-value)
struct EntropicConstraint {
  EsepRelation source;
  Tier tier = Tier::kBase;
  bool pointwise = false;  // per-value-of-c form
  bool subsumed = false;   // a strictly stronger sibling was also derived
  bool swapped = false;    // roles of source.a and source.b exchanged

  VarSet lhs_a() const { return swapped ? source.b : source.a; }
  VarSet lhs_b() const;     // opposite side, plus d for the a-clear tier
  VarSet lhs_given() const; // c∪d below a-clear, c at a-clear
  VarSet rhs_d() const { return source.d; }
  VarSet rhs_given() const; // empty for base, c otherwise

  std::string pretty() const;  // e.g. "I(A:B|C,D) <= H(D|C)"

  friend auto operator<=>(const EntropicConstraint&, const EntropicConstraint&) = default;
};

struct ConstraintReport {
  EntropicConstraint constraint;
  double lhs_bits = 0.0;
  double rhs_bits = 0.0;
  double slack = 0.0;  // rhs - lhs; most violated c value for pointwise forms
  bool satisfied = true;
  // Worst supported c value of a pointwise constraint; unsupported values are
  // skipped.
  std::optional<Assignment> worst_value;
};

// All Theorem-tier inequalities for an e-separation relation. Weaker tiers are
// kept but flagged subsumed when a stronger one applies.
std::vector<EntropicConstraint> derive(const Dag& g, const EsepRelation& rel);

ConstraintReport evaluate(const JointTable& t, const EntropicConstraint& k,
                          double eps = 1e-9);

// enumerate_esep + derive + evaluate, in deterministic order.
std::vector<ConstraintReport> check_all(const Dag& g, const JointTable& t,
                                        EsepCaps caps = {}, double eps = 1e-9);

// True when satisfying `stronger` logically forces `weaker`: same tier and
// form, same conditioning and bottleneck sets, and the weaker side sets are
// contained in the stronger ones.
bool implies(const EntropicConstraint& stronger, const EntropicConstraint& weaker);

/// Lower bounds on the entropy of any latent variable that, together with c,
/// separates a from b.
struct LatentEntropyBound {
  std::vector<std::pair<Assignment, double>> per_value;  // I(a:b|c=γ), supported γ
  double max_bits = 0.0;
  double averaged_bits = 0.0;  // I(a:b|c), the weaker averaged bound
};

LatentEntropyBound latent_entropy_bound(const JointTable& t, const VarSet& a,
                                        const VarSet& b, const VarSet& c);

struct LatentCardinalityBound {
  double bound = 1.0;       // 2^max_bits
  long long ceiling = 1;
};

LatentCardinalityBound latent_cardinality_bound(const JointTable& t, const VarSet& a,
                                                const VarSet& b, const VarSet& c);

}  // namespace esep
