#include "esep/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace esep {

namespace {

double clamp_bits(double x) { return x < 0.0 ? 0.0 : x; }

// Calls fn(γ) for every assignment of the variables in c with P(γ) > 0.
void for_each_supported(const JointTable& t, const VarSet& c,
                        const std::function<void(const Assignment&)>& fn) {
  JointTable m = marginal(t, c);
  m.for_each([&](const std::vector<Value>& vals, double p) {
    if (p <= 0.0) return;
    Assignment gamma;
    for (std::size_t i = 0; i < m.variables().size(); ++i) {
      gamma.set(m.variables()[i], vals[i]);
    }
    fn(gamma);
  });
}

void require_vars(const JointTable& t, const VarSet& s) {
  for (const auto& n : s) {
    if (t.var_index(n) < 0) throw Error("unknown variable: " + n);
  }
}

}  // namespace

std::string tier_name(Tier t) {
  switch (t) {
    case Tier::kBase:
      return "base";
    case Tier::kCClear:
      return "c-clear";
    case Tier::kAClear:
      return "a-clear";
  }
  throw Error("unknown tier");
}

VarSet EntropicConstraint::lhs_b() const {
  VarSet other = swapped ? source.a : source.b;
  return tier == Tier::kAClear ? other.unite(source.d) : other;
}

VarSet EntropicConstraint::lhs_given() const {
  return tier == Tier::kAClear ? source.c : source.c.unite(source.d);
}

VarSet EntropicConstraint::rhs_given() const {
  return tier == Tier::kBase ? VarSet{} : source.c;
}

std::string EntropicConstraint::pretty() const {
  auto group = [&](const VarSet& c, const VarSet& d) {
    std::string out;
    if (!c.empty()) out += c.joined() + (pointwise ? "=γ" : "");
    if (!d.empty()) {
      if (!out.empty()) out += ",";
      out += d.joined();
    }
    return out;
  };
  std::string cond =
      tier == Tier::kAClear ? group(source.c, {}) : group(source.c, source.d);
  std::string lhs = "I(" + lhs_a().joined() + ":" + lhs_b().joined() +
                    (cond.empty() ? "" : "|" + cond) + ")";
  std::string rcond = group(rhs_given(), {});
  std::string rhs = "H(" + rhs_d().joined() + (rcond.empty() ? "" : "|" + rcond) + ")";
  return lhs + " <= " + rhs;
}

std::vector<EntropicConstraint> derive(const Dag& g, const EsepRelation& rel) {
  rel.validate(g);
  if (!e_separated(g, rel)) {
    throw Error("relation is not an e-separation in this graph");
  }
  VarSet dd = descendants(g, rel.d);
  bool c_clear = dd.intersect(rel.c).empty();
  bool a_ok = c_clear && dd.intersect(rel.a).empty();
  bool b_ok = c_clear && dd.intersect(rel.b).empty();
  bool a_clear = a_ok || b_ok;
  bool swapped = !a_ok && b_ok;

  std::vector<EntropicConstraint> out;
  out.push_back({rel, Tier::kBase, false, c_clear, false});
  if (c_clear && !rel.c.empty()) {
    // With empty c the c-clear forms coincide with the base inequality.
    out.push_back({rel, Tier::kCClear, false, a_clear, false});
    out.push_back({rel, Tier::kCClear, true, a_clear, false});
  }
  if (a_clear) {
    out.push_back({rel, Tier::kAClear, false, false, swapped});
    if (!rel.c.empty()) out.push_back({rel, Tier::kAClear, true, false, swapped});
  }
  return out;
}

ConstraintReport evaluate(const JointTable& t, const EntropicConstraint& k, double eps) {
  require_vars(t, k.source.a.unite(k.source.b).unite(k.source.c).unite(k.source.d));
  ConstraintReport r;
  r.constraint = k;

  auto rhs_of = [&](const JointTable& tab) {
    return k.source.d.empty() ? 0.0 : clamp_bits(entropy(tab, k.source.d));
  };
  auto lhs_of = [&](const JointTable& tab, const VarSet& residual_given) {
    return clamp_bits(cond_mutual_info(tab, k.lhs_a(), k.lhs_b(), residual_given));
  };

  if (!k.pointwise || k.source.c.empty()) {
    r.lhs_bits = clamp_bits(cond_mutual_info(t, k.lhs_a(), k.lhs_b(), k.lhs_given()));
    if (k.source.d.empty()) {
      r.rhs_bits = 0.0;
    } else if (k.rhs_given().empty()) {
      r.rhs_bits = clamp_bits(entropy(t, k.source.d));
    } else {
      r.rhs_bits = clamp_bits(cond_entropy(t, k.source.d, k.source.c));
    }
    r.slack = r.rhs_bits - r.lhs_bits;
  } else {
    bool first = true;
    VarSet residual = k.tier == Tier::kAClear ? VarSet{} : k.source.d;
    for_each_supported(t, k.source.c, [&](const Assignment& gamma) {
      JointTable sub = condition(t, gamma);
      double lhs = lhs_of(sub, residual);
      double rhs = rhs_of(sub);
      double slack = rhs - lhs;
      if (first || slack < r.slack) {
        first = false;
        r.lhs_bits = lhs;
        r.rhs_bits = rhs;
        r.slack = slack;
        r.worst_value = gamma;
      }
    });
  }
  r.satisfied = r.slack >= -eps;
  return r;
}

std::vector<ConstraintReport> check_all(const Dag& g, const JointTable& t,
                                        EsepCaps caps, double eps) {
  require_vars(t, g.observed_nodes());
  std::vector<ConstraintReport> out;
  for (const auto& entry : enumerate_esep(g, caps, /*observed_only=*/true)) {
    for (const auto& k : derive(g, entry.rel)) {
      out.push_back(evaluate(t, k, eps));
    }
  }
  return out;
}

bool implies(const EntropicConstraint& stronger, const EntropicConstraint& weaker) {
  return stronger.tier == weaker.tier && stronger.pointwise == weaker.pointwise &&
         stronger.source.c == weaker.source.c && stronger.source.d == weaker.source.d &&
         ((weaker.lhs_a().subset_of(stronger.lhs_a()) &&
           weaker.lhs_b().subset_of(stronger.lhs_b())) ||
          (weaker.lhs_a().subset_of(stronger.lhs_b()) &&
           weaker.lhs_b().subset_of(stronger.lhs_a())));
}

LatentEntropyBound latent_entropy_bound(const JointTable& t, const VarSet& a,
                                        const VarSet& b, const VarSet& c) {
  if (a.empty() || b.empty()) throw Error("endpoint sets must be nonempty");
  if (!a.disjoint_with(b) || !a.disjoint_with(c) || !b.disjoint_with(c)) {
    throw Error("variable sets overlap");
  }
  require_vars(t, a.unite(b).unite(c));
  LatentEntropyBound out;
  if (c.empty()) {
    double i = clamp_bits(mutual_info(t, a, b));
    out.per_value.push_back({Assignment{}, i});
    out.max_bits = i;
    out.averaged_bits = i;
    return out;
  }
  for_each_supported(t, c, [&](const Assignment& gamma) {
    double i = clamp_bits(pointwise_cmi(t, a, b, gamma));
    out.per_value.push_back({gamma, i});
    out.max_bits = std::max(out.max_bits, i);
  });
  out.averaged_bits = clamp_bits(cond_mutual_info(t, a, b, c));
  return out;
}

LatentCardinalityBound latent_cardinality_bound(const JointTable& t, const VarSet& a,
                                                const VarSet& b, const VarSet& c) {
  LatentEntropyBound h = latent_entropy_bound(t, a, b, c);
  LatentCardinalityBound out;
  out.bound = std::exp2(h.max_bits);
  out.ceiling = static_cast<long long>(std::ceil(out.bound - 1e-9));
  return out;
}

}  // namespace esep
