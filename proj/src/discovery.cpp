#include "esep/discovery.hpp"

#include <algorithm>
#include <cmath>

namespace esep {

namespace {

// All subsets of pool with size <= cap (including the empty set), in
// lexicographic order.
std::vector<VarSet> subsets_up_to(const std::vector<std::string>& pool, int cap) {
  std::vector<VarSet> out{VarSet{}};
  std::vector<std::vector<std::string>> frontier{{}};
  for (int s = 1; s <= cap && s <= static_cast<int>(pool.size()); ++s) {
    std::vector<std::vector<std::string>> next;
    for (const auto& base : frontier) {
      std::size_t from = 0;
      if (!base.empty()) {
        from = std::find(pool.begin(), pool.end(), base.back()) - pool.begin() + 1;
      }
      for (std::size_t i = from; i < pool.size(); ++i) {
        auto ext = base;
        ext.push_back(pool[i]);
        out.push_back(VarSet(ext));
        next.push_back(std::move(ext));
      }
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<EqualityCheck> ci_check(const Dag& g, const JointTable& t, EsepCaps caps,
                                    double eps_eq) {
  if (caps.a < 1 || caps.b < 1) throw Error("endpoint caps must be at least 1");
  for (const auto& n : g.observed_nodes()) {
    if (t.var_index(n) < 0) throw Error("unknown variable: " + n);
  }
  std::vector<std::string> pool = g.observed_nodes().names();
  std::vector<EqualityCheck> out;
  for (const auto& a : subsets_up_to(pool, caps.a)) {
    if (a.empty()) continue;
    for (const auto& b : subsets_up_to(pool, caps.b)) {
      if (b.empty() || !(a < b) || !a.disjoint_with(b)) continue;
      for (const auto& c : subsets_up_to(pool, caps.c)) {
        if (!c.disjoint_with(a) || !c.disjoint_with(b)) continue;
        if (!d_separated(g, a, b, c)) continue;
        EqualityCheck chk;
        chk.a = a;
        chk.b = b;
        chk.c = c;
        chk.cmi_bits = std::max(cond_mutual_info(t, a, b, c), 0.0);
        chk.pass = chk.cmi_bits <= eps_eq;
        out.push_back(std::move(chk));
      }
    }
  }
  return out;
}

std::vector<ModelVerdict> compare(const std::vector<Candidate>& candidates,
                                  const JointTable& t, EsepCaps caps, double eps_eq,
                                  double eps_ineq) {
  for (const auto& cand : candidates) {
    if (cand.graph.observed_nodes() != t.variable_set()) {
      throw Error("candidate " + cand.id +
                  " does not match the table's observed variables");
    }
  }
  std::vector<ModelVerdict> out;
  for (const auto& cand : candidates) {
    ModelVerdict v;
    v.graph_id = cand.id;
    v.equalities = ci_check(cand.graph, t, caps, eps_eq);
    v.inequalities = check_all(cand.graph, t, caps, eps_ineq);
    std::vector<std::string> pool = cand.graph.observed_nodes().names();
    for (const auto& [latent, declared] : cand.latent_cards) {
      if (!cand.graph.has_node(latent) || cand.graph.observed(latent)) {
        throw Error("declared cardinality for a non-latent node: " + latent);
      }
      if (declared < 1) throw Error("declared cardinality below 1 for " + latent);
      for (const auto& a : subsets_up_to(pool, caps.a)) {
        if (a.empty()) continue;
        for (const auto& b : subsets_up_to(pool, caps.b)) {
          if (b.empty() || !(a < b) || !a.disjoint_with(b)) continue;
          for (const auto& c : subsets_up_to(pool, caps.c)) {
            if (!c.disjoint_with(a) || !c.disjoint_with(b)) continue;
            VarSet cu = c;
            cu.insert(latent);
            if (!d_separated(cand.graph, a, b, cu)) continue;
            CardinalityCheck chk;
            chk.latent = latent;
            chk.declared = declared;
            chk.required_bits = latent_entropy_bound(t, a, b, c).max_bits;
            chk.required = latent_cardinality_bound(t, a, b, c).ceiling;
            chk.pass = std::log2(static_cast<double>(declared)) + 1e-9 >=
                       chk.required_bits;
            v.cardinalities.push_back(std::move(chk));
          }
        }
      }
    }
    for (const auto& e : v.equalities) {
      if (!e.pass) {
        v.falsified = true;
        v.worst_violation = std::max(v.worst_violation, e.cmi_bits);
      }
    }
    for (const auto& r : v.inequalities) {
      if (!r.satisfied) {
        v.falsified = true;
        v.worst_violation = std::max(v.worst_violation, -r.slack);
      }
    }
    for (const auto& cc : v.cardinalities) {
      if (!cc.pass) {
        v.falsified = true;
        v.worst_violation = std::max(
            v.worst_violation,
            cc.required_bits - std::log2(static_cast<double>(cc.declared)));
      }
    }
    out.push_back(std::move(v));
  }
  std::stable_sort(out.begin(), out.end(), [](const ModelVerdict& l, const ModelVerdict& r) {
    if (l.falsified != r.falsified) return l.falsified;
    return l.worst_violation > r.worst_violation;
  });
  return out;
}

}  // namespace esep
