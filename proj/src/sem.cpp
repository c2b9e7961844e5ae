#include "esep/sem.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <set>

namespace esep {

namespace {

std::size_t checked_product(const std::vector<std::size_t>& sizes, std::size_t cap,
                            const char* what) {
  std::size_t total = 1;
  for (std::size_t s : sizes) {
    if (s == 0) return 0;
    if (total > cap / s) {
      throw Error(std::string(what) + " exceeds the state cap");
    }
    total *= s;
  }
  return total;
}

}  // namespace

int SemModel::node_index(const std::string& node) const {
  int i = dag_.index_of(node);
  if (i < 0) throw Error("unknown node: " + node);
  return i;
}

const std::vector<Value>& SemModel::domain(const std::string& node) const {
  return domains_[node_index(node)];
}

const NoiseDist& SemModel::noise(const std::string& node) const {
  return noises_[node_index(node)];
}

const std::vector<std::string>& SemModel::mech_parents(const std::string& node) const {
  return mech_parents_[node_index(node)];
}

std::size_t SemModel::mech_index(int node, const std::vector<std::size_t>& parent_value_idx,
                                 std::size_t noise_idx) const {
  std::size_t flat = 0;
  const auto& pars = mech_parents_[node];
  for (std::size_t p = 0; p < pars.size(); ++p) {
    flat = flat * domains_[node_index(pars[p])].size() + parent_value_idx[p];
  }
  return flat * noises_[node].values.size() + noise_idx;
}

Value SemModel::mech_value(const std::string& node, const Assignment& parent_values,
                           Value noise_value) const {
  int i = node_index(node);
  const auto& pars = mech_parents_[i];
  std::vector<std::size_t> pidx(pars.size());
  for (std::size_t p = 0; p < pars.size(); ++p) {
    const auto& dom = domains_[node_index(pars[p])];
    Value v = parent_values.at(pars[p]);
    auto it = std::lower_bound(dom.begin(), dom.end(), v);
    if (it == dom.end() || *it != v) {
      throw Error("value " + std::to_string(v) + " outside the domain of " + pars[p]);
    }
    pidx[p] = static_cast<std::size_t>(it - dom.begin());
  }
  const auto& nv = noises_[i].values;
  auto nit = std::lower_bound(nv.begin(), nv.end(), noise_value);
  if (nit == nv.end() || *nit != noise_value) {
    throw Error("noise value " + std::to_string(noise_value) + " not declared for " + node);
  }
  return mech_table_[i][mech_index(i, pidx, static_cast<std::size_t>(nit - nv.begin()))];
}

void SemModel::for_each_mech_row(
    const std::string& node,
    const std::function<void(const Assignment&, Value, Value)>& fn) const {
  int i = node_index(node);
  const auto& pars = mech_parents_[i];
  std::vector<std::size_t> pidx(pars.size(), 0);
  bool more = true;
  while (more) {
    Assignment pa;
    for (std::size_t p = 0; p < pars.size(); ++p) {
      pa.set(pars[p], domains_[node_index(pars[p])][pidx[p]]);
    }
    for (std::size_t n = 0; n < noises_[i].values.size(); ++n) {
      fn(pa, noises_[i].values[n], mech_table_[i][mech_index(i, pidx, n)]);
    }
    more = false;
    for (std::size_t p = pars.size(); p-- > 0;) {
      if (++pidx[p] < domains_[node_index(pars[p])].size()) {
        more = true;
        break;
      }
      pidx[p] = 0;
    }
  }
}

JointTable SemModel::joint(std::size_t state_cap) const {
  std::vector<std::string> vars;
  std::vector<std::vector<Value>> doms;
  for (const auto& nd : dag_.node_decls()) {
    vars.push_back(nd.name);
    doms.push_back(domains_[dag_.index_of(nd.name)]);
  }
  JointTable out(vars, doms);

  std::vector<std::size_t> sizes;
  for (const auto& n : noises_) sizes.push_back(n.values.size());
  checked_product(sizes, state_cap, "noise configuration count");

  std::vector<int> topo;
  for (const auto& name : dag_.topo_order()) topo.push_back(dag_.index_of(name));

  std::size_t n = dag_.node_count();
  std::vector<std::size_t> noise_idx(n, 0);
  std::vector<Value> value(n);
  bool more = true;
  while (more) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) p *= noises_[i].probs[noise_idx[i]];
    if (p > 0.0) {
      Assignment full;
      for (int i : topo) {
        Assignment pa;
        for (const auto& par : mech_parents_[i]) {
          pa.set(par, value[dag_.index_of(par)]);
        }
        value[i] = mech_value(dag_.name_of(i), pa, noises_[i].values[noise_idx[i]]);
        full.set(dag_.name_of(i), value[i]);
      }
      out.add_prob(full, p);
    }
    more = false;
    for (std::size_t i = n; i-- > 0;) {
      if (++noise_idx[i] < noises_[i].values.size()) {
        more = true;
        break;
      }
      noise_idx[i] = 0;
    }
  }
  return out;
}

JointTable SemModel::observed_joint(std::size_t state_cap) const {
  JointTable full = joint(state_cap);
  VarSet obs = dag_.observed_nodes();
  if (obs.empty()) throw Error("model has no observed nodes");
  if (obs.size() == dag_.node_count()) return full;
  return marginal(full, obs);
}

SemBuilder::SemBuilder(Dag dag) : dag_(std::move(dag)) {
  std::size_t n = dag_.node_count();
  domains_.resize(n);
  noises_.resize(n);
  fns_.resize(n);
  tables_.resize(n);
  has_table_.assign(n, false);
}

SemBuilder& SemBuilder::domain(const std::string& node, std::vector<Value> values) {
  int i = dag_.index_of(node);
  if (i < 0) throw Error("unknown node: " + node);
  if (values.empty()) throw Error("empty domain for " + node);
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw Error("duplicate value in the domain of " + node);
  }
  domains_[i] = std::move(values);
  return *this;
}

SemBuilder& SemBuilder::noise(const std::string& node,
                              std::vector<std::pair<Value, double>> dist) {
  int i = dag_.index_of(node);
  if (i < 0) throw Error("unknown node: " + node);
  if (dist.empty()) throw Error("empty noise distribution for " + node);
  std::sort(dist.begin(), dist.end());
  NoiseDist nd;
  double total = 0.0;
  for (const auto& [v, p] : dist) {
    if (!nd.values.empty() && nd.values.back() == v) {
      throw Error("duplicate noise value for " + node);
    }
    if (p < 0.0) throw Error("negative noise probability for " + node);
    nd.values.push_back(v);
    nd.probs.push_back(p);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error("noise probabilities for " + node + " sum to " + std::to_string(total));
  }
  noises_[i] = std::move(nd);
  return *this;
}

SemBuilder& SemBuilder::mech(const std::string& node, MechFn fn) {
  int i = dag_.index_of(node);
  if (i < 0) throw Error("unknown node: " + node);
  fns_[i] = std::move(fn);
  has_table_[i] = false;
  return *this;
}

SemBuilder& SemBuilder::mech_table(const std::string& node, std::vector<Value> table) {
  int i = dag_.index_of(node);
  if (i < 0) throw Error("unknown node: " + node);
  tables_[i] = std::move(table);
  has_table_[i] = true;
  return *this;
}

SemBuilder& SemBuilder::constant(const std::string& node, Value v) {
  domain(node, {v});
  noise(node, {{0, 1.0}});
  return mech(node, [v](const Assignment&, Value) { return v; });
}

SemModel SemBuilder::build() const {
  SemModel m;
  m.dag_ = dag_;
  std::size_t n = dag_.node_count();
  m.domains_.resize(n);
  m.noises_.resize(n);
  m.mech_parents_.resize(n);
  m.mech_table_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = dag_.node_decls()[i].name;
    if (domains_[i].empty()) throw Error("no domain declared for " + name);
    if (noises_[i].values.empty()) throw Error("no noise declared for " + name);
    if (!has_table_[i] && !fns_[i]) throw Error("no mechanism declared for " + name);
    m.domains_[i] = domains_[i];
    m.noises_[i] = noises_[i];
    auto pars = dag_.parents(name);
    std::sort(pars.begin(), pars.end());
    m.mech_parents_[i] = pars;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = dag_.node_decls()[i].name;
    const auto& pars = m.mech_parents_[i];
    std::vector<std::size_t> sizes;
    for (const auto& p : pars) sizes.push_back(m.domains_[dag_.index_of(p)].size());
    sizes.push_back(m.noises_[i].values.size());
    std::size_t rows = checked_product(sizes, kDefaultStateCap, "mechanism table");
    if (has_table_[i]) {
      if (tables_[i].size() != rows) {
        throw Error("mechanism table for " + name + " has " +
                    std::to_string(tables_[i].size()) + " rows, expected " +
                    std::to_string(rows));
      }
      m.mech_table_[i] = tables_[i];
    } else {
      m.mech_table_[i].reserve(rows);
      std::vector<std::size_t> pidx(pars.size(), 0);
      bool more = true;
      while (more) {
        Assignment pa;
        for (std::size_t p = 0; p < pars.size(); ++p) {
          pa.set(pars[p], m.domains_[dag_.index_of(pars[p])][pidx[p]]);
        }
        for (Value nv : m.noises_[i].values) {
          m.mech_table_[i].push_back(fns_[i](pa, nv));
        }
        more = false;
        for (std::size_t p = pars.size(); p-- > 0;) {
          if (++pidx[p] < m.domains_[dag_.index_of(pars[p])].size()) {
            more = true;
            break;
          }
          pidx[p] = 0;
        }
      }
    }
    const auto& dom = m.domains_[i];
    for (Value v : m.mech_table_[i]) {
      if (!std::binary_search(dom.begin(), dom.end(), v)) {
        throw Error("mechanism for " + name + " produced the out-of-domain value " +
                    std::to_string(v));
      }
    }
  }
  return m;
}

SemModel intervene(const SemModel& sem, const Assignment& on) {
  if (on.empty()) return sem;
  SemModel out = sem;
  out.dag_ = mutilate(sem.dag(), on.variables());
  for (const auto& [name, v] : on) {
    int i = out.node_index(name);
    const auto& dom = out.domains_[i];
    if (!std::binary_search(dom.begin(), dom.end(), v)) {
      throw Error("value " + std::to_string(v) + " outside the domain of " + name);
    }
    out.mech_parents_[i].clear();
    out.noises_[i] = NoiseDist{{0}, {1.0}};
    out.mech_table_[i] = {v};
  }
  return out;
}

SemModel random_sem(const Dag& g, int domain_size, std::uint64_t seed) {
  if (domain_size < 2) throw Error("domain size must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  std::uniform_int_distribution<int> pick(0, domain_size - 1);
  SemBuilder b(g);
  std::vector<Value> dom;
  for (int v = 0; v < domain_size; ++v) dom.push_back(v);
  for (const auto& nd : g.node_decls()) {
    b.domain(nd.name, dom);
    std::vector<double> w(domain_size);
    double total = 0.0;
    for (double& x : w) {
      x = mass(rng);
      total += x;
    }
    std::vector<std::pair<Value, double>> dist;
    double acc = 0.0;
    for (int v = 0; v < domain_size; ++v) {
      double p = (v + 1 == domain_size) ? 1.0 - acc : w[v] / total;
      acc += p;
      dist.push_back({v, p});
    }
    b.noise(nd.name, dist);
    auto pars = g.parents(nd.name);
    std::sort(pars.begin(), pars.end());
    std::size_t rows = static_cast<std::size_t>(domain_size);
    for (std::size_t p = 0; p < pars.size(); ++p) rows *= domain_size;
    std::vector<Value> table(rows);
    for (Value& v : table) v = pick(rng);
    b.mech_table(nd.name, std::move(table));
  }
  return b.build();
}

namespace {

// Role of a node along an undirected path, from the direction of its in-path edges.
enum class PathRole { kSource, kRelay, kCollider };

std::vector<PathRole> classify_path(const Dag& g, const std::vector<std::string>& path) {
  if (path.size() < 2) throw Error("a path needs at least two nodes");
  std::set<std::string> seen;
  for (const auto& n : path) {
    if (g.index_of(n) < 0) throw Error("unknown node: " + n);
    if (!seen.insert(n).second) throw Error("path repeats the node " + n);
  }
  std::vector<PathRole> roles(path.size());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!g.has_edge(path[i], path[i + 1]) && !g.has_edge(path[i + 1], path[i])) {
      throw Error("no edge between " + path[i] + " and " + path[i + 1]);
    }
  }
  for (std::size_t i = 0; i < path.size(); ++i) {
    int incoming = 0;
    if (i > 0 && g.has_edge(path[i - 1], path[i])) ++incoming;
    if (i + 1 < path.size() && g.has_edge(path[i + 1], path[i])) ++incoming;
    roles[i] = incoming == 2   ? PathRole::kCollider
               : incoming == 1 ? PathRole::kRelay
                               : PathRole::kSource;
  }
  return roles;
}

// Installs the carrier mechanisms along a path: binary nodes, sources fair
// coins, relays copies, colliders the agreement indicator of their two in-path
// parents. Nodes already claimed keep their mechanisms.
void install_path_mechs(SemBuilder& b, const Dag& g, const std::vector<std::string>& path,
                        const std::vector<PathRole>& roles,
                        std::set<std::string>& claimed) {
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::string& n = path[i];
    if (!claimed.insert(n).second) continue;
    b.domain(n, {0, 1});
    switch (roles[i]) {
      case PathRole::kSource:
        b.noise(n, {{0, 0.5}, {1, 0.5}});
        b.mech(n, [](const Assignment&, Value noise) { return noise; });
        break;
      case PathRole::kRelay: {
        std::string from = (i > 0 && g.has_edge(path[i - 1], n)) ? path[i - 1] : path[i + 1];
        b.noise(n, {{0, 1.0}});
        b.mech(n, [from](const Assignment& pa, Value) { return pa.at(from); });
        break;
      }
      case PathRole::kCollider: {
        std::string left = path[i - 1], right = path[i + 1];
        b.noise(n, {{0, 1.0}});
        b.mech(n, [left, right](const Assignment& pa, Value) {
          return pa.at(left) == pa.at(right) ? 1 : 0;
        });
        break;
      }
    }
  }
}

}  // namespace

SemModel path_witness(const Dag& g, const std::vector<std::string>& path,
                      const VarSet& colliders) {
  auto roles = classify_path(g, path);
  VarSet found;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (roles[i] == PathRole::kCollider) found.insert(path[i]);
  }
  if (found != colliders) {
    throw Error("collider set {" + colliders.joined(",") +
                "} does not match the path's colliders {" + found.joined(",") + "}");
  }
  SemBuilder b(g);
  std::set<std::string> claimed;
  install_path_mechs(b, g, path, roles, claimed);
  for (const auto& nd : g.node_decls()) {
    if (!claimed.count(nd.name)) b.constant(nd.name, 0);
  }
  return b.build();
}

namespace {

// All simple undirected paths from a member of `from` to a member of `to`,
// shortest first.
std::vector<std::vector<std::string>> simple_paths(const Dag& g, const VarSet& from,
                                                   const VarSet& to) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> cur;
  std::set<std::string> on_path;
  std::function<void(const std::string&)> dfs = [&](const std::string& node) {
    cur.push_back(node);
    on_path.insert(node);
    if (cur.size() >= 2 && to.contains(node)) {
      out.push_back(cur);
    } else {
      std::vector<std::string> next = g.parents(node);
      auto ch = g.children(node);
      next.insert(next.end(), ch.begin(), ch.end());
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      for (const auto& n : next) {
        if (!on_path.count(n) && !from.contains(n)) dfs(n);
      }
    }
    on_path.erase(node);
    cur.pop_back();
  };
  for (const auto& s : from.names()) {
    if (g.index_of(s) >= 0) dfs(s);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& x, const auto& y) { return x.size() < y.size(); });
  return out;
}

// Shortest directed path from `start` to any member of `targets` avoiding
// `blocked`; empty if none. The start node itself is not returned.
std::vector<std::string> directed_chain(const Dag& g, const std::string& start,
                                        const VarSet& targets,
                                        const std::set<std::string>& blocked) {
  std::map<std::string, std::string> pred;
  std::deque<std::string> queue{start};
  std::set<std::string> visited{start};
  while (!queue.empty()) {
    std::string node = queue.front();
    queue.pop_front();
    for (const auto& ch : g.children(node)) {
      if (visited.count(ch) || blocked.count(ch)) continue;
      pred[ch] = node;
      if (targets.contains(ch)) {
        std::vector<std::string> chain;
        for (std::string cur = ch; cur != start; cur = pred[cur]) chain.push_back(cur);
        std::reverse(chain.begin(), chain.end());
        return chain;
      }
      visited.insert(ch);
      queue.push_back(ch);
    }
  }
  return {};
}

}  // namespace

SemModel violation_witness(const Dag& g, const EsepRelation& rel, double d_bias) {
  rel.validate(g);
  if (e_separated(g, rel)) {
    throw Error("relation is an e-separation; no violating distribution exists");
  }
  if (!(d_bias > 0.5 && d_bias < 1.0)) {
    throw Error("d_bias must lie strictly between 0.5 and 1");
  }
  Dag pruned = delete_nodes(g, rel.d);

  // An open path must exist: non-collider interior nodes outside c, and every
  // collider either in c or draining into c through a directed chain disjoint
  // from the path and from the other chains.
  std::vector<std::string> chosen_path;
  std::vector<PathRole> chosen_roles;
  std::vector<std::vector<std::string>> chosen_chains;
  for (const auto& path : simple_paths(pruned, rel.a, rel.b)) {
    auto roles = classify_path(pruned, path);
    bool ok = true;
    std::set<std::string> used(path.begin(), path.end());
    std::vector<std::vector<std::string>> chains;
    for (std::size_t i = 0; i < path.size() && ok; ++i) {
      if (roles[i] == PathRole::kCollider) {
        if (rel.c.contains(path[i])) continue;
        auto chain = directed_chain(pruned, path[i], rel.c, used);
        if (chain.empty() || !rel.c.contains(chain.back())) {
          ok = false;
          break;
        }
        used.insert(chain.begin(), chain.end());
        chains.push_back({path[i]});
        chains.back().insert(chains.back().end(), chain.begin(), chain.end());
      } else if (i > 0 && i + 1 < path.size() && rel.c.contains(path[i])) {
        ok = false;
      }
    }
    if (ok && (rel.c.contains(path.front()) || rel.c.contains(path.back()))) ok = false;
    if (ok) {
      chosen_path = path;
      chosen_roles = roles;
      chosen_chains = chains;
      break;
    }
  }
  if (chosen_path.empty()) {
    throw Error("no usable open path between the endpoint sets");
  }

  SemBuilder b(g);
  std::set<std::string> claimed;
  install_path_mechs(b, g, chosen_path, chosen_roles, claimed);
  for (const auto& chain : chosen_chains) {
    for (std::size_t i = 1; i < chain.size(); ++i) {
      claimed.insert(chain[i]);
      std::string from = chain[i - 1];
      b.domain(chain[i], {0, 1});
      b.noise(chain[i], {{0, 1.0}});
      b.mech(chain[i], [from](const Assignment& pa, Value) { return pa.at(from); });
    }
  }
  for (const auto& name : rel.d.names()) {
    claimed.insert(name);
    b.domain(name, {0, 1});
    b.noise(name, {{0, d_bias}, {1, 1.0 - d_bias}});
    b.mech(name, [](const Assignment&, Value noise) { return noise; });
  }
  for (const auto& nd : g.node_decls()) {
    if (!claimed.count(nd.name)) b.constant(nd.name, 0);
  }
  return b.build();
}

SemModel gated_confounder_fixture(int u_domain_size) {
  if (u_domain_size < 2) throw Error("confounder domain size must be at least 2");
  Dag g({{"A", true}, {"B", true}, {"D", true}, {"U1", false}, {"U2", false}},
        {{"U1", "D"}, {"U2", "D"}, {"U1", "A"}, {"U2", "B"}, {"D", "A"}, {"D", "B"}});
  std::vector<Value> udom;
  std::vector<std::pair<Value, double>> unoise;
  for (int v = 1; v <= u_domain_size; ++v) {
    udom.push_back(v);
    unoise.push_back({v, 1.0 / u_domain_size});
  }
  std::vector<Value> gated = {0};
  gated.insert(gated.end(), udom.begin(), udom.end());
  SemBuilder b(g);
  b.domain("U1", udom).noise("U1", unoise);
  b.mech("U1", [](const Assignment&, Value noise) { return noise; });
  b.domain("U2", udom).noise("U2", unoise);
  b.mech("U2", [](const Assignment&, Value noise) { return noise; });
  b.domain("D", {0, 1}).noise("D", {{0, 1.0}});
  b.mech("D", [](const Assignment& pa, Value) {
    return pa.at("U1") == pa.at("U2") ? 1 : 0;
  });
  b.domain("A", gated).noise("A", {{0, 1.0}});
  b.mech("A", [](const Assignment& pa, Value) {
    return pa.at("D") == 1 ? pa.at("U1") : 0;
  });
  b.domain("B", gated).noise("B", {{0, 1.0}});
  b.mech("B", [](const Assignment& pa, Value) {
    return pa.at("D") == 1 ? pa.at("U2") : 0;
  });
  return b.build();
}

SemModel xor_cancellation_fixture(double eps_bias) {
  if (!(eps_bias >= 0.5 && eps_bias < 1.0)) {
    throw Error("eps_bias must lie in [0.5, 1)");
  }
  Dag g({{"A", true},
         {"B", true},
         {"C", true},
         {"D", true},
         {"X", true},
         {"U2", false},
         {"U3", false}},
        {{"U2", "X"},
         {"U2", "A"},
         {"X", "C"},
         {"X", "D"},
         {"C", "D"},
         {"C", "B"},
         {"D", "B"},
         {"U3", "C"},
         {"U3", "B"}});
  SemBuilder b(g);
  for (const char* u : {"U2", "U3"}) {
    b.domain(u, {0, 1}).noise(u, {{0, 0.5}, {1, 0.5}});
    b.mech(u, [](const Assignment&, Value noise) { return noise; });
  }
  b.domain("X", {0, 1}).noise("X", {{0, 1.0}});
  b.mech("X", [](const Assignment& pa, Value) { return pa.at("U2"); });
  b.domain("A", {0, 1}).noise("A", {{0, 1.0}});
  b.mech("A", [](const Assignment& pa, Value) { return pa.at("U2"); });
  b.domain("C", {0, 1}).noise("C", {{0, 1.0}});
  b.mech("C", [](const Assignment& pa, Value) { return pa.at("X") ^ pa.at("U3"); });
  b.domain("B", {0, 1}).noise("B", {{0, eps_bias}, {1, 1.0 - eps_bias}});
  b.mech("B", [](const Assignment& pa, Value noise) {
    return pa.at("C") ^ pa.at("U3") ^ noise;
  });
  b.domain("D", {0, 1}).noise("D", {{0, eps_bias}, {1, 1.0 - eps_bias}});
  b.mech("D", [](const Assignment&, Value noise) { return noise; });
  return b.build();
}

JointTable adjustment_eval(const JointTable& t, const VarSet& a, const VarSet& b,
                           const VarSet& d, const Assignment& c_assign, const VarSet& x) {
  VarSet cv = c_assign.variables();
  VarSet abd = a.unite(b).unite(d);
  if (abd.empty()) throw Error("no outcome variables for the adjustment");
  std::vector<std::pair<const VarSet*, const VarSet*>> pairs = {
      {&abd, &cv}, {&abd, &x}, {&cv, &x}};
  for (auto [s, u] : pairs) {
    if (!s->disjoint_with(*u)) throw Error("adjustment variable sets overlap");
  }
  for (const auto& n : abd.unite(cv).unite(x)) {
    if (t.var_index(n) < 0) throw Error("unknown variable: " + n);
  }
  if (x.empty()) throw Error("empty adjustment set");

  std::vector<int> x_pos, abd_pos;
  for (std::size_t i = 0; i < t.variables().size(); ++i) {
    if (x.contains(t.variables()[i])) x_pos.push_back(static_cast<int>(i));
    if (abd.contains(t.variables()[i])) abd_pos.push_back(static_cast<int>(i));
  }
  auto matches_c = [&](const std::vector<Value>& vals) {
    for (std::size_t i = 0; i < t.variables().size(); ++i) {
      auto want = c_assign.get(t.variables()[i]);
      if (want && *want != vals[i]) return false;
    }
    return true;
  };

  // Propensities P(c | x) per assignment of the adjustment set.
  std::map<std::vector<Value>, double> p_x, p_cx;
  t.for_each([&](const std::vector<Value>& vals, double p) {
    std::vector<Value> key;
    for (int i : x_pos) key.push_back(vals[i]);
    p_x[key] += p;
    if (matches_c(vals)) p_cx[key] += p;
  });
  for (const auto& [key, px] : p_x) {
    if (px > 0.0 && p_cx[key] <= 0.0) {
      throw ZeroProbabilityError("zero propensity: " + c_assign.to_string() +
                                 " never occurs under one adjustment stratum");
    }
  }

  std::vector<std::string> vars;
  std::vector<std::vector<Value>> doms;
  for (const auto& v : t.variables()) {
    if (abd.contains(v)) {
      vars.push_back(v);
      doms.push_back(t.domain(v));
    }
  }
  JointTable out(vars, doms);
  t.for_each([&](const std::vector<Value>& vals, double p) {
    if (p <= 0.0 || !matches_c(vals)) return;
    std::vector<Value> key;
    for (int i : x_pos) key.push_back(vals[i]);
    Assignment cell;
    for (int i : abd_pos) cell.set(t.variables()[i], vals[i]);
    out.add_prob(cell, p * p_x[key] / p_cx[key]);
  });
  return out;
}

}  // namespace esep
