#include "esep/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace esep {

VarSet::VarSet(std::initializer_list<std::string> names)
    : VarSet(std::vector<std::string>(names)) {}

VarSet::VarSet(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  auto dup = std::adjacent_find(names_.begin(), names_.end());
  if (dup != names_.end()) {
    throw Error("duplicate name in variable set: " + *dup);
  }
}

bool VarSet::contains(const std::string& name) const {
  return std::binary_search(names_.begin(), names_.end(), name);
}

void VarSet::insert(const std::string& name) {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it != names_.end() && *it == name) return;
  names_.insert(it, name);
}

bool VarSet::disjoint_with(const VarSet& other) const {
  for (const auto& n : other.names_) {
    if (contains(n)) return false;
  }
  return true;
}

bool VarSet::subset_of(const VarSet& other) const {
  for (const auto& n : names_) {
    if (!other.contains(n)) return false;
  }
  return true;
}

VarSet VarSet::unite(const VarSet& other) const {
  VarSet out = *this;
  for (const auto& n : other.names_) out.insert(n);
  return out;
}

VarSet VarSet::minus(const VarSet& other) const {
  std::vector<std::string> kept;
  for (const auto& n : names_) {
    if (!other.contains(n)) kept.push_back(n);
  }
  return VarSet(std::move(kept));
}

VarSet VarSet::intersect(const VarSet& other) const {
  std::vector<std::string> kept;
  for (const auto& n : names_) {
    if (other.contains(n)) kept.push_back(n);
  }
  return VarSet(std::move(kept));
}

std::string VarSet::joined(const std::string& sep) const {
  std::string out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (i > 0) out += sep;
    out += names_[i];
  }
  return out;
}

Dag::Dag(std::vector<NodeDecl> nodes,
         std::vector<std::pair<std::string, std::string>> edges)
    : nodes_(std::move(nodes)), edge_names_(std::move(edges)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name.empty()) throw Error("empty node name");
    auto [it, inserted] = index_.emplace(nodes_[i].name, static_cast<int>(i));
    if (!inserted) throw Error("duplicate node name: " + nodes_[i].name);
  }
  parents_.resize(nodes_.size());
  children_.resize(nodes_.size());
  std::set<std::pair<int, int>> seen;
  for (const auto& [p, c] : edge_names_) {
    int pi = index_of(p);
    int ci = index_of(c);
    if (pi < 0) throw Error("edge endpoint is not a declared node: " + p);
    if (ci < 0) throw Error("edge endpoint is not a declared node: " + c);
    if (pi == ci) throw Error("self-loop on node: " + p);
    if (!seen.insert({pi, ci}).second) throw Error("duplicate edge: " + p + " -> " + c);
    parents_[ci].push_back(pi);
    children_[pi].push_back(ci);
  }
  topo_order();  // throws on a cycle
}

bool Dag::has_node(const std::string& name) const { return index_.count(name) > 0; }

bool Dag::observed(const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw Error("unknown node: " + name);
  return nodes_[i].observed;
}

bool Dag::has_edge(const std::string& parent, const std::string& child) const {
  int pi = index_of(parent);
  int ci = index_of(child);
  if (pi < 0 || ci < 0) return false;
  for (int c : children_[pi]) {
    if (c == ci) return true;
  }
  return false;
}

std::vector<std::string> Dag::parents(const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw Error("unknown node: " + name);
  std::vector<std::string> out;
  for (int p : parents_[i]) out.push_back(nodes_[p].name);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> Dag::children(const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw Error("unknown node: " + name);
  std::vector<std::string> out;
  for (int c : children_[i]) out.push_back(nodes_[c].name);
  std::sort(out.begin(), out.end());
  return out;
}

VarSet Dag::all_nodes() const {
  std::vector<std::string> names;
  for (const auto& n : nodes_) names.push_back(n.name);
  return VarSet(std::move(names));
}

VarSet Dag::observed_nodes() const {
  std::vector<std::string> names;
  for (const auto& n : nodes_) {
    if (n.observed) names.push_back(n.name);
  }
  return VarSet(std::move(names));
}

VarSet Dag::latent_nodes() const {
  std::vector<std::string> names;
  for (const auto& n : nodes_) {
    if (!n.observed) names.push_back(n.name);
  }
  return VarSet(std::move(names));
}

std::vector<std::string> Dag::topo_order() const {
  // Kahn's algorithm; ties broken by declaration order for determinism.
  std::vector<int> indeg(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    indeg[i] = static_cast<int>(parents_[i].size());
  }
  std::vector<int> order;
  std::deque<int> ready;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  }
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (int c : children_[v]) {
      if (--indeg[c] == 0) ready.push_back(c);
    }
  }
  if (order.size() != nodes_.size()) throw Error("graph contains a cycle");
  std::vector<std::string> names;
  for (int i : order) names.push_back(nodes_[i].name);
  return names;
}

int Dag::index_of(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

void EsepRelation::validate(const Dag& g) const {
  if (a.empty() || b.empty()) throw Error("a and b must be nonempty");
  const VarSet* sets[] = {&a, &b, &c, &d};
  for (int i = 0; i < 4; ++i) {
    for (const auto& n : *sets[i]) {
      if (!g.has_node(n)) throw Error("unknown node: " + n);
    }
    for (int j = i + 1; j < 4; ++j) {
      if (!sets[i]->disjoint_with(*sets[j])) {
        throw Error("relation sets must be pairwise disjoint");
      }
    }
  }
}

namespace {

VarSet closure(const Dag& g, const VarSet& s, bool forward) {
  std::vector<bool> reached(g.node_count(), false);
  std::deque<int> frontier;
  for (const auto& n : s) {
    int i = g.index_of(n);
    if (i < 0) throw Error("unknown node: " + n);
    reached[i] = true;
    frontier.push_back(i);
  }
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    const auto& next = forward ? g.child_indices(v) : g.parent_indices(v);
    for (int u : next) {
      if (!reached[u]) {
        reached[u] = true;
        frontier.push_back(u);
      }
    }
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (reached[i]) names.push_back(g.name_of(static_cast<int>(i)));
  }
  return VarSet(std::move(names));
}

}  // namespace

VarSet descendants(const Dag& g, const VarSet& s) { return closure(g, s, true); }

VarSet ancestors(const Dag& g, const VarSet& s) { return closure(g, s, false); }

Dag delete_nodes(const Dag& g, const VarSet& d) {
  for (const auto& n : d) {
    if (!g.has_node(n)) throw Error("unknown node: " + n);
  }
  std::vector<NodeDecl> nodes;
  for (const auto& n : g.node_decls()) {
    if (!d.contains(n.name)) nodes.push_back(n);
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : g.edges()) {
    if (!d.contains(e.first) && !d.contains(e.second)) edges.push_back(e);
  }
  return Dag(std::move(nodes), std::move(edges));
}

Dag split(const Dag& g, const VarSet& d) {
  for (const auto& n : d) {
    if (!g.has_node(n)) throw Error("unknown node: " + n);
  }
  std::vector<NodeDecl> nodes = g.node_decls();
  for (const auto& n : d) {
    std::string split_name = n + kSplitSuffix;
    if (g.has_node(split_name)) {
      throw Error("split name collision: " + split_name);
    }
    nodes.push_back({split_name, true});
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : g.edges()) {
    if (d.contains(e.first)) {
      edges.emplace_back(e.first + kSplitSuffix, e.second);
    } else {
      edges.push_back(e);
    }
  }
  return Dag(std::move(nodes), std::move(edges));
}

Dag mutilate(const Dag& g, const VarSet& e) {
  for (const auto& n : e) {
    if (!g.has_node(n)) throw Error("unknown node: " + n);
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& ed : g.edges()) {
    if (!e.contains(ed.second)) edges.push_back(ed);
  }
  return Dag(g.node_decls(), std::move(edges));
}

bool d_separated(const Dag& g, const VarSet& a, const VarSet& b, const VarSet& c) {
  if (a.empty() || b.empty()) throw Error("a and b must be nonempty");
  if (!a.disjoint_with(b) || !a.disjoint_with(c) || !b.disjoint_with(c)) {
    throw Error("a, b, c must be pairwise disjoint");
  }
  // Reachability in the moralized ancestral subgraph of a ∪ b ∪ c.
  VarSet anc = ancestors(g, a.unite(b).unite(c));
  std::vector<int> keep;
  std::vector<bool> in_anc(g.node_count(), false);
  for (const auto& n : anc) {
    int i = g.index_of(n);
    in_anc[i] = true;
    keep.push_back(i);
  }
  std::vector<std::set<int>> adj(g.node_count());
  for (int v : keep) {
    for (int p : g.parent_indices(v)) {
      if (!in_anc[p]) continue;
      adj[v].insert(p);
      adj[p].insert(v);
    }
    // Marry co-parents within the ancestral subgraph.
    const auto& ps = g.parent_indices(v);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        if (in_anc[ps[i]] && in_anc[ps[j]]) {
          adj[ps[i]].insert(ps[j]);
          adj[ps[j]].insert(ps[i]);
        }
      }
    }
  }
  std::vector<bool> blocked(g.node_count(), false);
  for (const auto& n : c) {
    int i = g.index_of(n);
    if (i < 0) throw Error("unknown node: " + n);
    blocked[i] = true;
  }
  std::vector<bool> visited(g.node_count(), false);
  std::deque<int> frontier;
  for (const auto& n : a) {
    int i = g.index_of(n);
    if (i < 0) throw Error("unknown node: " + n);
    visited[i] = true;
    frontier.push_back(i);
  }
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    for (int u : adj[v]) {
      if (visited[u] || blocked[u]) continue;
      visited[u] = true;
      frontier.push_back(u);
    }
  }
  for (const auto& n : b) {
    int i = g.index_of(n);
    if (i < 0) throw Error("unknown node: " + n);
    if (visited[i]) return false;
  }
  return true;
}

bool e_separated(const Dag& g, const EsepRelation& rel) {
  rel.validate(g);
  return d_separated(delete_nodes(g, rel.d), rel.a, rel.b, rel.c);
}

bool is_minimal_bottleneck(const Dag& g, const EsepRelation& rel) {
  if (!e_separated(g, rel)) throw Error("relation is not an e-separation");
  const auto& names = rel.d.names();
  std::size_t n = names.size();
  // Every proper subset of d, small by construction.
  for (std::size_t mask = 0; mask + 1 < (std::size_t(1) << n); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t(1) << i)) sub.push_back(names[i]);
    }
    EsepRelation r{rel.a, rel.b, rel.c, VarSet(std::move(sub))};
    if (e_separated(g, r)) return false;
  }
  return true;
}

namespace {

// Nonempty-or-empty subsets of pool, sizes min_size..max_size, lexicographic.
std::vector<VarSet> subsets_up_to(const std::vector<std::string>& pool,
                                  int min_size, int max_size) {
  std::vector<VarSet> out;
  std::vector<std::string> current;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(current.size()) >= min_size) {
      out.push_back(VarSet(current));
    }
    if (static_cast<int>(current.size()) == max_size) return;
    for (std::size_t i = start; i < pool.size(); ++i) {
      current.push_back(pool[i]);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<EsepEntry> enumerate_esep(const Dag& g, EsepCaps caps, bool observed_only) {
  if (caps.a < 1 || caps.b < 1) throw Error("caps for a and b must be at least 1");
  std::vector<std::string> ab_pool = g.observed_nodes().names();
  std::vector<std::string> cd_pool =
      observed_only ? ab_pool : g.all_nodes().names();

  std::vector<EsepEntry> out;
  for (const VarSet& a : subsets_up_to(ab_pool, 1, caps.a)) {
    for (const VarSet& b : subsets_up_to(ab_pool, 1, caps.b)) {
      if (b < a || !a.disjoint_with(b)) continue;  // keep smaller orientation
      std::vector<std::string> rest_c;
      for (const auto& n : cd_pool) {
        if (!a.contains(n) && !b.contains(n)) rest_c.push_back(n);
      }
      for (const VarSet& c : subsets_up_to(rest_c, 0, caps.c)) {
        std::vector<std::string> rest_d;
        for (const auto& n : rest_c) {
          if (!c.contains(n)) rest_d.push_back(n);
        }
        for (const VarSet& d : subsets_up_to(rest_d, 0, caps.d)) {
          EsepRelation rel{a, b, c, d};
          if (!e_separated(g, rel)) continue;
          out.push_back({rel, is_minimal_bottleneck(g, rel)});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const EsepEntry& x, const EsepEntry& y) { return x.rel < y.rel; });
  return out;
}

}  // namespace esep
