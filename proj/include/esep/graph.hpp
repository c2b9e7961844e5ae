#pragma once

#include <compare>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace esep {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Lexicographically ordered set of variable names.
class VarSet {
 public:
  VarSet() = default;
  VarSet(std::initializer_list<std::string> names);
  explicit VarSet(std::vector<std::string> names);

  bool empty() const { return names_.empty(); }
  std::size_t size() const { return names_.size(); }
  bool contains(const std::string& name) const;
  void insert(const std::string& name);

  bool disjoint_with(const VarSet& other) const;
  bool subset_of(const VarSet& other) const;
  VarSet unite(const VarSet& other) const;
  VarSet minus(const VarSet& other) const;
  VarSet intersect(const VarSet& other) const;

  const std::vector<std::string>& names() const { return names_; }
  auto begin() const { return names_.begin(); }
  auto end() const { return names_.end(); }

  // Joins the member names, e.g. joined() == "Y3Y4Y5", joined(",") == "Y3,Y4,Y5".
  std::string joined(const std::string& sep = "") const;

  friend auto operator<=>(const VarSet&, const VarSet&) = default;

 private:
  std::vector<std::string> names_;  // sorted, unique
};

struct NodeDecl {
  std::string name;
  bool observed = true;
};

// Name suffix used by split(); reserved in graph inputs.
inline constexpr const char* kSplitSuffix = "@split";

/// Immutable DAG over named nodes with an observed/latent flag per node.
class Dag {
 public:
  Dag(std::vector<NodeDecl> nodes,
      std::vector<std::pair<std::string, std::string>> edges);

  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<NodeDecl>& node_decls() const { return nodes_; }
  bool has_node(const std::string& name) const;
  bool observed(const std::string& name) const;
  bool has_edge(const std::string& parent, const std::string& child) const;
  const std::vector<std::pair<std::string, std::string>>& edges() const {
    return edge_names_;
  }

  std::vector<std::string> parents(const std::string& name) const;
  std::vector<std::string> children(const std::string& name) const;

  VarSet all_nodes() const;
  VarSet observed_nodes() const;
  VarSet latent_nodes() const;

  // Node names in a topological order (parents first); deterministic.
  std::vector<std::string> topo_order() const;

  int index_of(const std::string& name) const;  // -1 if absent
  const std::string& name_of(int index) const { return nodes_[index].name; }
  const std::vector<int>& parent_indices(int index) const { return parents_[index]; }
  const std::vector<int>& child_indices(int index) const { return children_[index]; }

 private:
  std::vector<NodeDecl> nodes_;
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<std::pair<std::string, std::string>> edge_names_;
};

/// An (A,B,C,D) statement: A independent of B given C upon deletion of D.
struct EsepRelation {
  VarSet a, b, c, d;

  // Throws if the sets overlap, a or b is empty, or a name is not in g.
  void validate(const Dag& g) const;

  friend auto operator<=>(const EsepRelation&, const EsepRelation&) = default;
};

// s plus everything reachable from s along directed edges.
VarSet descendants(const Dag& g, const VarSet& s);
VarSet ancestors(const Dag& g, const VarSet& s);

// Removes the nodes in d together with all their edges.
Dag delete_nodes(const Dag& g, const VarSet& d);

// For each name D in d, node D keeps its incoming edges and a new node
// D@split (observed) takes over its outgoing edges.
Dag split(const Dag& g, const VarSet& d);

// Removes all edges into members of e.
Dag mutilate(const Dag& g, const VarSet& e);

bool d_separated(const Dag& g, const VarSet& a, const VarSet& b, const VarSet& c);
bool e_separated(const Dag& g, const EsepRelation& rel);

// Requires e_separated(g, rel); true iff no proper subset of rel.d suffices.
bool is_minimal_bottleneck(const Dag& g, const EsepRelation& rel);

struct EsepCaps {
  int a = 2;
  int b = 2;
  int c = 2;
  int d = 2;
};

struct EsepEntry {
  EsepRelation rel;
  bool minimal = false;
};

// All e-separation relations within the caps, lexicographically ordered with
// the (a,b) orientation normalized to the smaller side first.
std::vector<EsepEntry> enumerate_esep(const Dag& g, EsepCaps caps = {},
                                      bool observed_only = true);

}  // namespace esep
