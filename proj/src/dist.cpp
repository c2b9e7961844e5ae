#include "esep/dist.hpp"

#include <algorithm>
#include <cmath>

namespace esep {

Assignment::Assignment(std::initializer_list<std::pair<std::string, Value>> items) {
  for (const auto& [n, v] : items) set(n, v);
}

void Assignment::set(const std::string& name, Value v) {
  auto it = std::lower_bound(items_.begin(), items_.end(), name,
                             [](const auto& p, const std::string& n) { return p.first < n; });
  if (it != items_.end() && it->first == name) {
    it->second = v;
  } else {
    items_.insert(it, {name, v});
  }
}

std::optional<Value> Assignment::get(const std::string& name) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), name,
                             [](const auto& p, const std::string& n) { return p.first < n; });
  if (it != items_.end() && it->first == name) return it->second;
  return std::nullopt;
}

Value Assignment::at(const std::string& name) const {
  auto v = get(name);
  if (!v) throw Error("assignment has no value for: " + name);
  return *v;
}

VarSet Assignment::variables() const {
  std::vector<std::string> names;
  for (const auto& [n, v] : items_) names.push_back(n);
  return VarSet(std::move(names));
}

std::string Assignment::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i > 0) out += ",";
    out += items_[i].first + "=" + std::to_string(items_[i].second);
  }
  return out;
}

JointTable::JointTable(std::vector<std::string> variables,
                       std::vector<std::vector<Value>> domains)
    : variables_(std::move(variables)), domains_(std::move(domains)) {
  if (variables_.size() != domains_.size()) {
    throw Error("variable and domain counts differ");
  }
  {
    auto sorted = variables_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error("duplicate variable name in table");
    }
  }
  std::size_t cells = 1;
  for (auto& dom : domains_) {
    if (dom.empty()) throw Error("empty variable domain");
    std::sort(dom.begin(), dom.end());
    if (std::adjacent_find(dom.begin(), dom.end()) != dom.end()) {
      throw Error("duplicate value in domain");
    }
    cells *= dom.size();
  }
  strides_.assign(variables_.size(), 1);
  for (std::size_t v = variables_.size(); v-- > 1;) {
    strides_[v - 1] = strides_[v] * domains_[v].size();
  }
  probs_.assign(cells, 0.0);
}

VarSet JointTable::variable_set() const { return VarSet(variables_); }

const std::vector<Value>& JointTable::domain(const std::string& name) const {
  int i = var_index(name);
  if (i < 0) throw Error("unknown variable: " + name);
  return domains_[i];
}

int JointTable::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t JointTable::value_index(std::size_t var, Value v) const {
  const auto& dom = domains_[var];
  auto it = std::lower_bound(dom.begin(), dom.end(), v);
  if (it == dom.end() || *it != v) {
    throw Error("value " + std::to_string(v) + " outside the domain of " + variables_[var]);
  }
  return static_cast<std::size_t>(it - dom.begin());
}

std::size_t JointTable::flat_index(const std::vector<std::size_t>& value_indices) const {
  std::size_t flat = 0;
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    flat += value_indices[v] * strides_[v];
  }
  return flat;
}

double JointTable::prob(const Assignment& full) const {
  std::vector<std::size_t> idx(variables_.size());
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    idx[v] = value_index(v, full.at(variables_[v]));
  }
  return probs_[flat_index(idx)];
}

void JointTable::add_prob(const Assignment& full, double p) {
  std::vector<std::size_t> idx(variables_.size());
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    idx[v] = value_index(v, full.at(variables_[v]));
  }
  probs_[flat_index(idx)] += p;
}

void JointTable::set_cell(const std::vector<std::size_t>& value_indices, double p) {
  probs_[flat_index(value_indices)] = p;
}

double JointTable::cell(const std::vector<std::size_t>& value_indices) const {
  return probs_[flat_index(value_indices)];
}

void JointTable::validate(double tol) const {
  for (double p : probs_) {
    if (p < -1e-12) throw Error("negative probability entry");
  }
  double t = total();
  if (std::abs(t - 1.0) > tol) {
    throw Error("probabilities sum to " + std::to_string(t) + ", not 1");
  }
}

void JointTable::normalize() {
  double t = total();
  if (t <= 0.0) throw Error("cannot normalize a zero table");
  for (double& p : probs_) p /= t;
}

double JointTable::total() const {
  detail::KahanSum s;
  for (double p : probs_) s.add(p);
  return s.value();
}

JointTable marginal(const JointTable& t, const VarSet& s) {
  if (s.empty()) throw Error("marginal over an empty set");
  for (const auto& n : s) {
    if (t.var_index(n) < 0) throw Error("unknown variable: " + n);
  }
  std::vector<std::string> vars;
  std::vector<std::vector<Value>> doms;
  for (const auto& v : t.variables()) {
    if (s.contains(v)) {
      vars.push_back(v);
      doms.push_back(t.domain(v));
    }
  }
  JointTable out(vars, doms);
  std::vector<int> keep;  // positions of kept variables in t's order
  for (std::size_t i = 0; i < t.variables().size(); ++i) {
    if (s.contains(t.variables()[i])) keep.push_back(static_cast<int>(i));
  }
  Assignment a;
  t.for_each([&](const std::vector<Value>& vals, double p) {
    if (p == 0.0) return;
    Assignment cell;
    for (int i : keep) cell.set(t.variables()[i], vals[i]);
    out.add_prob(cell, p);
  });
  out.sample_size = t.sample_size;
  return out;
}

JointTable condition(const JointTable& t, const Assignment& on) {
  for (const auto& [n, v] : on) {
    if (t.var_index(n) < 0) throw Error("unknown variable: " + n);
  }
  if (on.empty()) return t;
  VarSet rest = t.variable_set().minus(on.variables());
  if (rest.empty()) throw Error("conditioning on every variable");
  std::vector<std::string> vars;
  std::vector<std::vector<Value>> doms;
  for (const auto& v : t.variables()) {
    if (rest.contains(v)) {
      vars.push_back(v);
      doms.push_back(t.domain(v));
    }
  }
  JointTable out(vars, doms);
  detail::KahanSum event;
  t.for_each([&](const std::vector<Value>& vals, double p) {
    for (std::size_t i = 0; i < t.variables().size(); ++i) {
      auto want = on.get(t.variables()[i]);
      if (want && *want != vals[i]) return;
    }
    event.add(p);
    if (p == 0.0) return;
    Assignment cell;
    for (std::size_t i = 0; i < t.variables().size(); ++i) {
      if (rest.contains(t.variables()[i])) cell.set(t.variables()[i], vals[i]);
    }
    out.add_prob(cell, p);
  });
  if (event.value() <= 0.0) {
    throw ZeroProbabilityError("conditioning event has probability zero: " + on.to_string());
  }
  out.normalize();
  out.sample_size = t.sample_size;
  return out;
}

double entropy(const JointTable& t, const VarSet& s) {
  JointTable m = marginal(t, s);
  detail::KahanSum h;
  m.for_each([&](const std::vector<Value>&, double p) {
    if (p > 0.0) h.add(-p * std::log2(p));
  });
  return h.value();
}

double cond_entropy(const JointTable& t, const VarSet& s, const VarSet& given) {
  if (!s.disjoint_with(given)) throw Error("entropy sets overlap");
  if (given.empty()) return entropy(t, s);
  return entropy(t, s.unite(given)) - entropy(t, given);
}

double mutual_info(const JointTable& t, const VarSet& s, const VarSet& u) {
  if (!s.disjoint_with(u)) throw Error("mutual information sets overlap");
  return entropy(t, s) + entropy(t, u) - entropy(t, s.unite(u));
}

double cond_mutual_info(const JointTable& t, const VarSet& s, const VarSet& u,
                        const VarSet& c) {
  if (!s.disjoint_with(u) || !s.disjoint_with(c) || !u.disjoint_with(c)) {
    throw Error("mutual information sets overlap");
  }
  if (c.empty()) return mutual_info(t, s, u);
  return entropy(t, s.unite(c)) + entropy(t, u.unite(c)) -
         entropy(t, s.unite(u).unite(c)) - entropy(t, c);
}

double pointwise_cmi(const JointTable& t, const VarSet& s, const VarSet& u,
                     const Assignment& c_assign) {
  if (c_assign.empty()) return mutual_info(t, s, u);
  VarSet cv = c_assign.variables();
  if (!s.disjoint_with(cv) || !u.disjoint_with(cv)) {
    throw Error("mutual information sets overlap");
  }
  return mutual_info(condition(t, c_assign), s, u);
}

}  // namespace esep
