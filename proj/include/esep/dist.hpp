#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "esep/graph.hpp"

namespace esep {

using Value = int;

struct ZeroProbabilityError : Error {
  using Error::Error;
};

/// Map from variable name to a value, kept sorted by name.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::initializer_list<std::pair<std::string, Value>> items);

  void set(const std::string& name, Value v);
  std::optional<Value> get(const std::string& name) const;
  Value at(const std::string& name) const;  // throws if absent

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  VarSet variables() const;

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  std::string to_string() const;  // "X=0,Y=2"

  friend auto operator<=>(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::pair<std::string, Value>> items_;
};

/// Exact finite discrete joint distribution over named variables.
/// Stored densely over the product of the declared domains.
class JointTable {
 public:
  JointTable(std::vector<std::string> variables,
             std::vector<std::vector<Value>> domains);

  const std::vector<std::string>& variables() const { return variables_; }
  VarSet variable_set() const;
  const std::vector<Value>& domain(const std::string& name) const;
  int var_index(const std::string& name) const;  // -1 if absent

  std::size_t cell_count() const { return probs_.size(); }

  double prob(const Assignment& full) const;
  void add_prob(const Assignment& full, double p);
  void set_cell(const std::vector<std::size_t>& value_indices, double p);
  double cell(const std::vector<std::size_t>& value_indices) const;

  // Calls fn(values, p) for every cell; values are per-variable domain values.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    std::vector<std::size_t> idx(variables_.size(), 0);
    std::vector<Value> vals(variables_.size());
    for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
      for (std::size_t v = 0; v < variables_.size(); ++v) {
        vals[v] = domains_[v][idx[v]];
      }
      fn(static_cast<const std::vector<Value>&>(vals), probs_[flat]);
      for (std::size_t v = variables_.size(); v-- > 0;) {
        if (++idx[v] < domains_[v].size()) break;
        idx[v] = 0;
      }
    }
  }

  // Sums to one within tol, entries nonnegative; throws otherwise.
  void validate(double tol = 1e-9) const;
  void normalize();
  double total() const;

  // Set when the table came from empirical counts.
  std::optional<double> sample_size;

 private:
  std::size_t flat_index(const std::vector<std::size_t>& value_indices) const;
  std::size_t value_index(std::size_t var, Value v) const;  // throws if absent

  std::vector<std::string> variables_;
  std::vector<std::vector<Value>> domains_;  // each sorted ascending
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
};

JointTable marginal(const JointTable& t, const VarSet& s);
JointTable condition(const JointTable& t, const Assignment& on);

// Shannon entropy of the marginal over s, in bits.
double entropy(const JointTable& t, const VarSet& s);
double cond_entropy(const JointTable& t, const VarSet& s, const VarSet& given);
double mutual_info(const JointTable& t, const VarSet& s, const VarSet& u);
double cond_mutual_info(const JointTable& t, const VarSet& s, const VarSet& u,
                        const VarSet& c);
double pointwise_cmi(const JointTable& t, const VarSet& s, const VarSet& u,
                     const Assignment& c_assign);

namespace detail {

/// Kahan compensated accumulator.
class KahanSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

}  // namespace esep
