#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "esep/constraints.hpp"
#include "esep/dist.hpp"

namespace esep {

struct MmeOptions {
  int w_card_max = 0;  // 0: use min(|x-domain|, |y-domain|)
  int restarts = 6;
  std::uint64_t seed = 0;
  double tol = 1e-4;  // admissible total-variation mismatch
};

struct MmeEstimate {
  double lower_bits = 0.0;           // max over supported c values
  double averaged_lower_bits = 0.0;  // the weaker averaged form
  double trivial_upper_bits = 0.0;   // min(H(x), H(y))
  // Best feasible H(W) found by the search; an upper bound on the true value,
  // with no global-optimality claim. Absent when no cardinality was feasible.
  std::optional<double> numeric_bits;
  int w_cardinality = 0;  // cardinality attaining numeric_bits
  bool converged = false;
  int restarts_run = 0;
  // Best objective per tried cardinality 1..k_max; infinity when infeasible.
  std::vector<double> best_by_cardinality;
};

// Information-theoretic lower bound on the entropy of a full mediary of
// x -> y given c; .max_bits is the bound, .averaged_bits the weaker form.
LatentEntropyBound mme_lower(const JointTable& t, const VarSet& x, const VarSet& y,
                             const VarSet& c);

// A mediary can simply copy the smaller endpoint.
double mme_upper_trivial(const JointTable& t, const VarSet& x, const VarSet& y);

// Multi-start penalized local search over P(W|X,C), P(U), P(Y|W,U,C) with a
// latent confounder U of W and Y, minimizing H(W) subject to reproducing the
// observed joint over (x, y, c).
MmeEstimate mme_estimate(const JointTable& t, const VarSet& x, const VarSet& y,
                         const VarSet& c, const MmeOptions& opts = {});

}  // namespace esep
