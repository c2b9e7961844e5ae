#include "esep/mme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace esep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Euclidean projection onto the probability simplex (sort-based).
void project_simplex(double* p, std::size_t n) {
  std::vector<double> u(p, p + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    css += u[i];
    double cand = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - cand > 0.0) theta = cand;
  }
  for (std::size_t i = 0; i < n; ++i) p[i] = std::max(p[i] - theta, 0.0);
}

struct Problem {
  std::size_t nx, ny, nc, nu, k;
  std::vector<double> pxc;   // [c][x]
  std::vector<double> pxyc;  // [c][x][y]

  std::size_t w_off(std::size_t c, std::size_t x) const { return (c * nx + x) * k; }
  std::size_t u_off() const { return nc * nx * k; }
  std::size_t y_off(std::size_t c, std::size_t w, std::size_t u) const {
    return u_off() + nu + ((c * k + w) * nu + u) * ny;
  }
  std::size_t param_count() const { return u_off() + nu + nc * k * nu * ny; }

  void project(std::vector<double>& th) const {
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t x = 0; x < nx; ++x) project_simplex(&th[w_off(c, x)], k);
    project_simplex(&th[u_off()], nu);
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t w = 0; w < k; ++w)
        for (std::size_t u = 0; u < nu; ++u) project_simplex(&th[y_off(c, w, u)], ny);
  }

  // Returns {H(W), total-variation mismatch}.
  std::pair<double, double> measure(const std::vector<double>& th) const {
    std::vector<double> pw(k, 0.0);
    double tv = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t x = 0; x < nx; ++x) {
        double pxcv = pxc[c * nx + x];
        for (std::size_t w = 0; w < k; ++w) {
          pw[w] += pxcv * th[w_off(c, x) + w];
        }
        for (std::size_t y = 0; y < ny; ++y) {
          double m = 0.0;
          for (std::size_t w = 0; w < k; ++w) {
            double pwv = th[w_off(c, x) + w];
            if (pwv == 0.0) continue;
            double py = 0.0;
            for (std::size_t u = 0; u < nu; ++u) {
              py += th[u_off() + u] * th[y_off(c, w, u) + y];
            }
            m += pwv * py;
          }
          tv += std::abs(pxcv * m - pxyc[(c * nx + x) * ny + y]);
        }
      }
    }
    double h = 0.0;
    for (double p : pw) {
      if (p > 0.0) h -= p * std::log2(p);
    }
    return {h, 0.5 * tv};
  }

  double objective(const std::vector<double>& th, double lambda) const {
    auto [h, tv] = measure(th);
    return h + lambda * tv;
  }
};

void local_search(const Problem& pb, std::vector<double>& th) {
  constexpr double kGradStep = 1e-6;
  for (double lambda : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    double step = 0.1;
    double f = pb.objective(th, lambda);
    std::vector<double> grad(th.size()), trial;
    for (int iter = 0; iter < 250 && step > 1e-10; ++iter) {
      for (std::size_t i = 0; i < th.size(); ++i) {
        double save = th[i];
        th[i] = save + kGradStep;
        double fp = pb.objective(th, lambda);
        th[i] = save - kGradStep;
        double fm = pb.objective(th, lambda);
        th[i] = save;
        grad[i] = (fp - fm) / (2 * kGradStep);
      }
      double norm = 0.0;
      for (double g : grad) norm += g * g;
      norm = std::sqrt(norm);
      if (norm < 1e-12) break;
      trial = th;
      for (std::size_t i = 0; i < th.size(); ++i) trial[i] -= step / norm * grad[i];
      pb.project(trial);
      double ft = pb.objective(trial, lambda);
      if (ft < f) {
        th = trial;
        f = ft;
        step *= 1.2;
      } else {
        step *= 0.5;
      }
    }
  }
}

}  // namespace

LatentEntropyBound mme_lower(const JointTable& t, const VarSet& x, const VarSet& y,
                             const VarSet& c) {
  return latent_entropy_bound(t, x, y, c);
}

double mme_upper_trivial(const JointTable& t, const VarSet& x, const VarSet& y) {
  if (x.empty() || y.empty()) throw Error("endpoint sets must be nonempty");
  if (!x.disjoint_with(y)) throw Error("variable sets overlap");
  return std::min(entropy(t, x), entropy(t, y));
}

MmeEstimate mme_estimate(const JointTable& t, const VarSet& x, const VarSet& y,
                         const VarSet& c, const MmeOptions& opts) {
  if (x.size() != 1 || y.size() != 1) {
    throw Error("the mediary search handles single endpoint variables only");
  }
  LatentEntropyBound lower = mme_lower(t, x, y, c);

  MmeEstimate est;
  est.lower_bits = lower.max_bits;
  est.averaged_lower_bits = lower.averaged_bits;
  est.trivial_upper_bits = mme_upper_trivial(t, x, y);

  const std::string& xn = x.names()[0];
  const std::string& yn = y.names()[0];
  JointTable tm = marginal(t, x.unite(y).unite(c));
  const auto& xd = tm.domain(xn);
  const auto& yd = tm.domain(yn);

  // Supported assignments of c (a single empty one when c is empty).
  std::vector<Assignment> cs;
  if (c.empty()) {
    cs.push_back({});
  } else {
    JointTable cm = marginal(tm, c);
    cm.for_each([&](const std::vector<Value>& vals, double p) {
      if (p <= 0.0) return;
      Assignment gamma;
      for (std::size_t i = 0; i < cm.variables().size(); ++i) {
        gamma.set(cm.variables()[i], vals[i]);
      }
      cs.push_back(gamma);
    });
  }

  Problem pb;
  pb.nx = xd.size();
  pb.ny = yd.size();
  pb.nc = cs.size();
  pb.nu = yd.size();
  pb.pxc.assign(pb.nc * pb.nx, 0.0);
  pb.pxyc.assign(pb.nc * pb.nx * pb.ny, 0.0);
  for (std::size_t ci = 0; ci < pb.nc; ++ci) {
    for (std::size_t xi = 0; xi < pb.nx; ++xi) {
      for (std::size_t yi = 0; yi < pb.ny; ++yi) {
        Assignment a = cs[ci];
        a.set(xn, xd[xi]);
        a.set(yn, yd[yi]);
        double p = tm.prob(a);
        pb.pxyc[(ci * pb.nx + xi) * pb.ny + yi] = p;
        pb.pxc[ci * pb.nx + xi] += p;
      }
    }
  }

  int k_max = opts.w_card_max > 0
                  ? opts.w_card_max
                  : static_cast<int>(std::min(pb.nx, pb.ny));
  est.best_by_cardinality.assign(k_max, kInf);

  std::mt19937_64 rng(opts.seed);
  std::exponential_distribution<double> exp1(1.0);
  double best = kInf;
  int best_k = 0;
  for (int k = 1; k <= k_max; ++k) {
    pb.k = static_cast<std::size_t>(k);
    std::vector<std::vector<double>> starts;

    // Deterministic start: W copies x (clipped to the cardinality) and the
    // response table is fitted from the data; exactly feasible at k = |x|.
    std::vector<double> th(pb.param_count(), 0.0);
    for (std::size_t ci = 0; ci < pb.nc; ++ci) {
      for (std::size_t xi = 0; xi < pb.nx; ++xi) {
        th[pb.w_off(ci, xi) + std::min<std::size_t>(xi, pb.k - 1)] = 1.0;
      }
    }
    for (std::size_t u = 0; u < pb.nu; ++u) th[pb.u_off() + u] = 1.0 / pb.nu;
    for (std::size_t ci = 0; ci < pb.nc; ++ci) {
      for (std::size_t w = 0; w < pb.k; ++w) {
        std::size_t xi = std::min(w, pb.nx - 1);
        double px = pb.pxc[ci * pb.nx + xi];
        for (std::size_t u = 0; u < pb.nu; ++u) {
          for (std::size_t yi = 0; yi < pb.ny; ++yi) {
            th[pb.y_off(ci, w, u) + yi] =
                px > 0.0 ? pb.pxyc[(ci * pb.nx + xi) * pb.ny + yi] / px : 1.0 / pb.ny;
          }
        }
      }
    }
    starts.push_back(th);

    // Deterministic start: constant W, U carrying the response; exactly
    // feasible when x and y are independent given c.
    std::fill(th.begin(), th.end(), 0.0);
    for (std::size_t ci = 0; ci < pb.nc; ++ci) {
      for (std::size_t xi = 0; xi < pb.nx; ++xi) th[pb.w_off(ci, xi)] = 1.0;
    }
    {
      std::vector<double> py(pb.ny, 0.0);
      double tot = 0.0;
      for (std::size_t i = 0; i < pb.pxyc.size(); ++i) {
        py[i % pb.ny] += pb.pxyc[i];
        tot += pb.pxyc[i];
      }
      for (std::size_t u = 0; u < pb.nu; ++u) {
        th[pb.u_off() + u] = tot > 0.0 ? py[u] / tot : 1.0 / pb.nu;
      }
    }
    for (std::size_t ci = 0; ci < pb.nc; ++ci) {
      for (std::size_t w = 0; w < pb.k; ++w) {
        for (std::size_t u = 0; u < pb.nu; ++u) {
          th[pb.y_off(ci, w, u) + u] = 1.0;
        }
      }
    }
    starts.push_back(th);

    for (int r = static_cast<int>(starts.size()); r < opts.restarts; ++r) {
      std::vector<double> rnd(pb.param_count());
      for (double& v : rnd) v = exp1(rng);
      // Normalizing via the projection keeps every block on the simplex.
      for (double& v : rnd) v *= 0.5;
      pb.project(rnd);
      starts.push_back(std::move(rnd));
    }

    for (auto& s : starts) {
      local_search(pb, s);
      ++est.restarts_run;
      auto [h, tv] = pb.measure(s);
      if (tv <= opts.tol) {
        est.best_by_cardinality[k - 1] = std::min(est.best_by_cardinality[k - 1], h);
        if (h < best) {
          best = h;
          best_k = k;
        }
      }
    }
  }

  if (best < kInf) {
    est.numeric_bits = best;
    est.w_cardinality = best_k;
    est.converged = best >= est.lower_bits - opts.tol * 100 &&
                    best <= est.trivial_upper_bits + opts.tol * 100;
  }
  return est;
}

}  // namespace esep
