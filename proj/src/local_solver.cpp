#include "sbc/local_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace sbc {

RealQuadForm RealQuadForm::from_dense(const Mat& d, const Vec& b, double c) {
  RealQuadForm f;
  f.D = (0.5 * (d + d.transpose())).sparseView();
  f.b = b;
  f.c = c;
  return f;
}

double LocalProblem::max_violation(const Vec& z) const {
  double v = 0.0;
  for (int i = 0; i < n; ++i) v = std::max({v, lo(i) - z(i), z(i) - hi(i)});
  for (const auto& g : ineq) v = std::max(v, g.value(z));
  for (const auto& h : eq) v = std::max(v, std::abs(h.value(z)));
  return v;
}

namespace {

Vec project(const LocalProblem& p, const Vec& z) { return z.cwiseMax(p.lo).cwiseMin(p.hi); }

struct Augmented {
  const LocalProblem& p;
  double fscale;
  double rho;
  const Vec& lam;  // equality multipliers
  const Vec& mu;   // inequality multipliers

  double value(const Vec& z, Vec* grad) const {
    double v = fscale * p.objective.value(z);
    if (grad) *grad = fscale * p.objective.gradient(z);
    for (size_t k = 0; k < p.eq.size(); ++k) {
      const double h = p.eq[k].value(z) + lam(k) / rho;
      v += 0.5 * rho * h * h;
      if (grad) *grad += rho * h * p.eq[k].gradient(z);
    }
    for (size_t k = 0; k < p.ineq.size(); ++k) {
      const double g = std::max(0.0, p.ineq[k].value(z) + mu(k) / rho);
      v += 0.5 * rho * g * g;
      if (grad && g > 0.0) *grad += rho * g * p.ineq[k].gradient(z);
    }
    return v;
  }

  /// Hessian of the augmented Lagrangian; inactive inequalities contribute nothing.
  Mat hessian(const Vec& z) const {
    Mat H = 2.0 * fscale * Mat(p.objective.D);
    auto add = [&](const RealQuadForm& q, double shifted) {
      const Vec gr = q.gradient(z);
      H += rho * gr * gr.transpose();
      H += 2.0 * rho * shifted * Mat(q.D);
    };
    for (size_t k = 0; k < p.eq.size(); ++k) add(p.eq[k], p.eq[k].value(z) + lam(k) / rho);
    for (size_t k = 0; k < p.ineq.size(); ++k) {
      const double g = p.ineq[k].value(z) + mu(k) / rho;
      if (g > 0.0) add(p.ineq[k], g);
    }
    return H;
  }
};

/// Projected Newton on the box (Bertsekas): Newton steps on the free variables, gradient steps on
/// variables held at a bound, Armijo search along the projection arc. Returns iterations used.
int projected_newton(const LocalProblem& p, const Augmented& a, Vec& z, int max_iter, double tol) {
  const int n = p.n;
  Vec g;
  double f = a.value(z, &g);
  for (int it = 0; it < max_iter; ++it) {
    const Vec pg = project(p, z - g) - z;
    const double pgn = pg.lpNorm<Eigen::Infinity>();
    if (pgn <= tol) return it;
    const double eps = std::min(1e-8, pgn);
    std::vector<int> freev;
    for (int i = 0; i < n; ++i) {
      const bool at_lo = z(i) <= p.lo(i) + eps && g(i) > 0.0;
      const bool at_hi = z(i) >= p.hi(i) - eps && g(i) < 0.0;
      if (!at_lo && !at_hi) freev.push_back(i);
    }
    Vec d = -g;
    if (!freev.empty()) {
      const Mat H = a.hessian(z);
      const int nf = static_cast<int>(freev.size());
      Mat Hf(nf, nf);
      Vec gf(nf);
      for (int r = 0; r < nf; ++r) {
        gf(r) = g(freev[static_cast<size_t>(r)]);
        for (int c = 0; c < nf; ++c) Hf(r, c) = H(freev[static_cast<size_t>(r)], freev[static_cast<size_t>(c)]);
      }
      const double scale = std::max(1.0, Hf.diagonal().cwiseAbs().maxCoeff());
      double tau = 0.0;
      for (int attempt = 0; attempt < 20; ++attempt) {
        Eigen::LLT<Mat> llt(Hf + tau * Mat::Identity(nf, nf));
        if (llt.info() == Eigen::Success) {
          const Vec df = llt.solve(-gf);
          for (int r = 0; r < nf; ++r) d(freev[static_cast<size_t>(r)]) = df(r);
          break;
        }
        tau = tau == 0.0 ? 1e-10 * scale : tau * 10.0;
      }
    }
    double t = 1.0;
    Vec zn, gn;
    double fn = f;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      zn = project(p, z + t * d);
      const double decrease = g.dot(zn - z);
      if (decrease >= 0.0 && ls == 0) {
        // Not a descent arc: fall back to the projected gradient direction.
        d = -g;
        continue;
      }
      fn = a.value(zn, &gn);
      if (fn <= f + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || (zn - z).lpNorm<Eigen::Infinity>() == 0.0) return it + 1;
    z = zn;
    g = gn;
    f = fn;
  }
  return max_iter;
}

/// Gauss-Newton on equalities and violated inequalities with variables at their bounds held fixed.
void restore(const LocalProblem& p, Vec& z) {
  for (int it = 0; it < 20; ++it) {
    std::vector<double> r;
    std::vector<Vec> rows;
    for (const auto& h : p.eq) {
      r.push_back(h.value(z));
      rows.push_back(h.gradient(z));
    }
    for (const auto& g : p.ineq) {
      const double v = g.value(z);
      if (v > 0.0) {
        r.push_back(v);
        rows.push_back(g.gradient(z));
      }
    }
    if (r.empty()) return;
    double norm = 0.0;
    for (double v : r) norm = std::max(norm, std::abs(v));
    if (norm <= 1e-13) return;
    std::vector<int> freev;
    for (int i = 0; i < p.n; ++i) {
      if (z(i) > p.lo(i) + 1e-12 && z(i) < p.hi(i) - 1e-12) freev.push_back(i);
    }
    if (freev.empty()) return;
    Mat J(static_cast<int>(r.size()), static_cast<int>(freev.size()));
    Vec rv(static_cast<int>(r.size()));
    for (size_t k = 0; k < r.size(); ++k) {
      rv(static_cast<int>(k)) = r[k];
      for (size_t c = 0; c < freev.size(); ++c) J(static_cast<int>(k), static_cast<int>(c)) = rows[k](freev[c]);
    }
    // Minimum-norm correction.
    const Vec dz = J.completeOrthogonalDecomposition().solve(-rv);
    Vec zn = z;
    for (size_t c = 0; c < freev.size(); ++c) zn(freev[c]) += dz(static_cast<int>(c));
    zn = project(p, zn);
    if (p.max_violation(zn) >= p.max_violation(z)) return;
    z = zn;
  }
}

}  // namespace

LocalResult solve_local(const LocalProblem& p, const Vec& z0, const LocalOptions& o) {
  if (z0.size() != p.n || p.lo.size() != p.n || p.hi.size() != p.n) {
    throw PreconditionError("solve_local: dimension mismatch");
  }
  LocalResult res;
  Vec z = project(p, z0);
  const double fscale = 1.0 / std::max(1.0, p.objective.gradient(z).lpNorm<Eigen::Infinity>());
  Vec lam = Vec::Zero(static_cast<int>(p.eq.size()));
  Vec mu = Vec::Zero(static_cast<int>(p.ineq.size()));
  double rho = 10.0;
  double prev_infeas = std::numeric_limits<double>::infinity();
  double inner_tol = 1e-4;
  for (int outer = 0; outer < o.max_outer; ++outer) {
    res.outer_iterations = outer + 1;
    Augmented a{p, fscale, rho, lam, mu};
    res.inner_iterations += projected_newton(p, a, z, o.max_inner, inner_tol);
    double infeas = 0.0;
    for (size_t k = 0; k < p.eq.size(); ++k) {
      const double h = p.eq[k].value(z);
      lam(k) += rho * h;
      infeas = std::max(infeas, std::abs(h));
    }
    for (size_t k = 0; k < p.ineq.size(); ++k) {
      const double g = p.ineq[k].value(z);
      const double m = std::max(0.0, mu(k) + rho * g);
      infeas = std::max(infeas, std::abs(std::max(g, -mu(k) / rho)));
      mu(k) = m;
    }
    if (infeas <= o.feas_tol && inner_tol <= o.opt_tol * 10.0) break;
    if (infeas > 0.25 * prev_infeas) rho = std::min(rho * 10.0, 1e10);
    prev_infeas = infeas;
    inner_tol = std::max(o.opt_tol, inner_tol * 0.1);
  }
  restore(p, z);
  res.z = z;
  res.objective = p.objective.value(z);
  res.max_violation = p.max_violation(z);
  return res;
}

}  // namespace sbc
