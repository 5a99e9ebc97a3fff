// Operator-splitting fallback (OSQP/COSMO style) for  min 1/2 x'Px + q'x,
// Ax + s = b, s in {0} x K.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Cholesky>

#include "cone_ops.hpp"

namespace dfrc::detail {

namespace {

double inf_norm(const RVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Projection onto {0}^m_eq x K.
RVector project(const QuadConeProgram& p, const RVector& v) {
  RVector out(v.size());
  out.head(p.m_eq).setZero();
  out.tail(v.size() - p.m_eq) = project_cone(p.dims, v.tail(v.size() - p.m_eq));
  return out;
}

// Distance of -y from the dual cone {free}^m_eq x K (K self-dual).
double dual_cone_violation(const QuadConeProgram& p, const RVector& y) {
  RVector t = -y.tail(y.size() - p.m_eq);
  return (t - project_cone(p.dims, t)).norm();
}

}  // namespace

QcpResult solve_admm(const QuadConeProgram& p, const SolverConfig& cfg) {
  const Eigen::Index n = p.q.size(), m = p.b.size();
  const double sigma = 1e-6, alpha = 1.6;
  double rho = 0.1;
  RVector rho_vec(m);
  auto set_rho = [&](double r) {
    rho = std::clamp(r, 1e-6, 1e6);
    rho_vec.setConstant(rho);
    rho_vec.head(p.m_eq).setConstant(1e3 * rho);
  };
  set_rho(rho);

  const RMatrix Ad = RMatrix(p.A);
  Eigen::LLT<RMatrix> fac;
  auto refactor = [&]() {
    RMatrix K = p.P + sigma * RMatrix::Identity(n, n) + Ad.transpose() * rho_vec.asDiagonal() * Ad;
    fac.compute(K);
    return fac.info() == Eigen::Success;
  };
  QcpResult res;
  if (!refactor()) return res;

  RVector x = RVector::Zero(n), s = project(p, p.b), y = RVector::Zero(m);
  RVector y_prev = y;
  const double eps_abs = cfg.abs_tol, eps_rel = cfg.rel_tol;

  for (int k = 1; k <= cfg.max_iter_admm; ++k) {
    RVector rhs = sigma * x - p.q + p.A.transpose() * RVector(rho_vec.cwiseProduct(p.b - s) + y);
    RVector xt = fac.solve(rhs);
    RVector st = p.b - p.A * xt;
    RVector x_next = alpha * xt + (1.0 - alpha) * x;
    RVector s_relax = alpha * st + (1.0 - alpha) * s;
    RVector s_next = project(p, s_relax + y.cwiseQuotient(rho_vec));
    y_prev = y;
    y += rho_vec.cwiseProduct(s_relax - s_next);
    x = x_next;
    s = s_next;

    if (k % 25 != 0 && k != cfg.max_iter_admm) continue;
    RVector Ax = p.A * x;
    RVector Px = p.P * x;
    RVector Aty = p.A.transpose() * y;
    double rp = inf_norm(Ax + s - p.b);
    double rd = inf_norm(Px + p.q - Aty);
    double ep = eps_abs + eps_rel * std::max({inf_norm(Ax), inf_norm(s), inf_norm(p.b)});
    double ed = eps_abs + eps_rel * std::max({inf_norm(Px), inf_norm(Aty), inf_norm(p.q)});
    res.iterations = k;
    res.pres = rp;
    res.dres = rd;
    if (cfg.verbose && k % 1000 == 0)
      std::fprintf(stderr, "admm %6d rp %.2e rd %.2e rho %.2e\n", k, rp, rd, rho);
    if (rp <= ep && rd <= ed) {
      res.status = SolveStatus::Optimal;
      res.x = x;
      res.y = y;
      res.s = s;
      res.gap = std::abs(x.dot(Px) + p.q.dot(x) - p.b.dot(y));
      return res;
    }

    // Primal infeasibility: -dy in K*, A' dy ~ 0, b' dy > 0.
    RVector dy = y - y_prev;
    double ndy = inf_norm(dy);
    if (ndy > 0.0) {
      double bdy = p.b.dot(dy);
      if (bdy > 0.0) {
        double atdy = inf_norm(p.A.transpose() * dy) / bdy;
        double cone = dual_cone_violation(p, dy) / bdy;
        if (atdy <= cfg.infeas_tol * 1e2 && cone <= cfg.infeas_tol * 1e2) {
          res.status = SolveStatus::Infeasible;
          res.cert = std::max(atdy, cone);
          res.x = x;
          res.y = dy / bdy;
          return res;
        }
      }
    }

    if (k % 100 == 0) {
      double num = rp / std::max({inf_norm(Ax), inf_norm(s), inf_norm(p.b), 1e-30});
      double den = rd / std::max({inf_norm(Px), inf_norm(Aty), inf_norm(p.q), 1e-30});
      double ratio = std::sqrt(num / std::max(den, 1e-30));
      if (ratio > 5.0 || ratio < 0.2) {
        set_rho(rho * ratio);
        if (!refactor()) return res;
      }
    }
  }
  res.status = SolveStatus::MaxIterations;
  res.x = x;
  res.y = y;
  res.s = s;
  return res;
}

}  // namespace dfrc::detail
