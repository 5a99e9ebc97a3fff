#include "dfrc/conic.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "cone_program.hpp"
#include "dfrc/hermitian.hpp"

namespace dfrc {

using detail::SpMat;

ConicProblem::ConicProblem(int n_) : n(n_), q(RVector::Zero(n_)), A(0, n_), b(0), G(0, n_), h(0) {}

void ConicProblem::validate() const {
  if (n < 1) throw ContractViolation("conic problem: no variables");
  if (Q.size() != 0 && (Q.rows() != n || Q.cols() != n))
    throw ContractViolation("conic problem: Q has wrong shape");
  if (Q.size() != 0 && (Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + Q.cwiseAbs().maxCoeff()))
    throw ContractViolation("conic problem: Q not symmetric");
  if (q.size() != n) throw ContractViolation("conic problem: q has wrong length");
  if (A.cols() != n || A.rows() != b.size())
    throw ContractViolation("conic problem: equality block has wrong shape");
  if (G.cols() != n || G.rows() != h.size())
    throw ContractViolation("conic problem: inequality block has wrong shape");
  for (const auto& blk : psd) {
    const Eigen::Index len = static_cast<Eigen::Index>(blk.order) * blk.order;
    if (blk.order < 1 || blk.map.rows() != len || blk.map.cols() != n || blk.offset.size() != len)
      throw ContractViolation("conic problem: PSD block has wrong shape");
  }
  if (!q.allFinite() || !A.allFinite() || !b.allFinite() || !G.allFinite() || !h.allFinite() ||
      (Q.size() && !Q.allFinite()))
    throw ContractViolation("conic problem: non-finite data");
}

double ConicProblem::objective(const RVector& z) const {
  double v = q.dot(z) + c;
  if (Q.size()) v += z.dot(Q * z);
  return v;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(abs_tol > 0.0 && rel_tol > 0.0 && feas_tol > 0.0 && infeas_tol > 0.0))
    throw ContractViolation("solver config: tolerances must be positive");
  if (max_iter_ipm < 1 || max_iter_admm < 1)
    throw ContractViolation("solver config: iteration limits must be positive");
}

Epigraph quadratic_epigraph(const RMatrix& Q, const RVector& q, double c, double clip_rel) {
  const Eigen::Index n = q.size();
  Epigraph epi;
  epi.constant = c;
  if (Q.size() != 0 && (Q.rows() != n || Q.cols() != n))
    throw ContractViolation("epigraph: Q has wrong shape");
  if (Q.size() != 0)
    for (Eigen::Index j = 0; j < n; ++j)
      if (Q.col(j).cwiseAbs().maxCoeff() > 0.0) epi.support.push_back(static_cast<int>(j));
  if (epi.support.empty()) {
    epi.factor = RMatrix(0, n);
    epi.cost = q;
    return epi;
  }
  // Identical columns (a variable entering Q only through a sum with others) are merged:
  // then Q = S' Qr S with S summing each group, and only Qr is decomposed.
  std::vector<int> reps, group(epi.support.size());
  {
    std::unordered_map<std::size_t, std::vector<int>> buckets;
    for (std::size_t i = 0; i < epi.support.size(); ++i) {
      const auto col = Q.col(epi.support[i]);
      std::size_t key = 0;
      for (Eigen::Index r = 0; r < n; ++r)
        key = key * 1000003u ^ std::hash<double>{}(col[r]);
      int g = -1;
      for (int cand : buckets[key])
        if (Q.col(epi.support[reps[cand]]) == col) {
          g = cand;
          break;
        }
      if (g < 0) {
        g = static_cast<int>(reps.size());
        reps.push_back(static_cast<int>(i));
        buckets[key].push_back(g);
      }
      group[i] = g;
    }
  }
  const auto k = static_cast<Eigen::Index>(reps.size());
  RMatrix Qs(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const int a = epi.support[reps[i]], b = epi.support[reps[j]];
      Qs(i, j) = 0.5 * (Q(a, b) + Q(b, a));
    }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(Qs);
  RVector ev = es.eigenvalues();
  const double top = std::max(std::abs(ev.maxCoeff()), std::abs(ev.minCoeff()));
  if (ev.minCoeff() < -1e-9 * top) throw ContractViolation("epigraph: Q is not PSD");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < k; ++i)
    if (ev[i] > clip_rel * top) keep.push_back(i);
  epi.factor = RMatrix::Zero(static_cast<Eigen::Index>(keep.size()), n);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    RVector row = std::sqrt(ev[keep[r]]) * es.eigenvectors().col(keep[r]);
    for (std::size_t i = 0; i < epi.support.size(); ++i)
      epi.factor(static_cast<Eigen::Index>(r), epi.support[i]) = row[group[i]];
  }
  if (keep.empty()) {
    epi.cost = q;
    return epi;
  }
  epi.cost.resize(n + 1);
  epi.cost << q, 1.0;
  return epi;
}

double primal_residual(const ConicProblem& p, const RVector& z) {
  double eq = 0.0;
  if (p.A.rows()) eq = (p.A * z - p.b).norm() / std::max(1.0, p.b.norm());
  double cone_sq = 0.0, hnorm_sq = p.h.squaredNorm();
  if (p.G.rows()) cone_sq += (p.G * z - p.h).cwiseMax(0.0).squaredNorm();
  for (const auto& blk : p.psd) {
    RVector v = blk.map * z + blk.offset;
    RVector ev = hermitian_eigenvalues(smat(v, blk.order));
    cone_sq += ev.cwiseMin(0.0).squaredNorm();
    hnorm_sq += blk.offset.squaredNorm();
  }
  return std::max(eq, std::sqrt(cone_sq) / std::max(1.0, std::sqrt(hnorm_sq)));
}

namespace {

SpMat to_sparse(const RMatrix& M) {
  return M.sparseView(1.0, 0.0);
}

ConicSolution solve_with_ipm(const ConicProblem& p, const SolverConfig& cfg) {
  Epigraph epi = quadratic_epigraph(p.Q.size() ? p.Q : RMatrix::Zero(p.n, p.n), p.q, p.c);
  const bool cone = epi.has_cone();
  const int nx = p.n + (cone ? 1 : 0);
  const auto r = static_cast<int>(epi.factor.rows());

  detail::LinearConeProgram lcp;
  lcp.c = epi.cost;
  lcp.constant = p.c;
  lcp.dims.l = static_cast<int>(p.G.rows());
  int rows = lcp.dims.l;
  if (cone) {
    lcp.dims.q.push_back(r + 2);
    rows += r + 2;
  }
  for (const auto& blk : p.psd) {
    lcp.dims.s.push_back(blk.order);
    rows += blk.order * blk.order;
  }
  RMatrix G = RMatrix::Zero(rows, nx);
  lcp.h = RVector::Zero(rows);
  int off = 0;
  G.block(0, 0, p.G.rows(), p.n) = p.G;
  lcp.h.head(p.G.rows()) = p.h;
  off = lcp.dims.l;
  if (cone) {
    G(off, p.n) = -1.0;
    lcp.h[off] = 1.0;
    G(off + 1, p.n) = -1.0;
    lcp.h[off + 1] = -1.0;
    G.block(off + 2, 0, r, p.n) = -2.0 * epi.factor;
    off += r + 2;
  }
  for (const auto& blk : p.psd) {
    const int len = blk.order * blk.order;
    G.block(off, 0, len, p.n) = -blk.map;
    lcp.h.segment(off, len) = blk.offset;
    off += len;
  }
  lcp.G = to_sparse(G);
  RMatrix A = RMatrix::Zero(p.A.rows(), nx);
  A.leftCols(p.n) = p.A;
  lcp.A = to_sparse(A);
  lcp.b = p.b;

  detail::LcpResult lr = detail::solve_ipm(lcp, cfg);
  ConicSolution sol;
  sol.status = lr.status;
  sol.method = "ipm";
  sol.iterations = lr.iterations;
  sol.residuals.dual = lr.dres;
  sol.residuals.gap = lr.gap;
  sol.residuals.certificate = lr.cert;
  if (lr.x.size() == nx) sol.z = lr.x.head(p.n);
  else sol.z = RVector::Zero(p.n);
  return sol;
}

ConicSolution solve_with_admm(const ConicProblem& p, const SolverConfig& cfg) {
  detail::QuadConeProgram qp;
  qp.P = p.Q.size() ? RMatrix(2.0 * p.Q) : RMatrix::Zero(p.n, p.n);
  qp.q = p.q;
  qp.constant = p.c;
  qp.m_eq = static_cast<int>(p.A.rows());
  qp.dims.l = static_cast<int>(p.G.rows());
  int rows = qp.m_eq + qp.dims.l;
  for (const auto& blk : p.psd) {
    qp.dims.s.push_back(blk.order);
    rows += blk.order * blk.order;
  }
  RMatrix A(rows, p.n);
  qp.b.resize(rows);
  A.topRows(qp.m_eq) = p.A;
  qp.b.head(qp.m_eq) = p.b;
  A.middleRows(qp.m_eq, qp.dims.l) = p.G;
  qp.b.segment(qp.m_eq, qp.dims.l) = p.h;
  int off = qp.m_eq + qp.dims.l;
  for (const auto& blk : p.psd) {
    const int len = blk.order * blk.order;
    A.middleRows(off, len) = -blk.map;
    qp.b.segment(off, len) = blk.offset;
    off += len;
  }
  qp.A = to_sparse(A);
  detail::QcpResult qr = detail::solve_admm(qp, cfg);
  ConicSolution sol;
  sol.status = qr.status;
  sol.method = "admm";
  sol.iterations = qr.iterations;
  sol.residuals.dual = qr.dres;
  sol.residuals.gap = qr.gap;
  sol.residuals.certificate = qr.cert;
  sol.z = qr.x.size() == p.n ? qr.x : RVector::Zero(p.n);
  return sol;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverConfig& cfg) {
  problem.validate();
  cfg.validate();
  ConicSolution sol;
  switch (cfg.method) {
    case SolverMethod::InteriorPoint:
      sol = solve_with_ipm(problem, cfg);
      break;
    case SolverMethod::Admm:
      sol = solve_with_admm(problem, cfg);
      break;
    case SolverMethod::Auto: {
      sol = solve_with_ipm(problem, cfg);
      if (sol.status == SolveStatus::NumericalFailure || sol.status == SolveStatus::MaxIterations) {
        ConicSolution alt = solve_with_admm(problem, cfg);
        if (alt.status == SolveStatus::Optimal || alt.status == SolveStatus::Infeasible) sol = alt;
      }
      break;
    }
  }
  sol.objective = problem.objective(sol.z);
  sol.residuals.primal = primal_residual(problem, sol.z);
  return sol;
}

void write_problem(std::ostream& os, const ConicProblem& p) {
  auto dump = [&os](const char* name, const RMatrix& M) {
    os << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? " " : "") << M(i, j);
      os << '\n';
    }
  };
  os << std::setprecision(17);
  os << "n " << p.n << '\n';
  os << "psd_blocks " << p.psd.size() << '\n';
  dump("Q", p.Q.size() ? p.Q : RMatrix::Zero(p.n, p.n));
  dump("q", p.q.transpose());
  os << "c " << p.c << '\n';
  dump("A", p.A);
  dump("b", p.b.transpose());
  dump("G", p.G);
  dump("h", p.h.transpose());
  for (std::size_t k = 0; k < p.psd.size(); ++k) {
    os << "block " << k << " order " << p.psd[k].order << '\n';
    dump("map", p.psd[k].map);
    dump("offset", p.psd[k].offset.transpose());
  }
}

}  // namespace dfrc
