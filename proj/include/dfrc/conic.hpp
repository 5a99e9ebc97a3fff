#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dfrc/types.hpp"

namespace dfrc {

// svec(X) = map * z + offset must be PSD, X Hermitian of order `order`.
struct PsdBlock {
  int order = 0;
  RMatrix map;     // order^2 x n
  RVector offset;  // order^2
};

// minimize z^T Q z + q^T z + c
// subject to A z = b, G z <= h, and every PSD block.
struct ConicProblem {
  int n = 0;
  RMatrix Q;  // empty means zero
  RVector q;
  double c = 0.0;
  std::vector<PsdBlock> psd;
  RMatrix A;
  RVector b;
  RMatrix G;
  RVector h;

  explicit ConicProblem(int n_ = 0);
  // Throws ContractViolation on any dimension inconsistency.
  void validate() const;
  double objective(const RVector& z) const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations, NumericalFailure };
const char* to_string(SolveStatus s);

enum class SolverMethod { Auto, InteriorPoint, Admm };

struct SolverConfig {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter_ipm = 200;
  int max_iter_admm = 50000;
  // Certificate threshold for declaring infeasibility/unboundedness.
  double infeas_tol = 1e-8;
  SolverMethod method = SolverMethod::Auto;
  bool verbose = false;

  void validate() const;
};

struct ResidualReport {
  double primal = 0.0;  // relative distance of (A z - b, h - G z, PSD blocks) from feasibility
  double dual = 0.0;    // solver-reported relative dual residual
  double gap = 0.0;     // solver-reported duality gap
  double certificate = 0.0;  // infeasibility certificate residual when status is not Optimal
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  RVector z;
  double objective = 0.0;
  ResidualReport residuals;
  int iterations = 0;
  std::string method;
};

ConicSolution solve(const ConicProblem& problem, const SolverConfig& cfg = {});

// Primal feasibility measure used in ResidualReport::primal.
double primal_residual(const ConicProblem& problem, const RVector& z);

// Q = G^T G restricted to the support of Q; objective becomes t + q^T z + c with the
// rotated cone ||G z||^2 <= t written as a second-order cone (t+1, t-1, 2 G z).
// Variables become (z, t); without a cone (Q = 0) t is absent.
struct Epigraph {
  RMatrix factor;            // r x n, factor^T factor = Q (after clipping)
  std::vector<int> support;  // columns of Q that are not identically zero
  RVector cost;              // (q, 1), or q when there is no cone
  double constant = 0.0;
  bool has_cone() const { return factor.rows() > 0; }
};
// Throws ContractViolation if Q is indefinite beyond -1e-9 ||Q||.
Epigraph quadratic_epigraph(const RMatrix& Q, const RVector& q, double c,
                            double clip_rel = 1e-14);

// Plain-text dump: dimensions, then dense blocks row-major.
void write_problem(std::ostream& os, const ConicProblem& problem);

}  // namespace dfrc
