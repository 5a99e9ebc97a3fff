#pragma once

// Internal standard form shared by the interior-point and ADMM back ends.

#include <vector>

#include <Eigen/Sparse>

#include "dfrc/conic.hpp"

namespace dfrc::detail {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Cone K = R+^l x SOC(q_1) x ... x Herm+(s_1) x ...; Hermitian blocks are svec-encoded
// (length s_i^2). Vectors are laid out in that order.
struct ConeDims {
  int l = 0;
  std::vector<int> q;
  std::vector<int> s;

  int size() const;
  // Barrier degree: l + #soc + sum s_i.
  int degree() const;
};

// minimize c^T x  s.t.  G x + s = h, s in K, A x = b.
struct LinearConeProgram {
  RVector c;
  SpMat G;
  RVector h;
  SpMat A;
  RVector b;
  ConeDims dims;
  double constant = 0.0;
};

struct LcpResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  RVector x, y, z, s;
  int iterations = 0;
  double pres = 0.0, dres = 0.0, gap = 0.0, cert = 0.0;
};

LcpResult solve_ipm(const LinearConeProgram& p, const SolverConfig& cfg);

// min 1/2 x^T P x + q^T x  s.t. A x + s = b, s in {0}^m_eq x K.
struct QuadConeProgram {
  RMatrix P;
  RVector q;
  SpMat A;
  RVector b;
  int m_eq = 0;
  ConeDims dims;  // soc blocks are not supported here
  double constant = 0.0;
};

struct QcpResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  RVector x, y, s;
  int iterations = 0;
  double pres = 0.0, dres = 0.0, gap = 0.0, cert = 0.0;
};

QcpResult solve_admm(const QuadConeProgram& p, const SolverConfig& cfg);

}  // namespace dfrc::detail
