#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "dfrc/hermitian.hpp"

namespace testutil {

// Projected-gradient (FISTA) oracle for  min z'Qz + q'z  with 0 <= X <= I, z = svec(X).
inline double pg_oracle(const dfrc::RMatrix& Q, const dfrc::RVector& q, int order) {
  auto project = [order](const dfrc::RVector& v) {
    Eigen::SelfAdjointEigenSolver<dfrc::CMatrix> es(dfrc::smat(v, order));
    dfrc::RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    return dfrc::svec_herm_part(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint());
  };
  const double lip = 2.0 * Eigen::SelfAdjointEigenSolver<dfrc::RMatrix>(Q).eigenvalues().maxCoeff();
  dfrc::RVector z = dfrc::RVector::Zero(q.size()), y = z;
  double t = 1.0;
  for (int it = 0; it < 40000; ++it) {
    dfrc::RVector zn = project(y - (2.0 * Q * y + q) / lip);
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = zn + ((t - 1.0) / tn) * (zn - z);
    z = zn;
    t = tn;
  }
  return z.dot(Q * z) + q.dot(z);
}

}  // namespace testutil
