#include "dfrc/hermitian.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace dfrc {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;
}

int svec_order(Eigen::Index length) {
  auto m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(length))));
  if (static_cast<Eigen::Index>(m) * m != length)
    throw ContractViolation("svec: length is not a perfect square");
  return m;
}

RVector svec_herm_part(const CMatrix& X) {
  const Eigen::Index m = X.rows();
  RVector v(m * m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = X(i, i).real();
  Eigen::Index p = m;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      cdouble h = 0.5 * (X(i, j) + std::conj(X(j, i)));
      v[p++] = kSqrt2 * h.real();
      v[p++] = kSqrt2 * h.imag();
    }
  return v;
}

RVector svec(const CMatrix& X) {
  require_hermitian(X, "svec");
  return svec_herm_part(X);
}

CMatrix smat(const RVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim)
    throw ContractViolation("smat: length does not match dimension");
  CMatrix X(dim, dim);
  for (int i = 0; i < dim; ++i) X(i, i) = v[i];
  Eigen::Index p = dim;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      cdouble z(v[p] / kSqrt2, v[p + 1] / kSqrt2);
      p += 2;
      X(i, j) = z;
      X(j, i) = std::conj(z);
    }
  return X;
}

bool is_hermitian(const CMatrix& X, double tol) {
  if (X.rows() != X.cols()) return false;
  if (X.size() == 0) return true;
  double scale = X.cwiseAbs().maxCoeff();
  return (X - X.adjoint()).cwiseAbs().maxCoeff() <= tol * scale + 1e-14;
}

void require_hermitian(const CMatrix& X, const char* who) {
  if (!is_hermitian(X)) throw ContractViolation(std::string(who) + ": matrix not Hermitian");
}

RVector hermitian_eigenvalues(const CMatrix& X) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

int numerical_rank(const CMatrix& X, double rel_tol) {
  RVector ev = hermitian_eigenvalues(X);
  double top = ev.size() ? ev.maxCoeff() : 0.0;
  if (top <= 0.0) return 0;
  return static_cast<int>((ev.array() > rel_tol * top).count());
}

CMatrix psd_factor(const CMatrix& X, double clip_rel) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((X + X.adjoint()) * 0.5);
  RVector ev = es.eigenvalues();
  double top = ev.size() ? std::max(ev.maxCoeff(), 0.0) : 0.0;
  RVector root(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    root[i] = (top > 0.0 && ev[i] > clip_rel * top) ? std::sqrt(ev[i]) : 0.0;
  return es.eigenvectors() * root.asDiagonal();
}

RowQR row_qr(const CMatrix& X) {
  const Eigen::Index k = X.rows(), n = X.cols();
  if (k > n) throw ContractViolation("row QR: more rows than columns");
  Eigen::HouseholderQR<CMatrix> qr(X.adjoint());
  CMatrix Qt = qr.householderQ();  // n x n
  CMatrix Rt = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();  // k x k
  CVector phase = CVector::Ones(n);
  for (Eigen::Index i = 0; i < k; ++i) {
    double mag = std::abs(Rt(i, i));
    if (mag > 0.0) phase[i] = Rt(i, i) / mag;
  }
  RowQR out;
  // X = Rt^H Qt^H (first k rows); L = Rt^H D, Q = D^H Qt^H.
  out.L = Rt.adjoint() * phase.head(k).asDiagonal();
  out.Q = phase.conjugate().asDiagonal() * Qt.adjoint();
  for (Eigen::Index i = 0; i < k; ++i) out.L(i, i) = std::abs(out.L(i, i));
  return out;
}

CMatrix lower_triangular_from_factor(const CMatrix& F) {
  const Eigen::Index m = F.rows();
  CMatrix G = CMatrix::Zero(m, std::max(m, F.cols()));
  G.leftCols(F.cols()) = F;
  return row_qr(G).L;
}

CMatrix semidefinite_cholesky(const CMatrix& X, double clip_rel) {
  return lower_triangular_from_factor(psd_factor(X, clip_rel));
}

}  // namespace dfrc
