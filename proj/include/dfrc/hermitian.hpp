#pragma once

#include "dfrc/types.hpp"

namespace dfrc {

// Real parametrization of an M x M Hermitian matrix (length M^2): the M diagonal
// entries, then for i < j in row-major order sqrt(2) Re X_ij, sqrt(2) Im X_ij.
// <svec(A), svec(B)> = Re tr(A^H B).
RVector svec(const CMatrix& X);
CMatrix smat(const RVector& v, int dim);
// Dimension M with M^2 == length; throws ContractViolation otherwise.
int svec_order(Eigen::Index length);

// Same encoding without the Hermitian check, applied to (X + X^H)/2.
RVector svec_herm_part(const CMatrix& X);

// Coefficient vector g with g . svec(R) = Re tr(X^H R) for every Hermitian R.
inline RVector linear_functional(const CMatrix& X) { return svec_herm_part(X); }

bool is_hermitian(const CMatrix& X, double tol = 1e-10);
void require_hermitian(const CMatrix& X, const char* who);

// Ascending eigenvalues of a Hermitian matrix.
RVector hermitian_eigenvalues(const CMatrix& X);

// Number of eigenvalues above rel_tol * lambda_max.
int numerical_rank(const CMatrix& X, double rel_tol);

// F with F F^H = X after clipping eigenvalues below clip_rel * lambda_max to zero.
CMatrix psd_factor(const CMatrix& X, double clip_rel = 1e-9);

// Lower-triangular L with positive real diagonal (where nonzero) and L L^H = F F^H.
CMatrix lower_triangular_from_factor(const CMatrix& F);

// Lower-triangular semidefinite factor of a PSD matrix (eigen-clipped, then LQ).
CMatrix semidefinite_cholesky(const CMatrix& X, double clip_rel = 1e-9);

// Row QR: X = L Q with L lower triangular (positive real diagonal where nonzero) and
// Q with orthonormal rows, Q of size cols x cols (full).
struct RowQR {
  CMatrix L;  // rows x rows
  CMatrix Q;  // cols x cols, unitary
};
RowQR row_qr(const CMatrix& X);

}  // namespace dfrc
