#pragma once

#include <vector>

#include "cone_program.hpp"

namespace dfrc::detail {

RVector cone_identity(const ConeDims& dims);

// Smallest "eigenvalue" over all blocks (x_i, x0 - ||x1||, lambda_min).
double cone_margin(const ConeDims& dims, const RVector& x);

// u o v in the product Jordan algebra.
RVector jordan_product(const ConeDims& dims, const RVector& u, const RVector& v);

// Euclidean projection onto K (no SOC support needed by callers, but handled).
RVector project_cone(const ConeDims& dims, const RVector& x);

// Nesterov-Todd scaling W for a pair (s, z) in int K:  W z = W^{-T} s = lambda.
// Hermitian blocks of lambda are diagonal.
class NtScaling {
 public:
  NtScaling(const ConeDims& dims, const RVector& s, const RVector& z);

  const RVector& lambda() const { return lambda_; }

  // W u, W^T u, W^{-1} u, W^{-T} u.
  RVector apply(const RVector& u, bool transpose, bool inverse) const;

  // lambda^{-1} o d: x with lambda o x = d.
  RVector lambda_inv_circ(const RVector& d) const;

  // Largest a with lambda + a*d in K (infinity if unbounded).
  double max_step(const RVector& d) const;

  // W^{-T} block by block: the l nonneg entries as a diagonal, then dense matrices for
  // the soc and psd cones in layout order.
  RVector nonneg_inv_t() const;
  std::vector<RMatrix> dense_inv_t() const;

 private:
  ConeDims dims_;
  RVector lambda_;
  RVector d_;                     // nonneg: sqrt(s/z)
  std::vector<double> beta_;      // soc
  std::vector<RVector> wbar_;     // soc
  std::vector<CMatrix> rw_;       // psd: W(U) = Rw^H U Rw
  std::vector<CMatrix> rw_inv_;
  std::vector<RVector> lam_psd_;  // psd: diagonal of lambda
};

}  // namespace dfrc::detail
