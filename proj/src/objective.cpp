#include "dfrc/objective.hpp"

#include <cmath>

#include "dfrc/hermitian.hpp"

namespace dfrc {

RVector RadarObjective::pack(const CMatrix& R, double alpha) const {
  if (R.rows() != M || R.cols() != M) throw ContractViolation("radar loss: size mismatch");
  RVector z(dim());
  z.head(M * M) = svec(R);
  z[M * M] = alpha;
  return z;
}

RadarObjective build_radar_loss(const ArrayGeometry& geom, const BeamSpec& spec) {
  geom.validate();
  spec.validate();
  RadarObjective obj;
  obj.M = geom.num_elements;
  obj.geom = geom;
  obj.spec = spec;
  const int M = obj.M, n = obj.dim(), L = spec.grid_size(), P = spec.num_targets();

  CMatrix A = steering_matrix(geom, spec.grid_deg);
  obj.desired.resize(L);
  obj.pattern_rows.resize(L, M * M);
  for (int l = 0; l < L; ++l) {
    obj.desired[l] = desired_pattern(spec, spec.grid_deg[l]);
    obj.pattern_rows.row(l) = linear_functional(A.col(l) * A.col(l).adjoint()).transpose();
  }

  const int pairs = P * (P - 1) / 2;
  RMatrix F = RMatrix::Zero(L + 2 * pairs, n);
  const double grid_w = 1.0 / std::sqrt(static_cast<double>(L));
  F.topLeftCorner(L, M * M) = -grid_w * obj.pattern_rows;
  F.col(M * M).head(L) = grid_w * obj.desired;

  if (pairs > 0 && spec.cross_weight > 0.0) {
    CMatrix At = steering_matrix(geom, spec.target_directions_deg);
    const double w = std::sqrt(spec.cross_weight * 2.0 / (static_cast<double>(P) * P - P));
    int r = L;
    for (int p = 0; p < P; ++p)
      for (int qq = p + 1; qq < P; ++qq) {
        // a_q^H R a_p = tr((a_q a_p^H)^H R); real and imaginary parts separately
        CMatrix X = At.col(qq) * At.col(p).adjoint();
        F.row(r++).head(M * M) = w * linear_functional(X).transpose();
        F.row(r++).head(M * M) = w * linear_functional(cdouble(0.0, 1.0) * X).transpose();
      }
  }

  obj.Q = F.transpose() * F;
  obj.q = RVector::Zero(n);
  obj.c = 0.0;
  return obj;
}

LossParts loss_parts(const RadarObjective& obj, const CMatrix& R, double alpha) {
  if (R.rows() != obj.M || R.cols() != obj.M) throw ContractViolation("radar loss: size mismatch");
  require_hermitian(R, "radar loss");
  LossParts out;
  const auto& spec = obj.spec;
  const int L = spec.grid_size(), P = spec.num_targets();
  std::vector<double> pat = beam_pattern(obj.geom, R, spec.grid_deg);
  for (int l = 0; l < L; ++l) {
    double e = alpha * obj.desired[l] - pat[l];
    out.pattern += e * e;
  }
  out.pattern /= L;
  if (P > 1) {
    CMatrix At = steering_matrix(obj.geom, spec.target_directions_deg);
    CMatrix RA = R * At;
    double acc = 0.0;
    for (int p = 0; p < P; ++p)
      for (int qq = p + 1; qq < P; ++qq) acc += std::norm(At.col(qq).dot(RA.col(p)));
    out.cross = spec.cross_weight * 2.0 / (static_cast<double>(P) * P - P) * acc;
  }
  return out;
}

double eval_loss(const RadarObjective& obj, const CMatrix& R, double alpha) {
  return loss_parts(obj, R, alpha).total();
}

AlphaFit minimize_alpha(const RadarObjective& obj, const CMatrix& R) {
  std::vector<double> pat = beam_pattern(obj.geom, R, obj.spec.grid_deg);
  double num = 0.0, den = 0.0;
  for (int l = 0; l < obj.desired.size(); ++l) {
    num += obj.desired[l] * pat[l];
    den += obj.desired[l] * obj.desired[l];
  }
  AlphaFit fit;
  fit.alpha = den > 0.0 ? num / den : 0.0;
  fit.loss = eval_loss(obj, R, fit.alpha);
  return fit;
}

}  // namespace dfrc
