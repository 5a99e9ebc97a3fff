#pragma once

#include "dfrc/array.hpp"

namespace dfrc {

// Radar loss as a quadratic form z^T Q z + q^T z + c over z = (svec R, alpha).
struct RadarObjective {
  int M = 0;
  RMatrix Q;
  RVector q;
  double c = 0.0;
  ArrayGeometry geom;
  BeamSpec spec;
  RVector desired;       // d(theta_l) on the grid
  RMatrix pattern_rows;  // L x M^2, row l = svec(a_l a_l^H)

  int dim() const { return M * M + 1; }
  RVector pack(const CMatrix& R, double alpha) const;
  double eval(const RVector& z) const { return z.dot(Q * z) + q.dot(z) + c; }
};

RadarObjective build_radar_loss(const ArrayGeometry& geom, const BeamSpec& spec);

double eval_loss(const RadarObjective& obj, const CMatrix& R, double alpha);

// Pattern-matching and cross-correlation parts evaluated by direct summation.
struct LossParts {
  double pattern = 0.0;
  double cross = 0.0;
  double total() const { return pattern + cross; }
};
LossParts loss_parts(const RadarObjective& obj, const CMatrix& R, double alpha);

struct AlphaFit {
  double alpha = 0.0;
  double loss = 0.0;
};
AlphaFit minimize_alpha(const RadarObjective& obj, const CMatrix& R);

}  // namespace dfrc
