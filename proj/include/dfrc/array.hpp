#pragma once

#include <vector>

#include "dfrc/types.hpp"

namespace dfrc {

// Uniform linear transmit array. Element spacing is in carrier wavelengths.
struct ArrayGeometry {
  int num_elements = 10;
  double element_spacing = 0.5;

  void validate() const;
};

// Desired radar beampattern: ideal unit-gain beams of width `beam_width_deg`
// centred on each target direction, evaluated on `grid_deg`.
struct BeamSpec {
  std::vector<double> target_directions_deg;
  double beam_width_deg = 10.0;
  std::vector<double> grid_deg;
  double cross_weight = 1.0;

  void validate() const;
  int num_targets() const { return static_cast<int>(target_directions_deg.size()); }
  int grid_size() const { return static_cast<int>(grid_deg.size()); }
};

// Steering vector a(theta), element m = exp(j 2 pi d m sin(theta)), m = 0..M-1.
// Throws DomainError for |theta| > 90 degrees.
CVector steering_vector(const ArrayGeometry& geom, double theta_deg);

// Columns are steering vectors for each angle in `angles_deg` (M x L).
CMatrix steering_matrix(const ArrayGeometry& geom, const std::vector<double>& angles_deg);

// Transmit power towards theta: a^H(theta) R a(theta).
double beam_pattern(const ArrayGeometry& geom, const CMatrix& R, double theta_deg);

// Beam pattern evaluated over a whole grid.
std::vector<double> beam_pattern(const ArrayGeometry& geom, const CMatrix& R,
                                 const std::vector<double>& grid_deg);

// Cross-correlation pattern a^H(theta2) R a(theta1).
cdouble cross_correlation(const ArrayGeometry& geom, const CMatrix& R, double theta1_deg,
                          double theta2_deg);

// Ideal pattern d(theta): 1 inside any beam (boundaries inclusive), else 0.
double desired_pattern(const BeamSpec& spec, double theta_deg);

// Uniform grid lo, lo + res, ... up to and including hi when it lands on the grid.
std::vector<double> angle_grid(double lo_deg, double hi_deg, double resolution_deg);

// Beam spec used throughout the numerical study: beams at -40, 0, 40 degrees,
// 10 degree width, 0.1 degree grid over [-90, 90], w_c = 1.
BeamSpec default_beam_spec();

inline double deg_to_rad(double deg) { return deg * (3.14159265358979323846 / 180.0); }

}  // namespace dfrc
