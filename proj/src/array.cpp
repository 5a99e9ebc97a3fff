#include "dfrc/array.hpp"

#include <cmath>
#include <string>

namespace dfrc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;
constexpr double kAngleSlack = 1e-9;

void check_hermitian(const CMatrix& R, const char* who) {
  if (R.rows() != R.cols()) throw ContractViolation(std::string(who) + ": matrix not square");
  double scale = R.cwiseAbs().maxCoeff();
  if ((R - R.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale + 1e-14)
    throw ContractViolation(std::string(who) + ": matrix not Hermitian");
}

}  // namespace

void ArrayGeometry::validate() const {
  if (num_elements < 1) throw DomainError("array: need at least one element");
  if (!(element_spacing > 0.0)) throw DomainError("array: element spacing must be positive");
}

void BeamSpec::validate() const {
  if (target_directions_deg.empty()) throw DomainError("beam spec: no target directions");
  if (!(beam_width_deg > 0.0)) throw DomainError("beam spec: beam width must be positive");
  if (!(cross_weight >= 0.0)) throw DomainError("beam spec: cross weight must be nonnegative");
  if (grid_deg.empty()) throw DomainError("beam spec: empty grid");
  for (double t : target_directions_deg)
    if (std::abs(t) > 90.0) throw DomainError("beam spec: target outside [-90, 90]");
  for (std::size_t i = 0; i < grid_deg.size(); ++i) {
    if (std::abs(grid_deg[i]) > 90.0 + kAngleSlack)
      throw DomainError("beam spec: grid point outside [-90, 90]");
    if (i > 0 && !(grid_deg[i] > grid_deg[i - 1]))
      throw DomainError("beam spec: grid not strictly increasing");
  }
}

CVector steering_vector(const ArrayGeometry& geom, double theta_deg) {
  if (!(std::abs(theta_deg) <= 90.0 + kAngleSlack))
    throw DomainError("steering vector: angle outside [-90, 90] degrees");
  geom.validate();
  const double phase = kTwoPi * geom.element_spacing * std::sin(deg_to_rad(theta_deg));
  CVector a(geom.num_elements);
  for (int m = 0; m < geom.num_elements; ++m) a[m] = std::polar(1.0, phase * m);
  return a;
}

CMatrix steering_matrix(const ArrayGeometry& geom, const std::vector<double>& angles_deg) {
  CMatrix A(geom.num_elements, static_cast<Eigen::Index>(angles_deg.size()));
  for (std::size_t l = 0; l < angles_deg.size(); ++l)
    A.col(static_cast<Eigen::Index>(l)) = steering_vector(geom, angles_deg[l]);
  return A;
}

double beam_pattern(const ArrayGeometry& geom, const CMatrix& R, double theta_deg) {
  return cross_correlation(geom, R, theta_deg, theta_deg).real();
}

std::vector<double> beam_pattern(const ArrayGeometry& geom, const CMatrix& R,
                                 const std::vector<double>& grid_deg) {
  check_hermitian(R, "beam pattern");
  if (R.rows() != geom.num_elements) throw ContractViolation("beam pattern: size mismatch");
  CMatrix A = steering_matrix(geom, grid_deg);
  CMatrix RA = R * A;
  std::vector<double> out(grid_deg.size());
  for (Eigen::Index l = 0; l < A.cols(); ++l) out[l] = A.col(l).dot(RA.col(l)).real();
  return out;
}

cdouble cross_correlation(const ArrayGeometry& geom, const CMatrix& R, double theta1_deg,
                          double theta2_deg) {
  check_hermitian(R, "cross correlation");
  if (R.rows() != geom.num_elements) throw ContractViolation("cross correlation: size mismatch");
  CVector a1 = steering_vector(geom, theta1_deg);
  CVector a2 = steering_vector(geom, theta2_deg);
  cdouble v = a2.dot(R * a1);  // dot conjugates its left argument
  if (theta1_deg == theta2_deg) {
    if (std::abs(v.imag()) > 1e-10 * std::abs(v.real()) + 1e-12)
      throw ContractViolation("beam pattern: complex value from non-Hermitian input");
    v = {v.real(), 0.0};
  }
  return v;
}

double desired_pattern(const BeamSpec& spec, double theta_deg) {
  const double half = 0.5 * spec.beam_width_deg;
  for (double c : spec.target_directions_deg)
    if (theta_deg >= c - half - kAngleSlack && theta_deg <= c + half + kAngleSlack) return 1.0;
  return 0.0;
}

std::vector<double> angle_grid(double lo_deg, double hi_deg, double resolution_deg) {
  if (!(resolution_deg > 0.0)) throw DomainError("angle grid: resolution must be positive");
  if (!(lo_deg < hi_deg)) throw DomainError("angle grid: need lo < hi");
  const auto count = static_cast<std::size_t>(
      std::floor((hi_deg - lo_deg) / resolution_deg + 1e-9)) + 1;
  std::vector<double> g(count);
  // lo + i*res rather than accumulation keeps 0.1 degree steps exact enough
  for (std::size_t i = 0; i < count; ++i) g[i] = lo_deg + static_cast<double>(i) * resolution_deg;
  if (g.back() > hi_deg) g.back() = hi_deg;
  return g;
}

BeamSpec default_beam_spec() {
  BeamSpec s;
  s.target_directions_deg = {-40.0, 0.0, 40.0};
  s.beam_width_deg = 10.0;
  s.grid_deg = angle_grid(-90.0, 90.0, 0.1);
  s.cross_weight = 1.0;
  return s;
}

}  // namespace dfrc
