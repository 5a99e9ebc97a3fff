#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dfrc/conic.hpp"
#include "dfrc/objective.hpp"

namespace dfrc {

class DegenerateExtraction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class TightnessViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class PreconditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DegenerateUser : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DesignConfig {
  double total_power = 1.0;
  double noise_power = 0.01;
  // Linear SINR thresholds: one value (broadcast to all users) or one per user.
  std::vector<double> gamma{0.0};
  // Opt-in: a user whose relaxed covariance carries no power gets w_k = 0.
  bool allow_degenerate_users = false;

  void validate() const;
  RVector thresholds(int users) const;
};

enum class DesignStatus { Feasible, Infeasible, SolverFailure };
const char* to_string(DesignStatus s);

struct DesignOutcome {
  DesignStatus status = DesignStatus::SolverFailure;
  CMatrix R;
  Precoder W;
  double alpha = 0.0;
  double loss = 0.0;          // eval_loss(W W^H, alpha)
  double relaxed_loss = 0.0;  // objective reported by the convex program
  RVector sinr;
  ConicSolution solver;
  std::string note;
};

struct RadarOnlyResult {
  CMatrix R;
  double alpha = 0.0;
  double loss = 0.0;
  ConicSolution solver;
};

RadarOnlyResult radar_only(const RadarObjective& obj, const DesignConfig& cfg,
                           const SolverConfig& scfg = {});
RadarOnlyResult radar_only(const ArrayGeometry& geom, const BeamSpec& spec,
                           const DesignConfig& cfg, const SolverConfig& scfg = {});

struct SdrRelaxed {
  ConicSolution solver;
  CMatrix R;
  std::vector<CMatrix> Rk;
  double alpha = 0.0;
  double loss = 0.0;
};

SdrRelaxed sdr_solve(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                     const SolverConfig& scfg = {});

// w = R_k h / sqrt(h^H R_k h). Throws DegenerateExtraction when h^H R_k h <= eps, with
// eps = 1e-12 ||R_k||_F ||h||^2 unless given.
CVector rank_one_extract(const CMatrix& Rk, const CVector& h, double eps = -1.0);

// Lower-triangular W_r with W_r W_r^H = R - sum w_k w_k^H (eigenvalues below
// 1e-9 lambda_max clipped). Throws TightnessViolation if the residual is indefinite
// beyond -1e-6 lambda_max(R).
CMatrix radar_precoder_completion(const CMatrix& R, const std::vector<CVector>& w);

DesignOutcome sdr_beamform(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                           const SolverConfig& scfg = {});

struct ZfRelaxed {
  ConicSolution solver;
  CMatrix R;
  RVector p;
  double alpha = 0.0;
  double loss = 0.0;  // radar loss of (R, alpha), without the tie-break term
};

// Among designs of equal loss, prefers the one with the largest min_k h_k^H R h_k
// (objective loss - 1e-3 P t, t <= h_k^H R h_k).
ZfRelaxed zf_solve(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                   const SolverConfig& scfg = {});

// W (M x (K+M)) with W W^H = R and H W = F. Requires H R H^H = F F^H within
// gram_tol (relative) and F of full row rank.
CMatrix zf_construct_precoder(const CMatrix& R, const CMatrix& F, const CMatrix& H,
                              double gram_tol = 1e-8);

DesignOutcome zf_beamform(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                          const SolverConfig& scfg = {});

// Fairness SINR of the ZF design solved without any SINR constraint.
double gamma_II(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                const SolverConfig& scfg = {});

// Same as above with the radar objective built from (geom, spec).
DesignOutcome sdr_beamform(const ArrayGeometry& geom, const BeamSpec& spec,
                           const DesignConfig& cfg, const CMatrix& H, const SolverConfig& scfg = {});
DesignOutcome zf_beamform(const ArrayGeometry& geom, const BeamSpec& spec,
                          const DesignConfig& cfg, const CMatrix& H, const SolverConfig& scfg = {});
double gamma_II(const ArrayGeometry& geom, const BeamSpec& spec, const DesignConfig& cfg,
                const CMatrix& H, const SolverConfig& scfg = {});

}  // namespace dfrc
