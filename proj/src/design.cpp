#include "dfrc/design.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "dfrc/hermitian.hpp"
#include "dfrc/metrics.hpp"

namespace dfrc {

namespace {

// Places the radar objective (over svec R at column 0 and alpha at the last column).
// R = sum of `blocks` consecutive svec segments; alpha is the last variable.
void set_objective(ConicProblem& p, const RadarObjective& obj, int blocks = 1) {
  const int m2 = obj.M * obj.M;
  p.Q = RMatrix::Zero(p.n, p.n);
  for (int a = 0; a < blocks; ++a) {
    for (int b = 0; b < blocks; ++b)
      p.Q.block(a * m2, b * m2, m2, m2) = obj.Q.topLeftCorner(m2, m2);
    p.Q.block(a * m2, p.n - 1, m2, 1) = obj.Q.block(0, m2, m2, 1);
    p.Q.block(p.n - 1, a * m2, 1, m2) = obj.Q.block(m2, 0, 1, m2);
  }
  p.Q(p.n - 1, p.n - 1) = obj.Q(m2, m2);
  p.q = RVector::Zero(p.n);
  p.c = obj.c;
}

void add_power_equalities(ConicProblem& p, int M, double total_power, int extra_rows,
                          int blocks = 1) {
  p.A = RMatrix::Zero(M + extra_rows, p.n);
  p.b = RVector::Zero(M + extra_rows);
  for (int m = 0; m < M; ++m) {
    for (int b = 0; b < blocks; ++b) p.A(m, b * M * M + m) = 1.0;
    p.b[m] = total_power / M;
  }
}

CMatrix project_psd(const CMatrix& X) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((X + X.adjoint()) * 0.5);
  RVector ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

void check_channel(const RadarObjective& obj, const CMatrix& H) {
  Channel ch{H};
  ch.validate();
  if (H.cols() != obj.M) throw ContractViolation("design: channel width does not match array");
}

DesignStatus status_from(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return DesignStatus::Feasible;
    case SolveStatus::Infeasible: return DesignStatus::Infeasible;
    default: return DesignStatus::SolverFailure;
  }
}

}  // namespace

void DesignConfig::validate() const {
  if (!(total_power > 0.0)) throw ContractViolation("design config: total power must be positive");
  if (!(noise_power > 0.0)) throw ContractViolation("design config: noise power must be positive");
  if (gamma.empty()) throw ContractViolation("design config: no SINR threshold");
  for (double g : gamma)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw ContractViolation("design config: SINR thresholds must be finite and nonnegative");
}

RVector DesignConfig::thresholds(int users) const {
  if (gamma.size() == 1) return RVector::Constant(users, gamma[0]);
  if (static_cast<int>(gamma.size()) != users)
    throw ContractViolation("design config: threshold count does not match users");
  return Eigen::Map<const RVector>(gamma.data(), users);
}

namespace {
// Weight of the ZF fairness tie-break, per unit of total power. Large enough to lift the
// choice above solver tolerance, small enough to leave the loss unchanged to ~1e-6.
constexpr double kZfFairnessWeight = 1e-4;

// Thresholds handed to the solver carry a small margin so that interior-point residuals
// (amplified by ||h||^2 / s2 when mapped back to SINR) do not land below the target.
RVector solver_thresholds(const DesignConfig& cfg, int users) {
  RVector g = cfg.thresholds(users);
  for (Eigen::Index k = 0; k < g.size(); ++k)
    if (g[k] > 0.0) g[k] = g[k] * (1.0 + 1e-5) + 1e-6;
  return g;
}
}  // namespace

const char* to_string(DesignStatus s) {
  switch (s) {
    case DesignStatus::Feasible: return "feasible";
    case DesignStatus::Infeasible: return "infeasible";
    case DesignStatus::SolverFailure: return "solver_failure";
  }
  return "unknown";
}

RadarOnlyResult radar_only(const RadarObjective& obj, const DesignConfig& cfg,
                           const SolverConfig& scfg) {
  cfg.validate();
  const int M = obj.M, m2 = M * M;
  ConicProblem p(m2 + 1);
  set_objective(p, obj);
  RMatrix map = RMatrix::Zero(m2, p.n);
  map.leftCols(m2).setIdentity();
  p.psd.push_back({M, map, RVector::Zero(m2)});
  add_power_equalities(p, M, cfg.total_power, 0);

  RadarOnlyResult out;
  out.solver = solve(p, scfg);
  out.R = smat(out.solver.z.head(m2), M);
  out.alpha = out.solver.z[m2];
  out.loss = eval_loss(obj, out.R, out.alpha);
  return out;
}

RadarOnlyResult radar_only(const ArrayGeometry& geom, const BeamSpec& spec,
                           const DesignConfig& cfg, const SolverConfig& scfg) {
  return radar_only(build_radar_loss(geom, spec), cfg, scfg);
}

SdrRelaxed sdr_solve(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                     const SolverConfig& scfg) {
  cfg.validate();
  check_channel(obj, H);
  const int M = obj.M, m2 = M * M, K = static_cast<int>(H.rows());
  const RVector gamma = solver_thresholds(cfg, K);
  // Variables: the radar part R_r = R - sum_k R_k, then R_1..R_K, then alpha. Every
  // covariance is then a cone constraint on its own variables.
  ConicProblem p((K + 1) * m2 + 1);
  set_objective(p, obj, K + 1);
  for (int k = 0; k <= K; ++k) {
    RMatrix map = RMatrix::Zero(m2, p.n);
    map.block(0, k * m2, m2, m2).setIdentity();
    p.psd.push_back({M, map, RVector::Zero(m2)});
  }
  add_power_equalities(p, M, cfg.total_power, 0, K + 1);

  // (1 + 1/G) h^H R_k h >= h^H R h + s2, scaled by G/(1+G) and 1/||h||^2:
  //   -h^H R_k h + t h^H R h <= -t s2,  t = G/(1+G)
  std::vector<int> rows;
  for (int k = 0; k < K; ++k)
    if (gamma[k] > 0.0) rows.push_back(k);
  p.G = RMatrix::Zero(static_cast<Eigen::Index>(rows.size()), p.n);
  p.h = RVector::Zero(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int k = rows[r];
    CVector hk = H.row(k).adjoint();
    const double nh = hk.squaredNorm();
    const double t = gamma[k] / (1.0 + gamma[k]);
    RVector g = linear_functional(hk * hk.adjoint()) / nh;
    for (int b = 0; b <= K; ++b) p.G.row(r).segment(b * m2, m2) = t * g.transpose();
    p.G.row(r).segment((k + 1) * m2, m2) -= g.transpose();
    p.h[r] = -t * cfg.noise_power / nh;
  }

  SdrRelaxed out;
  out.solver = solve(p, scfg);
  const RVector& z = out.solver.z;
  out.R = smat(z.head(m2), M);
  for (int k = 0; k < K; ++k) {
    out.Rk.push_back(smat(z.segment((k + 1) * m2, m2), M));
    out.R += out.Rk.back();
  }
  out.alpha = z[p.n - 1];
  out.loss = out.solver.objective;
  return out;
}

CVector rank_one_extract(const CMatrix& Rk, const CVector& h, double eps) {
  if (Rk.rows() != h.size() || Rk.cols() != h.size())
    throw ContractViolation("rank-one extraction: shape mismatch");
  if (eps < 0.0) eps = 1e-12 * Rk.norm() * h.squaredNorm();
  CVector Rh = Rk * h;
  double den = h.dot(Rh).real();
  if (!(den > eps)) throw DegenerateExtraction("rank-one extraction: user receives no power");
  return Rh / std::sqrt(den);
}

CMatrix radar_precoder_completion(const CMatrix& R, const std::vector<CVector>& w) {
  require_hermitian(R, "radar completion");
  CMatrix D = R;
  for (const CVector& v : w) D -= v * v.adjoint();
  D = (D + D.adjoint()) * 0.5;
  RVector evR = hermitian_eigenvalues(R);
  const double top = std::max(evR.maxCoeff(), 0.0);
  if (hermitian_eigenvalues(D)[0] < -1e-6 * top)
    throw TightnessViolation("radar completion: residual covariance is not PSD");
  // clip relative to lambda_max(R) so that a zero residual stays exactly zero
  Eigen::SelfAdjointEigenSolver<CMatrix> es(D);
  RVector ev = es.eigenvalues();
  RVector root(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    root[i] = ev[i] > 1e-9 * top ? std::sqrt(ev[i]) : 0.0;
  return lower_triangular_from_factor(es.eigenvectors() * root.asDiagonal());
}

DesignOutcome sdr_beamform(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                           const SolverConfig& scfg) {
  SdrRelaxed rel = sdr_solve(obj, cfg, H, scfg);
  DesignOutcome out;
  out.solver = rel.solver;
  out.status = status_from(rel.solver.status);
  out.relaxed_loss = rel.loss;
  if (out.status != DesignStatus::Feasible) return out;

  const int K = static_cast<int>(H.rows()), M = obj.M;
  std::vector<CVector> w;
  for (int k = 0; k < K; ++k) {
    CVector hk = H.row(k).adjoint();
    CMatrix Rk = project_psd(rel.Rk[k]);
    try {
      w.push_back(rank_one_extract(Rk, hk));
    } catch (const DegenerateExtraction&) {
      if (!cfg.allow_degenerate_users) throw;
      w.push_back(CVector::Zero(M));
      out.note += "user " + std::to_string(k) + " degenerate; ";
    }
  }
  out.R = (rel.R + rel.R.adjoint()) * 0.5;
  out.W.comm.resize(M, K);
  for (int k = 0; k < K; ++k) out.W.comm.col(k) = w[k];
  out.W.radar = radar_precoder_completion(out.R, w);
  out.alpha = rel.alpha;
  out.loss = eval_loss(obj, out.W.covariance(), out.alpha);
  out.sinr = sinr_closed_form(H, out.W, cfg.noise_power);
  return out;
}

ZfRelaxed zf_solve(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                   const SolverConfig& scfg) {
  cfg.validate();
  check_channel(obj, H);
  const int M = obj.M, m2 = M * M, K = static_cast<int>(H.rows());
  const RVector gamma = solver_thresholds(cfg, K);
  // Variables: svec R, then t <= min_k h_k^H R h_k, then alpha. The loss has a flat face
  // (many R give the same pattern), so -mu t picks the fairest design on it.
  ConicProblem p(m2 + 2);
  set_objective(p, obj);
  const double mu = kZfFairnessWeight * cfg.total_power;
  p.q[m2] = -mu;
  RMatrix map = RMatrix::Zero(m2, p.n);
  map.leftCols(m2).setIdentity();
  p.psd.push_back({M, map, RVector::Zero(m2)});

  // H R H^H diagonal: real and imaginary parts of h_i^H R h_j for i < j
  const int pairs = K * (K - 1) / 2;
  add_power_equalities(p, M, cfg.total_power, 2 * pairs);
  int r = M;
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) {
      CVector hi = H.row(i).adjoint(), hj = H.row(j).adjoint();
      CMatrix X = hi * hj.adjoint() / (hi.norm() * hj.norm());
      p.A.row(r++).head(m2) = linear_functional(X).transpose();
      p.A.row(r++).head(m2) = linear_functional(cdouble(0.0, 1.0) * X).transpose();
    }

  std::vector<int> rows;
  for (int k = 0; k < K; ++k)
    if (gamma[k] > 0.0) rows.push_back(k);
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  p.G = RMatrix::Zero(nr + K, p.n);
  p.h = RVector::Zero(nr + K);
  for (Eigen::Index i = 0; i < nr; ++i) {
    const int k = rows[i];
    CVector hk = H.row(k).adjoint();
    const double nh = hk.squaredNorm();
    p.G.row(i).head(m2) = -linear_functional(hk * hk.adjoint()).transpose() / nh;
    p.h[i] = -gamma[k] * cfg.noise_power / nh;
  }
  for (int k = 0; k < K; ++k) {
    CVector hk = H.row(k).adjoint();
    p.G.row(nr + k).head(m2) = -linear_functional(hk * hk.adjoint()).transpose();
    p.G(nr + k, m2) = 1.0;
  }

  ZfRelaxed out;
  out.solver = solve(p, scfg);
  out.R = smat(out.solver.z.head(m2), M);
  out.alpha = out.solver.z[m2 + 1];
  out.loss = out.solver.status == SolveStatus::Optimal ? eval_loss(obj, out.R, out.alpha)
                                                      : out.solver.objective;
  out.p = (H * out.R * H.adjoint()).diagonal().real();
  return out;
}

CMatrix zf_construct_precoder(const CMatrix& R, const CMatrix& F, const CMatrix& H,
                              double gram_tol) {
  const Eigen::Index M = R.rows(), K = H.rows();
  if (R.cols() != M || H.cols() != M || F.rows() != K || F.cols() != K + M)
    throw ContractViolation("zf construction: shape mismatch");
  require_hermitian(R, "zf construction");
  CMatrix FF = F * F.adjoint();
  CMatrix gram = H * R * H.adjoint();
  if ((gram - FF).norm() > gram_tol * std::max(FF.norm(), 1e-300))
    throw PreconditionViolation("zf construction: H R H^H does not match F F^H");

  RowQR qf = row_qr(F);
  RVector dl = qf.L.diagonal().real();
  if (!(dl.minCoeff() > 1e-12 * std::max(dl.maxCoeff(), 1e-300)))
    throw DegenerateUser("zf construction: target matrix is rank deficient");

  CMatrix Lr = semidefinite_cholesky(R);
  RowQR qh = row_qr(H * Lr);
  // W = L_r Q_h^H [Q_f]_{1:M}
  return Lr * qh.Q.adjoint() * qf.Q.topRows(M);
}

DesignOutcome zf_beamform(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                          const SolverConfig& scfg) {
  // If the unconstrained optimum already meets every threshold it is optimal here too; this
  // keeps the design fixed on the whole plateau Gamma <= Gamma_II.
  const RVector g = cfg.thresholds(static_cast<int>(H.rows()));
  DesignConfig c0 = cfg;
  c0.gamma = {0.0};
  ZfRelaxed rel = zf_solve(obj, c0, H, scfg);
  const bool slack = rel.solver.status == SolveStatus::Optimal &&
                     (rel.p.array() / cfg.noise_power >= g.array()).all();
  if (!slack && g.maxCoeff() > 0.0) rel = zf_solve(obj, cfg, H, scfg);
  DesignOutcome out;
  out.solver = rel.solver;
  out.status = status_from(rel.solver.status);
  out.relaxed_loss = rel.loss;
  if (out.status != DesignStatus::Feasible) return out;

  const Eigen::Index K = H.rows(), M = obj.M;
  out.R = (rel.R + rel.R.adjoint()) * 0.5;
  CMatrix F = CMatrix::Zero(K, K + M);
  for (Eigen::Index k = 0; k < K; ++k) F(k, k) = std::sqrt(std::max(rel.p[k], 0.0));
  // the solver only makes H R H^H diagonal to its own tolerance
  CMatrix W = zf_construct_precoder(out.R, F, H, 1e-6);
  out.W = Precoder::from_stacked(W, static_cast<int>(K));
  out.alpha = rel.alpha;
  out.loss = eval_loss(obj, out.W.covariance(), out.alpha);
  out.sinr = sinr_closed_form(H, out.W, cfg.noise_power);
  return out;
}

double gamma_II(const RadarObjective& obj, const DesignConfig& cfg, const CMatrix& H,
                const SolverConfig& scfg) {
  DesignConfig c0 = cfg;
  c0.gamma = {0.0};
  ZfRelaxed rel = zf_solve(obj, c0, H, scfg);
  if (rel.solver.status != SolveStatus::Optimal)
    throw std::runtime_error(std::string("gamma_II: unconstrained ZF problem not solved (") +
                             to_string(rel.solver.status) + ")");
  return rel.p.minCoeff() / cfg.noise_power;
}

DesignOutcome sdr_beamform(const ArrayGeometry& geom, const BeamSpec& spec,
                           const DesignConfig& cfg, const CMatrix& H, const SolverConfig& scfg) {
  return sdr_beamform(build_radar_loss(geom, spec), cfg, H, scfg);
}

DesignOutcome zf_beamform(const ArrayGeometry& geom, const BeamSpec& spec,
                          const DesignConfig& cfg, const CMatrix& H, const SolverConfig& scfg) {
  return zf_beamform(build_radar_loss(geom, spec), cfg, H, scfg);
}

double gamma_II(const ArrayGeometry& geom, const BeamSpec& spec, const DesignConfig& cfg,
                const CMatrix& H, const SolverConfig& scfg) {
  return gamma_II(build_radar_loss(geom, spec), cfg, H, scfg);
}

}  // namespace dfrc
