#include "dfrc/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace dfrc {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double to_db(double x) {
  return x > 0.0 ? linear_to_db(x) : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<UserPower> received_powers(const CMatrix& H, const Precoder& W) {
  if (H.cols() != W.comm.rows() || H.rows() != W.comm.cols() || W.radar.rows() != H.cols())
    throw ContractViolation("sinr: channel and precoder shapes do not conform");
  CMatrix Fc = H * W.comm;
  CMatrix Fr = H * W.radar;
  std::vector<UserPower> out(H.rows());
  for (Eigen::Index k = 0; k < H.rows(); ++k) {
    out[k].signal = std::norm(Fc(k, k));
    out[k].multiuser = Fc.row(k).squaredNorm() - out[k].signal;
    out[k].radar = Fr.row(k).squaredNorm();
  }
  return out;
}

RVector sinr_closed_form(const CMatrix& H, const Precoder& W, double noise) {
  if (!(noise > 0.0)) throw ContractViolation("sinr: noise power must be positive");
  std::vector<UserPower> pw = received_powers(H, W);
  RVector g(H.rows());
  for (Eigen::Index k = 0; k < H.rows(); ++k)
    g[k] = pw[k].signal / (std::max(pw[k].multiuser, 0.0) + pw[k].radar + noise);
  return g;
}

double sum_rate(const RVector& gamma) {
  double c = 0.0;
  for (double g : gamma) c += std::log2(1.0 + g);
  return c;
}

double fairness(const RVector& gamma) {
  return gamma.size() ? gamma.minCoeff() : 0.0;
}

double beampattern_mse(const std::vector<double>& pattern, const std::vector<double>& pattern0) {
  if (pattern.size() != pattern0.size() || pattern.empty())
    throw ContractViolation("beampattern mse: pattern lengths differ");
  double acc = 0.0;
  for (std::size_t l = 0; l < pattern.size(); ++l) {
    double e = pattern0[l] - pattern[l];
    acc += e * e;
  }
  return acc / static_cast<double>(pattern.size());
}

double beampattern_mse(const ArrayGeometry& geom, const CMatrix& R, const CMatrix& R0,
                       const std::vector<double>& grid_deg) {
  return beampattern_mse(beam_pattern(geom, R, grid_deg), beam_pattern(geom, R0, grid_deg));
}

double radar_inr(const CMatrix& H, const CMatrix& Wr, double noise, int k) {
  if (k < 0 || k >= H.rows()) throw ContractViolation("radar inr: user index out of range");
  if (H.cols() != Wr.rows()) throw ContractViolation("radar inr: shapes do not conform");
  return (H.row(k) * Wr).squaredNorm() / noise;
}

bool match_angles(const std::vector<double>& estimates, const std::vector<double>& truths,
                  double gate_deg, std::vector<double>& matched) {
  matched.assign(truths.size(), 0.0);
  std::vector<int> owner(estimates.size(), -1);
  for (std::size_t p = 0; p < truths.size(); ++p) {
    int best = -1;
    double bd = gate_deg;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      double d = std::abs(estimates[i] - truths[p]);
      if (d <= bd) {
        bd = d;
        best = static_cast<int>(i);
      }
    }
    if (best < 0 || owner[best] >= 0) return false;
    owner[best] = static_cast<int>(p);
    matched[p] = estimates[best];
  }
  return true;
}

RmseSummary angle_rmse(const std::vector<std::vector<double>>& estimates_per_trial,
                       const std::vector<double>& truths, double gate_deg) {
  RmseSummary out;
  double acc = 0.0;
  std::vector<double> m;
  for (const auto& est : estimates_per_trial) {
    if (!match_angles(est, truths, gate_deg, m)) {
      ++out.missed_detections;
      continue;
    }
    for (std::size_t p = 0; p < truths.size(); ++p) acc += (m[p] - truths[p]) * (m[p] - truths[p]);
    ++out.used_trials;
  }
  if (out.used_trials > 0 && !truths.empty())
    out.rmse = std::sqrt(acc / (static_cast<double>(out.used_trials) * truths.size()));
  else
    out.rmse = std::numeric_limits<double>::quiet_NaN();
  return out;
}

FeasibilitySummary feasibility_probability(const std::vector<SolveStatus>& statuses) {
  if (statuses.empty()) throw ContractViolation("feasibility: no trials");
  FeasibilitySummary f;
  f.trials = static_cast<int>(statuses.size());
  for (SolveStatus s : statuses) {
    if (s == SolveStatus::Optimal) ++f.optimal;
    else if (s == SolveStatus::Infeasible) ++f.infeasible;
    else ++f.failures;
  }
  f.fraction = static_cast<double>(f.optimal) / f.trials;
  return f;
}

TrialReport make_report(const std::string& status, const CMatrix& H, const Precoder& W,
                        double noise, double loss, double alpha, double mse) {
  TrialReport r;
  r.status = status;
  r.loss = loss;
  r.alpha = alpha;
  r.mse = mse;
  r.gamma = sinr_closed_form(H, W, noise);
  r.fairness = fairness(r.gamma);
  r.sum_rate = sum_rate(r.gamma);
  r.inr.resize(H.rows());
  for (Eigen::Index k = 0; k < H.rows(); ++k) r.inr[k] = radar_inr(H, W.radar, noise, static_cast<int>(k));
  return r;
}

std::string report_csv_header() {
  return "status,loss,alpha,mse,fairness_db,sumrate,inr_db,wall_ms,gamma_db";
}

std::string report_csv_row(const TrialReport& r) {
  std::string s = r.status + "," + fmt(r.loss) + "," + fmt(r.alpha) + "," + fmt(r.mse) + "," +
                  fmt(to_db(r.fairness)) + "," + fmt(r.sum_rate) + "," +
                  fmt(r.inr.size() ? to_db(r.inr.maxCoeff()) : std::numeric_limits<double>::quiet_NaN()) +
                  "," + fmt(r.wall_ms) + ",";
  for (Eigen::Index k = 0; k < r.gamma.size(); ++k) s += (k ? ";" : "") + fmt(to_db(r.gamma[k]));
  return s;
}

}  // namespace dfrc
