#pragma once

#include <string>
#include <vector>

#include "dfrc/array.hpp"
#include "dfrc/conic.hpp"

namespace dfrc {

// gamma_k = |[H W_c]_kk|^2 / (sum_{i!=k} |[H W_c]_ki|^2 + sum_i |[H W_r]_ki|^2 + noise)
RVector sinr_closed_form(const CMatrix& H, const Precoder& W, double noise);

// Per-user split of received power: [signal, inter-user interference, radar interference].
struct UserPower {
  double signal = 0.0;
  double multiuser = 0.0;
  double radar = 0.0;
};
std::vector<UserPower> received_powers(const CMatrix& H, const Precoder& W);

double sum_rate(const RVector& gamma);
double fairness(const RVector& gamma);

// (1/L) sum_l (P(theta_l; R0) - P(theta_l; R))^2
double beampattern_mse(const ArrayGeometry& geom, const CMatrix& R, const CMatrix& R0,
                       const std::vector<double>& grid_deg);
double beampattern_mse(const std::vector<double>& pattern, const std::vector<double>& pattern0);

// sum_i |[H W_r]_ki|^2 / noise
double radar_inr(const CMatrix& H, const CMatrix& Wr, double noise, int k);

// Nearest-neighbour matching of estimates to truths with an angular gate. Returns
// false (missed detection) if any truth has no estimate inside the gate or two truths
// claim the same estimate.
bool match_angles(const std::vector<double>& estimates, const std::vector<double>& truths,
                  double gate_deg, std::vector<double>& matched);

struct RmseSummary {
  double rmse = 0.0;
  int used_trials = 0;
  int missed_detections = 0;
};
RmseSummary angle_rmse(const std::vector<std::vector<double>>& estimates_per_trial,
                       const std::vector<double>& truths, double gate_deg = 5.0);

struct FeasibilitySummary {
  int trials = 0;
  int optimal = 0;
  int infeasible = 0;
  int failures = 0;  // max iterations / numerical failure / unbounded
  double fraction = 0.0;
};
FeasibilitySummary feasibility_probability(const std::vector<SolveStatus>& statuses);

struct TrialReport {
  std::string status;
  double loss = 0.0;
  double alpha = 0.0;
  RVector gamma;
  double fairness = 0.0;
  double sum_rate = 0.0;
  double mse = 0.0;
  RVector inr;
  double wall_ms = 0.0;
};

// Fills fairness/sum rate/INR from the precoder.
TrialReport make_report(const std::string& status, const CMatrix& H, const Precoder& W,
                        double noise, double loss, double alpha, double mse);

// One CSV row per report; inr_db is the worst (largest) per-user INR, gamma_db lists
// per-user SINRs separated by ";".
std::string report_csv_header();
std::string report_csv_row(const TrialReport& r);

}  // namespace dfrc
