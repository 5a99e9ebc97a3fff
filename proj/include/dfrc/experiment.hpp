#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfrc/array.hpp"
#include "dfrc/design.hpp"
#include "dfrc/simulate.hpp"

namespace dfrc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { kExitOk = 0, kExitInfeasible = 2, kExitSolverFailure = 3, kExitConfig = 4 };

// JSON keys (all optional):
//   array:  {elements, spacing}
//   beam:   {targets_deg, width_deg, grid: {lo, hi, res}, cross_weight}
//   design: {total_power, noise_power, gamma_db: [..], users: [..]}
//   method, trials, first_trial, seed, threads, timing
//   simulate: {block_length, blocks, radar_noise, capon_bin, profile_deg, max_delay,
//              targets: [{delay, angle_deg, amplitude: [re, im]}]}
//   output_dir
struct ExperimentConfig {
  ArrayGeometry array;
  std::vector<double> targets_deg{-40.0, 0.0, 40.0};
  double beam_width_deg = 10.0;
  double grid_lo = -90.0, grid_hi = 90.0, grid_res = 0.1;
  double cross_weight = 1.0;

  double total_power = 1.0;
  double noise_power = 0.01;
  std::vector<double> gamma_db{12.0};
  std::vector<int> users{2};

  std::string method = "both";  // radar_only | sdr | zf | both
  int trials = 50;
  int first_trial = 0;  // trials run first_trial .. first_trial + trials - 1
  std::uint64_t seed = 1;
  int threads = 0;     // 0: DFRC_THREADS, else 1
  bool timing = true;  // false writes wall_ms = 0 so outputs are byte-identical

  int block_length = 1024;
  int blocks = 20;
  double radar_noise = 1.0;
  int capon_bin = 20;
  double profile_deg = 0.0;
  int max_delay = 64;
  std::vector<RadarTarget> radar_targets = five_target_layout();

  std::string output_dir = ".";

  // Throws ConfigError.
  void validate() const;
  BeamSpec beam_spec() const;
  DesignConfig design_config(double gamma_db) const;
  // Methods a sweep runs, in output order.
  std::vector<std::string> methods() const;
  int thread_count() const;
};

// Unknown keys and wrong types are ConfigErrors.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

// Per-(K, trial) stream; every Gamma and method of a trial sees the same channel.
std::uint64_t trial_seed(std::uint64_t master, int users, int trial);
Channel trial_channel(const ExperimentConfig& cfg, int users, int trial);

struct SweepRow {
  std::string method;
  int users = 0;
  double gamma_db = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string status;  // feasible | infeasible | solver_failure
  double loss = 0.0;
  double mse = 0.0;
  double fairness_db = 0.0;
  double sumrate = 0.0;
  double inr_db = 0.0;
  double wall_ms = 0.0;
  // max over users of (inter-user + radar interference) / signal; not written to CSV
  double leakage = 0.0;
};

struct SweepCell {
  std::string method;
  int users = 0;
  double gamma_db = 0.0;
  int trials = 0;
  int feasible = 0;
  double feasible_fraction = 0.0;
  double mean_loss = 0.0;  // means over this method's feasible trials
  double mean_mse = 0.0;
  double se_mse = 0.0;
  double mean_fairness_db = 0.0;
  double mean_sumrate = 0.0;
  // over trials feasible for every method in the sweep
  int joint = 0;
  double mean_mse_joint = 0.0;
};

// Rows sorted by (method order, K, Gamma, trial). Solver failures become rows.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);
std::vector<SweepCell> summarize(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& r);
std::string summary_csv_header();
std::string summary_csv_row(const SweepCell& c);

// Subcommands. Each writes into cfg.output_dir and returns an ExitCode.
int cmd_design(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
// channel_path may be empty: the trial-0 channel for K = cols - M is drawn from the seed.
int cmd_simulate(const ExperimentConfig& cfg, const std::string& precoder_path,
                 const std::string& channel_path);

struct VerifyRow {
  std::string check;
  int user = -1;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SimulationResult {
  std::vector<VerifyRow> verify;
  std::vector<double> spectrum_grid;
  std::vector<double> spectrum;  // Capon at cfg.capon_bin, first radar draw
  std::vector<double> profile;   // range profile at cfg.profile_deg, first radar draw
  int range_hits = 0;            // draws whose range peaks match the target delays
  int capon_hits = 0;            // draws whose Capon peaks match the bin's angles
  int radar_draws = 0;
};

SimulationResult run_simulation(const ExperimentConfig& cfg, const Precoder& W, const CMatrix& H);

std::string verify_csv_header();
std::string verify_csv_row(const VerifyRow& r);

}  // namespace dfrc
