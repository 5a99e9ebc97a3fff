// dfrc: design | sweep | simulate front end.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dfrc/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string method;
  std::vector<int> users;
  std::vector<double> gamma_db;
  int trials = 0;
  int first_trial = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string output;
  bool no_timing = false;
  int block_length = 0;
  int blocks = 0;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("-m,--method", o.method, "radar_only | sdr | zf | both");
  cmd->add_option("-K,--users", o.users, "number(s) of users");
  cmd->add_option("-g,--gamma-db", o.gamma_db, "SINR threshold(s) in dB");
  cmd->add_option("-t,--trials", o.trials, "Monte Carlo trials per cell");
  cmd->add_option("--first-trial", o.first_trial, "index of the first trial");
  cmd->add_option("-s,--seed", o.seed, "master seed");
  cmd->add_option("-j,--threads", o.threads, "worker threads (default: DFRC_THREADS or 1)");
  cmd->add_option("-o,--output", o.output, "output directory");
  cmd->add_flag("--no-timing", o.no_timing, "write wall_ms = 0 (byte-identical outputs)");
}

dfrc::ExperimentConfig resolve(const CLI::App* cmd, const Overrides& o) {
  dfrc::ExperimentConfig cfg = o.config.empty() ? dfrc::ExperimentConfig{} : dfrc::load_config(o.config);
  if (cmd->count("--method")) cfg.method = o.method;
  if (cmd->count("--users")) cfg.users = o.users;
  if (cmd->count("--gamma-db")) cfg.gamma_db = o.gamma_db;
  if (cmd->count("--trials")) cfg.trials = o.trials;
  if (cmd->count("--first-trial")) cfg.first_trial = o.first_trial;
  if (cmd->count("--seed")) cfg.seed = o.seed;
  if (cmd->count("--threads")) cfg.threads = o.threads;
  if (cmd->count("--output")) cfg.output_dir = o.output;
  if (o.no_timing) cfg.timing = false;
  if (cmd->get_option_no_throw("--block-length") && cmd->count("--block-length"))
    cfg.block_length = o.block_length;
  if (cmd->get_option_no_throw("--blocks") && cmd->count("--blocks")) cfg.blocks = o.blocks;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DFRC joint transmit beamforming: designs, sweeps and waveform checks"};
  app.require_subcommand(1);

  Overrides od, os, ov;
  std::string precoder, channel;
  CLI::App* design = app.add_subcommand("design", "solve one (K, Gamma) instance");
  add_common(design, od);
  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over K, Gamma and trials");
  add_common(sweep, os);
  CLI::App* sim = app.add_subcommand("simulate", "waveform-level checks of a stored precoder");
  add_common(sim, ov);
  sim->add_option("-p,--precoder", precoder, "precoder matrix file (M x (K+M))")->required();
  sim->add_option("--channel", channel, "channel matrix file (K x M)");
  sim->add_option("-N,--block-length", ov.block_length, "samples per block");
  sim->add_option("-b,--blocks", ov.blocks, "blocks / noise draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dfrc::kExitConfig;
  }

  try {
    if (*design) return dfrc::cmd_design(resolve(design, od));
    if (*sweep) return dfrc::cmd_sweep(resolve(sweep, os));
    if (*sim) return dfrc::cmd_simulate(resolve(sim, ov), precoder, channel);
  } catch (const dfrc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return dfrc::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dfrc::kExitSolverFailure;
  }
  return dfrc::kExitConfig;
}
