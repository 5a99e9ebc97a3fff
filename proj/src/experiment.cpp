#include "dfrc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "dfrc/hermitian.hpp"
#include "dfrc/matrix_io.hpp"
#include "dfrc/metrics.hpp"

namespace dfrc {

namespace {

using nlohmann::json;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

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

void check_keys(const json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(std::string(where) + ": unknown key \"" + it.key() + "\"");
  }
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

std::string status_name(DesignStatus s) {
  switch (s) {
    case DesignStatus::Feasible: return "feasible";
    case DesignStatus::Infeasible: return "infeasible";
    case DesignStatus::SolverFailure: return "solver_failure";
  }
  return "solver_failure";
}

std::filesystem::path out_path(const ExperimentConfig& cfg, const char* name) {
  return std::filesystem::path(cfg.output_dir) / name;
}

void ensure_output_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir);
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return f;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Runs f(i) for i in [0, n) on `threads` workers.
template <class F>
void parallel_for(int n, int threads, F&& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// Radar-only precoder: W_c empty, W_r a square-root factor of R0.
Precoder radar_only_precoder(const CMatrix& R0) {
  Precoder W;
  W.comm = CMatrix::Zero(R0.rows(), 0);
  W.radar = semidefinite_cholesky(R0);
  return W;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    array.validate();
    beam_spec().validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!(total_power > 0.0)) throw ConfigError("design.total_power must be positive");
  if (!(noise_power > 0.0)) throw ConfigError("design.noise_power must be positive");
  if (gamma_db.empty()) throw ConfigError("design.gamma_db must not be empty");
  for (double g : gamma_db)
    if (!std::isfinite(g)) throw ConfigError("design.gamma_db entries must be finite");
  if (users.empty()) throw ConfigError("design.users must not be empty");
  for (int k : users)
    if (k < 1 || k >= array.num_elements)
      throw ConfigError("design.users: need 1 <= K < M (got K=" + std::to_string(k) +
                        ", M=" + std::to_string(array.num_elements) + ")");
  if (method != "radar_only" && method != "sdr" && method != "zf" && method != "both")
    throw ConfigError("method must be radar_only, sdr, zf or both");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (first_trial < 0) throw ConfigError("first_trial must be non-negative");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (block_length < 1) throw ConfigError("simulate.block_length must be positive");
  if (blocks < 1) throw ConfigError("simulate.blocks must be positive");
  if (!(radar_noise > 0.0)) throw ConfigError("simulate.radar_noise must be positive");
  if (max_delay < 1) throw ConfigError("simulate.max_delay must be positive");
  if (capon_bin < 0 || capon_bin >= max_delay)
    throw ConfigError("simulate.capon_bin must lie in [0, max_delay)");
  if (std::abs(profile_deg) > 90.0) throw ConfigError("simulate.profile_deg out of range");
  for (const auto& t : radar_targets) {
    if (t.delay < 0 || t.delay >= block_length)
      throw ConfigError("simulate.targets: delay must lie in [0, block_length)");
    if (std::abs(t.angle_deg) > 90.0) throw ConfigError("simulate.targets: angle out of range");
  }
}

BeamSpec ExperimentConfig::beam_spec() const {
  BeamSpec s;
  s.target_directions_deg = targets_deg;
  s.beam_width_deg = beam_width_deg;
  s.cross_weight = cross_weight;
  if (grid_res > 0.0 && grid_hi >= grid_lo) s.grid_deg = angle_grid(grid_lo, grid_hi, grid_res);
  return s;
}

DesignConfig ExperimentConfig::design_config(double gdb) const {
  DesignConfig d;
  d.total_power = total_power;
  d.noise_power = noise_power;
  d.gamma = {db_to_linear(gdb)};
  return d;
}

std::vector<std::string> ExperimentConfig::methods() const {
  if (method == "both") return {"sdr", "zf"};
  return {method};
}

int ExperimentConfig::thread_count() const {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("DFRC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  check_keys(j, "config",
             {"array", "beam", "design", "method", "trials", "first_trial", "seed", "threads", "timing",
              "simulate", "output_dir"});
  if (j.contains("array")) {
    const json& a = j["array"];
    check_keys(a, "array", {"elements", "spacing"});
    get(a, "elements", c.array.num_elements);
    get(a, "spacing", c.array.element_spacing);
  }
  if (j.contains("beam")) {
    const json& b = j["beam"];
    check_keys(b, "beam", {"targets_deg", "width_deg", "grid", "cross_weight"});
    get(b, "targets_deg", c.targets_deg);
    get(b, "width_deg", c.beam_width_deg);
    get(b, "cross_weight", c.cross_weight);
    if (b.contains("grid")) {
      const json& g = b["grid"];
      check_keys(g, "beam.grid", {"lo", "hi", "res"});
      get(g, "lo", c.grid_lo);
      get(g, "hi", c.grid_hi);
      get(g, "res", c.grid_res);
    }
  }
  if (j.contains("design")) {
    const json& d = j["design"];
    check_keys(d, "design", {"total_power", "noise_power", "gamma_db", "users"});
    get(d, "total_power", c.total_power);
    get(d, "noise_power", c.noise_power);
    get(d, "gamma_db", c.gamma_db);
    get(d, "users", c.users);
  }
  get(j, "method", c.method);
  get(j, "trials", c.trials);
  get(j, "first_trial", c.first_trial);
  get(j, "seed", c.seed);
  get(j, "threads", c.threads);
  get(j, "timing", c.timing);
  get(j, "output_dir", c.output_dir);
  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    check_keys(s, "simulate",
               {"block_length", "blocks", "radar_noise", "capon_bin", "profile_deg", "max_delay",
                "targets"});
    get(s, "block_length", c.block_length);
    get(s, "blocks", c.blocks);
    get(s, "radar_noise", c.radar_noise);
    get(s, "capon_bin", c.capon_bin);
    get(s, "profile_deg", c.profile_deg);
    get(s, "max_delay", c.max_delay);
    if (s.contains("targets")) {
      if (!s["targets"].is_array()) throw ConfigError("simulate.targets must be a list");
      c.radar_targets.clear();
      for (const json& t : s["targets"]) {
        check_keys(t, "simulate.targets[]", {"delay", "angle_deg", "amplitude"});
        RadarTarget rt;
        get(t, "delay", rt.delay);
        get(t, "angle_deg", rt.angle_deg);
        if (t.contains("amplitude")) {
          std::vector<double> amp;
          get(t, "amplitude", amp);
          if (amp.size() != 2) throw ConfigError("target amplitude must be [re, im]");
          rt.amplitude = {amp[0], amp[1]};
        }
        c.radar_targets.push_back(rt);
      }
    }
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json targets = json::array();
  for (const auto& t : c.radar_targets)
    targets.push_back({{"delay", t.delay},
                       {"angle_deg", t.angle_deg},
                       {"amplitude", {t.amplitude.real(), t.amplitude.imag()}}});
  return {{"array", {{"elements", c.array.num_elements}, {"spacing", c.array.element_spacing}}},
          {"beam",
           {{"targets_deg", c.targets_deg},
            {"width_deg", c.beam_width_deg},
            {"grid", {{"lo", c.grid_lo}, {"hi", c.grid_hi}, {"res", c.grid_res}}},
            {"cross_weight", c.cross_weight}}},
          {"design",
           {{"total_power", c.total_power},
            {"noise_power", c.noise_power},
            {"gamma_db", c.gamma_db},
            {"users", c.users}}},
          {"method", c.method},
          {"trials", c.trials},
          {"first_trial", c.first_trial},
          {"seed", c.seed},
          {"threads", c.threads},
          {"timing", c.timing},
          {"simulate",
           {{"block_length", c.block_length},
            {"blocks", c.blocks},
            {"radar_noise", c.radar_noise},
            {"capon_bin", c.capon_bin},
            {"profile_deg", c.profile_deg},
            {"max_delay", c.max_delay},
            {"targets", targets}}},
          {"output_dir", c.output_dir}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::uint64_t trial_seed(std::uint64_t master, int users, int trial) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ splitmix64(static_cast<std::uint64_t>(users)));
  return splitmix64(s ^ splitmix64(static_cast<std::uint64_t>(trial) + 0x1000));
}

Channel trial_channel(const ExperimentConfig& cfg, int users, int trial) {
  Rng rng(trial_seed(cfg.seed, users, trial));
  return rayleigh_channel(users, cfg.array.num_elements, rng);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const RadarObjective obj = build_radar_loss(cfg.array, cfg.beam_spec());
  const RadarOnlyResult r0 = radar_only(obj, cfg.design_config(0.0));
  if (r0.solver.status != SolveStatus::Optimal)
    throw std::runtime_error("radar-only reference problem not solved");
  const std::vector<double> grid = cfg.beam_spec().grid_deg;
  const std::vector<double> pattern0 = beam_pattern(cfg.array, r0.R, grid);
  const std::vector<std::string> methods = cfg.methods();

  const int nk = static_cast<int>(cfg.users.size());
  const int ng = static_cast<int>(cfg.gamma_db.size());
  const int nm = static_cast<int>(methods.size());
  const int T = cfg.trials;
  // index: ((m * nk + ki) * ng + gi) * T + t
  std::vector<SweepRow> rows(static_cast<std::size_t>(nm) * nk * ng * T);

  parallel_for(nk * T, cfg.thread_count(), [&](int task) {
    const int ki = task / T, t = cfg.first_trial + task % T;
    const int K = cfg.users[ki];
    const CMatrix H = trial_channel(cfg, K, t).H;
    for (int gi = 0; gi < ng; ++gi) {
      const DesignConfig dc = cfg.design_config(cfg.gamma_db[gi]);
      for (int m = 0; m < nm; ++m) {
        SweepRow& row = rows[((static_cast<std::size_t>(m) * nk + ki) * ng + gi) * T + task % T];
        row.method = methods[m];
        row.users = K;
        row.gamma_db = cfg.gamma_db[gi];
        row.trial = t;
        row.seed = trial_seed(cfg.seed, K, t);
        row.loss = row.mse = row.fairness_db = row.sumrate = row.inr_db = kNaN;
        const auto t0 = std::chrono::steady_clock::now();
        Precoder W;
        try {
          if (methods[m] == "radar_only") {
            W = radar_only_precoder(r0.R);
            row.status = "feasible";
            row.loss = r0.loss;
          } else {
            const DesignOutcome o =
                methods[m] == "sdr" ? sdr_beamform(obj, dc, H) : zf_beamform(obj, dc, H);
            row.status = status_name(o.status);
            if (o.status == DesignStatus::Feasible) {
              W = o.W;
              row.loss = o.loss;
            }
          }
        } catch (const std::exception&) {
          row.status = "solver_failure";
        }
        row.wall_ms = cfg.timing ? elapsed_ms(t0) : 0.0;
        if (row.status != "feasible") continue;
        const CMatrix R = W.covariance();
        row.mse = beampattern_mse(beam_pattern(cfg.array, R, grid), pattern0);
        if (W.users() > 0) {
          const TrialReport rep = make_report(row.status, H, W, dc.noise_power, row.loss, 0.0, row.mse);
          row.fairness_db = to_db(rep.fairness);
          row.sumrate = rep.sum_rate;
          row.inr_db = to_db(rep.inr.maxCoeff());
          for (const UserPower& u : received_powers(H, W))
            row.leakage = std::max(row.leakage, (u.multiuser + u.radar) / u.signal);
        }
      }
    }
  });
  return rows;
}

std::vector<SweepCell> summarize(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  const std::vector<std::string> methods = cfg.methods();
  const int nk = static_cast<int>(cfg.users.size());
  const int ng = static_cast<int>(cfg.gamma_db.size());
  const int nm = static_cast<int>(methods.size());
  const int T = cfg.trials;
  if (rows.size() != static_cast<std::size_t>(nm) * nk * ng * T)
    throw ContractViolation("summarize: rows do not match the configuration");
  auto at = [&](int m, int ki, int gi, int t) -> const SweepRow& {
    return rows[((static_cast<std::size_t>(m) * nk + ki) * ng + gi) * T + t];
  };
  std::vector<SweepCell> out;
  for (int m = 0; m < nm; ++m)
    for (int ki = 0; ki < nk; ++ki)
      for (int gi = 0; gi < ng; ++gi) {
        SweepCell c;
        c.method = methods[m];
        c.users = cfg.users[ki];
        c.gamma_db = cfg.gamma_db[gi];
        c.trials = T;
        double sl = 0, sm = 0, sm2 = 0, sf = 0, sr = 0, sj = 0;
        for (int t = 0; t < T; ++t) {
          const SweepRow& r = at(m, ki, gi, t);
          bool joint = true;
          for (int m2 = 0; m2 < nm; ++m2) joint = joint && at(m2, ki, gi, t).status == "feasible";
          if (joint) {
            ++c.joint;
            sj += r.mse;
          }
          if (r.status != "feasible") continue;
          ++c.feasible;
          sl += r.loss;
          sm += r.mse;
          sm2 += r.mse * r.mse;
          sf += r.fairness_db;
          sr += r.sumrate;
        }
        c.feasible_fraction = static_cast<double>(c.feasible) / T;
        if (c.feasible > 0) {
          const double n = c.feasible;
          c.mean_loss = sl / n;
          c.mean_mse = sm / n;
          c.mean_fairness_db = sf / n;
          c.mean_sumrate = sr / n;
          c.se_mse = c.feasible > 1
                         ? std::sqrt(std::max(0.0, (sm2 - n * c.mean_mse * c.mean_mse) / (n - 1)) / n)
                         : 0.0;
        } else {
          c.mean_loss = c.mean_mse = c.se_mse = c.mean_fairness_db = c.mean_sumrate = kNaN;
        }
        c.mean_mse_joint = c.joint > 0 ? sj / c.joint : kNaN;
        out.push_back(c);
      }
  return out;
}

std::string sweep_csv_header() {
  return "method,K,gamma_db,trial,seed,status,loss,mse,fairness_db,sumrate,inr_db,wall_ms";
}

std::string sweep_csv_row(const SweepRow& r) {
  return r.method + "," + std::to_string(r.users) + "," + fmt(r.gamma_db) + "," +
         std::to_string(r.trial) + "," + std::to_string(r.seed) + "," + r.status + "," +
         fmt(r.loss) + "," + fmt(r.mse) + "," + fmt(r.fairness_db) + "," + fmt(r.sumrate) + "," +
         fmt(r.inr_db) + "," + fmt(r.wall_ms);
}

std::string summary_csv_header() {
  return "method,K,gamma_db,trials,feasible,feasible_fraction,mean_loss,mean_mse,se_mse,"
         "mean_fairness_db,mean_sumrate,joint_trials,mean_mse_joint";
}

std::string summary_csv_row(const SweepCell& c) {
  return c.method + "," + std::to_string(c.users) + "," + fmt(c.gamma_db) + "," +
         std::to_string(c.trials) + "," + std::to_string(c.feasible) + "," +
         fmt(c.feasible_fraction) + "," + fmt(c.mean_loss) + "," + fmt(c.mean_mse) + "," +
         fmt(c.se_mse) + "," + fmt(c.mean_fairness_db) + "," + fmt(c.mean_sumrate) + "," +
         std::to_string(c.joint) + "," + fmt(c.mean_mse_joint);
}

int cmd_design(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.users.size() != 1 || cfg.gamma_db.size() != 1)
    throw ConfigError("design needs a single K and a single gamma_db");
  if (cfg.method == "both") throw ConfigError("design needs method radar_only, sdr or zf");
  ensure_output_dir(cfg);

  const int K = cfg.users[0];
  const BeamSpec spec = cfg.beam_spec();
  const RadarObjective obj = build_radar_loss(cfg.array, spec);
  const DesignConfig dc = cfg.design_config(cfg.gamma_db[0]);
  const CMatrix H = trial_channel(cfg, K, 0).H;

  const auto t0 = std::chrono::steady_clock::now();
  const RadarOnlyResult r0 = radar_only(obj, dc);
  if (r0.solver.status != SolveStatus::Optimal) {
    std::ofstream rep = open_out(out_path(cfg, "report.csv"));
    rep << report_csv_header() << '\n' << "solver_failure,nan,nan,nan,nan,nan,nan,0,\n";
    return kExitSolverFailure;
  }

  DesignStatus status = DesignStatus::Feasible;
  Precoder W;
  double loss = r0.loss, alpha = r0.alpha;
  if (cfg.method == "radar_only") {
    W = radar_only_precoder(r0.R);
    W.comm = CMatrix::Zero(cfg.array.num_elements, K);
  } else {
    try {
      const DesignOutcome o = cfg.method == "sdr" ? sdr_beamform(obj, dc, H) : zf_beamform(obj, dc, H);
      status = o.status;
      W = o.W;
      loss = o.loss;
      alpha = o.alpha;
    } catch (const std::exception&) {
      status = DesignStatus::SolverFailure;
    }
  }
  const double wall = cfg.timing ? elapsed_ms(t0) : 0.0;

  write_matrix(out_path(cfg, "channel.txt").string(), H);
  std::ofstream rep = open_out(out_path(cfg, "report.csv"));
  rep << report_csv_header() << '\n';
  if (status != DesignStatus::Feasible) {
    TrialReport tr;
    tr.status = status_name(status);
    tr.loss = tr.alpha = tr.mse = tr.fairness = tr.sum_rate = kNaN;
    tr.wall_ms = wall;
    rep << report_csv_row(tr) << '\n';
    return status == DesignStatus::Infeasible ? kExitInfeasible : kExitSolverFailure;
  }

  const CMatrix R = W.covariance();
  const std::vector<double> p = beam_pattern(cfg.array, R, spec.grid_deg);
  const std::vector<double> p0 = beam_pattern(cfg.array, r0.R, spec.grid_deg);
  TrialReport tr = make_report("feasible", H, W, dc.noise_power, loss, alpha, beampattern_mse(p, p0));
  tr.wall_ms = wall;
  rep << report_csv_row(tr) << '\n';

  // a radar-only precoder is stored without communication columns
  write_matrix(out_path(cfg, "precoder.txt").string(),
               cfg.method == "radar_only" ? W.radar : W.stacked());
  write_matrix(out_path(cfg, "covariance.txt").string(), R);
  std::ofstream pat = open_out(out_path(cfg, "pattern.csv"));
  pat << "theta_deg,power,desired,radar_only_power\n";
  for (std::size_t l = 0; l < spec.grid_deg.size(); ++l)
    pat << fmt(spec.grid_deg[l]) << ',' << fmt(p[l]) << ',' << fmt(desired_pattern(spec, spec.grid_deg[l]))
        << ',' << fmt(p0[l]) << '\n';
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_output_dir(cfg);
  const std::vector<SweepRow> rows = run_sweep(cfg);
  std::ofstream f = open_out(out_path(cfg, "sweep.csv"));
  f << sweep_csv_header() << '\n';
  for (const auto& r : rows) f << sweep_csv_row(r) << '\n';
  std::ofstream s = open_out(out_path(cfg, "sweep_summary.csv"));
  s << summary_csv_header() << '\n';
  for (const auto& c : summarize(cfg, rows)) s << summary_csv_row(c) << '\n';
  return kExitOk;
}

SimulationResult run_simulation(const ExperimentConfig& cfg, const Precoder& W, const CMatrix& H) {
  cfg.validate();
  const int M = cfg.array.num_elements;
  const int K = W.users();
  if (W.antennas() != M || W.radar.rows() != M || W.radar.cols() != M)
    throw ConfigError("precoder does not match the array size");
  if (K > 0 && (H.rows() != K || H.cols() != M))
    throw ConfigError("channel does not match the precoder");

  SimulationResult res;
  const int N = cfg.block_length;
  const double sqn = std::sqrt(static_cast<double>(N));
  const CMatrix R = W.covariance();
  const double cov_bound = 5.0 * R.norm() / sqn;

  // communication side
  std::vector<double> cov_err;
  RVector sinr_acc = RVector::Zero(K), isr_acc = RVector::Zero(K);
  for (int b = 0; b < cfg.blocks; ++b) {
    Rng rng = Rng::stream(cfg.seed, {0xC0, static_cast<std::uint64_t>(b)});
    const WaveformBlock blk = make_block(W, N, rng);
    cov_err.push_back((sample_covariance(blk.X) - R).norm());
    if (K == 0) continue;
    sinr_acc += empirical_sinr(comm_receive(H, blk.X, cfg.noise_power, rng), blk.C);
    const CMatrix y = H * blk.X;  // noiseless: interference only
    for (int k = 0; k < K; ++k) {
      const cdouble g = blk.C.row(k).dot(y.row(k)) / blk.C.row(k).squaredNorm();
      isr_acc(k) += (y.row(k) - g * blk.C.row(k)).squaredNorm() / N / std::max(std::norm(g), 1e-300);
    }
  }
  if (K > 0) {
    const RVector closed = sinr_closed_form(H, W, cfg.noise_power);
    const std::vector<UserPower> pw = received_powers(H, W);
    for (int k = 0; k < K; ++k) {
      VerifyRow s{"sinr_db", k, to_db(sinr_acc(k) / cfg.blocks), to_db(closed(k)), 1.0, false};
      s.pass = std::abs(s.value - s.reference) <= s.tolerance;
      res.verify.push_back(s);
      const double isr = pw[k].signal > 0 ? (pw[k].multiuser + pw[k].radar) / pw[k].signal : kNaN;
      VerifyRow i{"interference", k, isr_acc(k) / cfg.blocks, isr, 5.0 * isr / sqn + 1e-9, false};
      i.pass = std::abs(i.value - i.reference) <= i.tolerance;
      res.verify.push_back(i);
    }
  }
  {
    const int within = static_cast<int>(
        std::count_if(cov_err.begin(), cov_err.end(), [&](double e) { return e <= cov_bound; }));
    std::vector<double> sorted = cov_err;
    std::sort(sorted.begin(), sorted.end());
    VerifyRow c{"covariance_error", -1, sorted[sorted.size() / 2], 0.0, cov_bound, false};
    c.pass = within >= 0.95 * cfg.blocks;
    res.verify.push_back(c);
  }

  // radar side
  std::set<int> delay_set;
  std::vector<double> bin_angles;
  for (const auto& t : cfg.radar_targets) {
    delay_set.insert(t.delay);
    if (t.delay == cfg.capon_bin) bin_angles.push_back(t.angle_deg);
  }
  std::sort(bin_angles.begin(), bin_angles.end());
  std::vector<double> delays(cfg.max_delay);
  for (int d = 0; d < cfg.max_delay; ++d) delays[d] = d;
  res.spectrum_grid = cfg.beam_spec().grid_deg;
  res.radar_draws = cfg.blocks;
  for (int b = 0; b < cfg.blocks; ++b) {
    Rng rng = Rng::stream(cfg.seed, {0xAD, static_cast<std::uint64_t>(b)});
    const WaveformBlock blk = make_block(W, N, rng);
    const CMatrix r = radar_receive(cfg.array, cfg.radar_targets, blk.X, cfg.radar_noise, rng);
    const std::vector<CMatrix> C = range_compress(r, blk.X, cfg.max_delay);
    const std::vector<double> prof = range_profile(cfg.array, C, cfg.profile_deg);
    const std::vector<double> spec =
        capon_spectrum(range_bin_covariance(C[cfg.capon_bin]), cfg.array, res.spectrum_grid);
    const std::vector<double> dp = find_peaks(prof, delays, static_cast<int>(delay_set.size()));
    if (std::equal(dp.begin(), dp.end(), delay_set.begin(), delay_set.end(),
                   [](double a, int b) { return a == b; }))
      ++res.range_hits;
    const std::vector<double> ap = find_peaks(spec, res.spectrum_grid, static_cast<int>(bin_angles.size()));
    bool ok = ap.size() == bin_angles.size();
    for (std::size_t i = 0; ok && i < ap.size(); ++i) ok = std::abs(ap[i] - bin_angles[i]) <= 1.0;
    if (ok) ++res.capon_hits;
    if (b == 0) {
      res.profile = prof;
      res.spectrum = spec;
    }
  }
  VerifyRow rp{"range_peaks", -1, static_cast<double>(res.range_hits) / res.radar_draws, 1.0, 0.1, false};
  rp.pass = rp.value >= 0.9;
  res.verify.push_back(rp);
  if (!bin_angles.empty()) {
    VerifyRow cp{"capon_peaks", -1, static_cast<double>(res.capon_hits) / res.radar_draws, 1.0, 0.1, false};
    cp.pass = cp.value >= 0.9;
    res.verify.push_back(cp);
  }
  return res;
}

std::string verify_csv_header() { return "check,user,value,reference,tolerance,pass"; }

std::string verify_csv_row(const VerifyRow& r) {
  return r.check + "," + (r.user >= 0 ? std::to_string(r.user) : std::string()) + "," +
         fmt(r.value) + "," + fmt(r.reference) + "," + fmt(r.tolerance) + "," +
         (r.pass ? "1" : "0");
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& precoder_path,
                 const std::string& channel_path) {
  cfg.validate();
  const int M = cfg.array.num_elements;
  CMatrix stacked;
  try {
    stacked = read_matrix(precoder_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (stacked.rows() != M || stacked.cols() < M)
    throw ConfigError("precoder must be M x (K + M) with M = " + std::to_string(M));
  const int K = static_cast<int>(stacked.cols()) - M;
  const Precoder W = Precoder::from_stacked(stacked, K);
  CMatrix H;
  if (!channel_path.empty()) {
    try {
      H = read_matrix(channel_path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  } else if (K > 0) {
    H = trial_channel(cfg, K, 0).H;
  }
  ensure_output_dir(cfg);
  const SimulationResult res = run_simulation(cfg, W, H);

  std::ofstream v = open_out(out_path(cfg, "verify.csv"));
  v << verify_csv_header() << '\n';
  for (const auto& r : res.verify) v << verify_csv_row(r) << '\n';
  std::ofstream s = open_out(out_path(cfg, "spectrum.csv"));
  s << "angle_deg,value\n";
  for (std::size_t i = 0; i < res.spectrum.size(); ++i)
    s << fmt(res.spectrum_grid[i]) << ',' << fmt(res.spectrum[i]) << '\n';
  std::ofstream p = open_out(out_path(cfg, "range_profile.csv"));
  p << "delay,value\n";
  for (std::size_t d = 0; d < res.profile.size(); ++d) p << d << ',' << fmt(res.profile[d]) << '\n';
  return kExitOk;
}

}  // namespace dfrc
