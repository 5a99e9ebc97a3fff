// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as arguments
// to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dfrc/conic.hpp"
#include "dfrc/design.hpp"
#include "dfrc/experiment.hpp"
#include "dfrc/hermitian.hpp"
#include "dfrc/metrics.hpp"
#include "dfrc/simulate.hpp"
#include "qsdp_oracle.hpp"

using namespace dfrc;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const RadarObjective& objective() {
  static const RadarObjective obj = build_radar_loss(ArrayGeometry{}, default_beam_spec());
  return obj;
}

DesignConfig config_db(double gamma_db) {
  DesignConfig c;
  c.gamma = {db_to_linear(gamma_db)};
  return c;
}

CMatrix channel(std::uint64_t tag, std::uint64_t i, int K) {
  Rng rng = Rng::stream(tag, {i});
  return rayleigh_channel(K, 10, rng).H;
}

double min_eig(const CMatrix& X) { return hermitian_eigenvalues((X + X.adjoint()) / 2.0).minCoeff(); }
double max_eig(const CMatrix& X) { return hermitian_eigenvalues((X + X.adjoint()) / 2.0).maxCoeff(); }

CMatrix clip_psd(const CMatrix& X) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((X + X.adjoint()) / 2.0);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().adjoint();
}

Precoder radar_only_precoder() {
  static const RadarOnlyResult r0 = radar_only(objective(), DesignConfig{});
  Precoder W;
  W.comm = CMatrix::Zero(10, 0);
  W.radar = semidefinite_cholesky(r0.R);
  return W;
}

// ---------------------------------------------------------------------------------------

Verdict c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const RadarOnlyResult r = radar_only(ArrayGeometry{}, default_beam_spec(), DesignConfig{});
  const double secs = seconds_since(t0);
  const int rank = numerical_rank(r.R, 1e-3);
  return {r.solver.status == SolveStatus::Optimal && rank == 4 && secs <= 60.0,
          fmt("rank %.0f (want 4), loss %.10g, %.2f s", rank, r.loss, secs)};
}

Verdict c2() {
  int solved = 0, skipped = 0, bad = 0;
  double worst_gap = 0, worst_psd = 0, worst_sinr = 0;
  for (std::uint64_t i = 0; solved < 50 && i < 200; ++i) {
    const int K = i % 2 ? 4 : 2;
    const double gdb = std::vector<double>{4, 12, 20}[(i / 2) % 3];
    const DesignConfig c = config_db(gdb);
    const CMatrix H = channel(2002, i, K);
    const SdrRelaxed rel = sdr_solve(objective(), c, H);
    if (rel.solver.status == SolveStatus::Infeasible) {
      ++skipped;
      continue;
    }
    if (rel.solver.status != SolveStatus::Optimal) {
      ++bad;
      continue;
    }
    const DesignOutcome o = sdr_beamform(objective(), c, H);
    if (o.status != DesignStatus::Feasible) {
      ++bad;
      continue;
    }
    ++solved;
    worst_gap = std::max(worst_gap, std::abs(o.loss - o.relaxed_loss) / (1.0 + o.loss));
    // residuals: R_k - w_k w_k^H per user and R - sum_k w_k w_k^H
    CMatrix D = o.R;
    for (int k = 0; k < K; ++k) {
      const CVector w = o.W.comm.col(k);
      const CMatrix Rk = clip_psd(rel.Rk[k]);
      worst_psd = std::min(worst_psd, min_eig(Rk - w * w.adjoint()) / max_eig(Rk));
      D -= w * w.adjoint();
    }
    worst_psd = std::min(worst_psd, min_eig(D) / max_eig(o.R));
    worst_sinr = std::min(worst_sinr, (o.sinr.array() - c.gamma[0]).minCoeff());
  }
  const bool pass = solved == 50 && bad == 0 && worst_gap <= 1e-5 && worst_psd >= -1e-8 &&
                    worst_sinr >= -1e-6;
  return {pass, fmt("%.0f instances (%.0f infeasible skipped, %.0f failures); max gap %.2e, ", solved,
                    skipped, bad, worst_gap) +
                    fmt("min residual eig %.2e lambda_max, min SINR - Gamma %.2e", worst_psd, worst_sinr)};
}

Verdict c3() {
  std::mt19937_64 rng(3003);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  auto randc = [&](int r, int c) {
    CMatrix A(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) A(i, j) = {nd(rng), nd(rng)};
    return A;
  };
  double worst_r = 0, worst_f = 0;
  int count = 0;
  for (auto [K, M] : {std::pair{1, 2}, std::pair{2, 4}, std::pair{4, 10}})
    for (int t = 0; t < 100; ++t) {
      const CMatrix B = randc(M, M);
      const CMatrix R = B * B.adjoint();
      const CMatrix H = randc(K, M);
      // matched F: random unitary applied to [chol(H R H^H), 0]
      CMatrix F = CMatrix::Zero(K, K + M);
      F.leftCols(K) = (H * R * H.adjoint()).llt().matrixL();
      const CMatrix U = randc(K + M, K + M).householderQr().householderQ();
      F = F * U;
      const CMatrix W = zf_construct_precoder(R, F, H);
      worst_r = std::max(worst_r, (W * W.adjoint() - R).norm() / R.norm());
      worst_f = std::max(worst_f, (H * W - F).norm() / F.norm());
      ++count;
    }
  return {worst_r <= 1e-8 && worst_f <= 1e-8,
          fmt("%.0f pairs; max ||WW^H-R||/||R|| %.2e, max ||HW-F||/||F|| %.2e", count, worst_r, worst_f)};
}

Verdict c4() {
  const RadarOnlyResult r0 = radar_only(objective(), DesignConfig{});
  double worst = 0;
  for (std::uint64_t i = 0; i < 3; ++i) {
    DesignConfig c;
    c.gamma = {1e-9};
    const DesignOutcome o = sdr_beamform(objective(), c, channel(4004, i, 2 + 2 * i));
    if (o.status != DesignStatus::Feasible) return {false, "SDR at Gamma=1e-9 not feasible"};
    worst = std::max(worst, std::abs(o.loss - r0.loss) / r0.loss);
  }
  return {worst <= 1e-4, fmt("max |loss - loss0|/loss0 = %.2e over K = 2, 4, 6", worst)};
}

Verdict c5() {
  double worst_loss = 0, worst_fair = 0;
  int infeasible = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const CMatrix H = channel(5005, i, 2);
    const double g2 = gamma_II(objective(), DesignConfig{}, H);
    std::vector<double> losses;
    for (double f : {0.25, 0.5, 1.0}) {
      DesignConfig c;
      c.gamma = {f * g2};
      const DesignOutcome z = zf_beamform(objective(), c, H);
      if (z.status != DesignStatus::Feasible) {
        ++infeasible;
        continue;
      }
      losses.push_back(z.loss);
      worst_fair = std::max(worst_fair, std::abs(fairness(z.sinr) - g2) / g2);
    }
    if (losses.empty()) continue;
    const auto [lo, hi] = std::minmax_element(losses.begin(), losses.end());
    worst_loss = std::max(worst_loss, (*hi - *lo) / *lo);
  }
  return {infeasible == 0 && worst_loss <= 1e-5 && worst_fair <= 1e-4,
          fmt("20 draws; max relative loss spread %.2e, max |fairness - Gamma_II|/Gamma_II %.2e, "
              "%.0f infeasible",
              worst_loss, worst_fair, infeasible)};
}

// ---------------------------------------------------------------------------------------
// Monte Carlo sweep shared by criteria 6, 7, 8 and 11: trials 0..49 (timed) and 50..99.

struct SweepData {
  std::vector<SweepRow> rows;
  double first_half_seconds = 0;
};

ExperimentConfig sweep_config() {
  ExperimentConfig c;
  c.users = {2, 4, 6};
  c.gamma_db = {4, 8, 12, 16, 20, 24};
  c.method = "both";
  c.timing = false;
  c.seed = 6006;
  return c;
}

const SweepData& sweep(int trials) {
  static SweepData d;
  static int have = 0;
  if (have >= trials) return d;
  ExperimentConfig c = sweep_config();
  if (have == 0) {
    c.trials = 50;
    const auto t0 = std::chrono::steady_clock::now();
    d.rows = run_sweep(c);
    d.first_half_seconds = seconds_since(t0);
    have = 50;
  }
  if (trials > have) {
    c.first_trial = have;
    c.trials = trials - have;
    const std::vector<SweepRow> more = run_sweep(c);
    d.rows.insert(d.rows.end(), more.begin(), more.end());
    have = trials;
  }
  return d;
}

using CellKey = std::tuple<std::string, int, double>;

// rows per (method, K, Gamma) ordered by trial, limited to trials < max_trial
std::map<CellKey, std::vector<const SweepRow*>> cells(const std::vector<SweepRow>& rows, int max_trial) {
  std::map<CellKey, std::vector<const SweepRow*>> out;
  for (const SweepRow& r : rows)
    if (r.trial < max_trial) out[{r.method, r.users, r.gamma_db}].push_back(&r);
  for (auto& [k, v] : out)
    std::sort(v.begin(), v.end(), [](const SweepRow* a, const SweepRow* b) { return a->trial < b->trial; });
  return out;
}

struct MeanSe {
  int n = 0;
  double mean = NAN, se = NAN;
};

MeanSe feasible_mse(const std::vector<const SweepRow*>& v) {
  MeanSe m;
  double s = 0, s2 = 0;
  for (const SweepRow* r : v)
    if (r->status == "feasible") {
      ++m.n;
      s += r->mse;
      s2 += r->mse * r->mse;
    }
  if (m.n > 0) m.mean = s / m.n;
  if (m.n > 1) m.se = std::sqrt(std::max(0.0, (s2 - m.n * m.mean * m.mean) / (m.n - 1)) / m.n);
  return m;
}

Verdict c6() {
  const SweepData& d = sweep(50);
  const auto cl = cells(d.rows, 50);
  const auto cfg = sweep_config();
  std::string fails;
  int a_checked = 0, b_checked = 0, c_checked = 0;
  // (a) sdr <= zf over jointly feasible trials
  for (int K : cfg.users)
    for (double g : cfg.gamma_db) {
      const auto& s = cl.at({"sdr", K, g});
      const auto& z = cl.at({"zf", K, g});
      double ss = 0, sz = 0;
      int n = 0;
      for (std::size_t t = 0; t < s.size(); ++t)
        if (s[t]->status == "feasible" && z[t]->status == "feasible") {
          ss += s[t]->mse;
          sz += z[t]->mse;
          ++n;
        }
      if (n == 0) continue;
      ++a_checked;
      if (ss / n > sz / n) fails += fmt("(a) K=%.0f G=%.0f sdr %.4g > zf %.4g; ", K, g, ss / n, sz / n);
    }
  // (b) sdr mean nondecreasing in Gamma within one pooled standard error
  for (int K : cfg.users)
    for (std::size_t i = 0; i + 1 < cfg.gamma_db.size(); ++i) {
      const MeanSe a = feasible_mse(cl.at({"sdr", K, cfg.gamma_db[i]}));
      const MeanSe b = feasible_mse(cl.at({"sdr", K, cfg.gamma_db[i + 1]}));
      if (a.n < 2 || b.n < 2) continue;
      ++b_checked;
      const double pooled = std::sqrt(a.se * a.se + b.se * b.se);
      if (b.mean < a.mean - pooled)
        fails += fmt("(b) K=%.0f G=%.0f->next %.4g -> %.4g; ", K, cfg.gamma_db[i], a.mean, b.mean);
    }
  // (c) mean mse increases with K at fixed Gamma
  for (const std::string m : {"sdr", "zf"})
    for (double g : cfg.gamma_db)
      for (std::size_t i = 0; i + 1 < cfg.users.size(); ++i) {
        const MeanSe a = feasible_mse(cl.at({m, cfg.users[i], g}));
        const MeanSe b = feasible_mse(cl.at({m, cfg.users[i + 1], g}));
        if (a.n < 2 || b.n < 2) continue;
        ++c_checked;
        if (!(b.mean > a.mean))
          fails += m + fmt(" (c) G=%.0f K=%.0f->next %.4g -> %.4g; ", g, cfg.users[i], a.mean, b.mean);
      }
  const bool fast = d.first_half_seconds <= 1800.0;
  if (!fast) fails += fmt("runtime %.0f s > 1800 s; ", d.first_half_seconds);
  return {fails.empty(), fmt("%.0f/%.0f/%.0f comparisons (a/b/c), 50 trials in %.0f s", a_checked, b_checked,
                             c_checked, d.first_half_seconds) +
                             (fails.empty() ? "" : "; " + fails)};
}

Verdict c7() {
  const SweepData& d = sweep(50);
  const auto cl = cells(d.rows, 50);
  const auto& s = cl.at({"sdr", 2, 24.0});
  const auto& z = cl.at({"zf", 2, 24.0});
  double ss = 0, sz = 0;
  int n = 0;
  for (std::size_t t = 0; t < s.size(); ++t)
    if (s[t]->status == "feasible" && z[t]->status == "feasible") {
      ss += s[t]->mse;
      sz += z[t]->mse;
      ++n;
    }
  if (n == 0) return {false, "no jointly feasible trial at K=2, 24 dB"};
  const double gap = std::abs(sz / n - ss / n), ref = ss / n;
  return {gap <= 0.25 * ref, fmt("%.0f trials; mean mse sdr %.5g, zf %.5g, gap/sdr %.3g", n, ss / n, sz / n, gap / ref)};
}

Verdict c8() {
  const SweepData& d = sweep(100);
  int n = 0;
  double worst = 0;
  for (const SweepRow& r : d.rows)
    if (r.method == "zf" && r.status == "feasible") {
      ++n;
      worst = std::max(worst, r.leakage);
    }
  return {n > 0 && worst <= 1e-10, fmt("%.0f feasible ZF instances; max interference/signal %.2e", n, worst)};
}

Verdict c9() {
  const CMatrix H = channel(9009, 0, 2);
  const DesignConfig c = config_db(12.0);
  const DesignOutcome o = sdr_beamform(objective(), c, H);
  if (o.status != DesignStatus::Feasible) return {false, "design not feasible"};
  const CMatrix R = o.W.covariance();
  int within = 0;
  for (int b = 0; b < 100; ++b) {
    Rng rng = Rng::stream(9009, {1, static_cast<std::uint64_t>(b)});
    const CMatrix X = make_block(o.W, 1024, rng).X;
    within += (sample_covariance(X) - R).norm() <= 5.0 * R.norm() / std::sqrt(1024.0);
  }
  RVector acc = RVector::Zero(2);
  for (int b = 0; b < 20; ++b) {
    Rng rng = Rng::stream(9009, {2, static_cast<std::uint64_t>(b)});
    const WaveformBlock blk = make_block(o.W, 4096, rng);
    acc += empirical_sinr(comm_receive(H, blk.X, c.noise_power, rng), blk.C);
  }
  const RVector closed = sinr_closed_form(H, o.W, c.noise_power);
  double worst_db = 0;
  for (int k = 0; k < 2; ++k)
    worst_db = std::max(worst_db, std::abs(linear_to_db(acc[k] / 20) - linear_to_db(closed[k])));
  return {within >= 95 && worst_db <= 1.0,
          fmt("%.0f/100 blocks within 5||R||/sqrt(N); max |SINR_emp - SINR| = %.3f dB", within, worst_db)};
}

Verdict c10() {
  const RadarObjective& obj = objective();
  int ok = 0;
  double worst = 1e300;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const DesignOutcome o = sdr_beamform(obj, config_db(12.0), channel(10010, i, 2));
    if (o.status != DesignStatus::Feasible) continue;
    double in = 0, out = 0;
    int nin = 0, nout = 0;
    for (double th : obj.spec.grid_deg) {
      const double p = beam_pattern(obj.geom, o.R, th);
      if (desired_pattern(obj.spec, th) > 0) {
        in += p;
        ++nin;
      } else {
        out += p;
        ++nout;
      }
    }
    const double ratio = (in / nin) / (out / nout);
    worst = std::min(worst, ratio);
    ok += ratio >= 5.0;
  }
  return {ok >= 45, fmt("%.0f/50 draws with in-beam >= 5x out-of-beam (min ratio %.2f)", ok, worst)};
}

Verdict c11() {
  const SweepData& d = sweep(100);
  const auto cl = cells(d.rows, 100);
  const auto cfg = sweep_config();
  auto frac = [&](const std::string& m, int K, double g) {
    const auto& v = cl.at({m, K, g});
    int f = 0;
    for (const SweepRow* r : v) f += r->status == "feasible";
    return static_cast<double>(f) / v.size();
  };
  std::string fails, table;
  double worst_diff = 0;
  for (const std::string m : {"sdr", "zf"}) {
    for (int K : cfg.users) {
      table += m + fmt(" K=%.0f:", K);
      for (std::size_t i = 0; i < cfg.gamma_db.size(); ++i) {
        table += fmt(" %.2f", frac(m, K, cfg.gamma_db[i]));
        if (i + 1 < cfg.gamma_db.size() && frac(m, K, cfg.gamma_db[i + 1]) > frac(m, K, cfg.gamma_db[i]))
          fails += m + fmt(" K=%.0f rises after %.0f dB; ", K, cfg.gamma_db[i]);
      }
      table += "; ";
    }
    for (std::size_t i = 0; i + 1 < cfg.users.size(); ++i)
      if (frac(m, cfg.users[i + 1], 24.0) > frac(m, cfg.users[i], 24.0))
        fails += m + fmt(" rises with K after K=%.0f at 24 dB; ", cfg.users[i]);
  }
  for (int K : cfg.users)
    for (double g : cfg.gamma_db) worst_diff = std::max(worst_diff, std::abs(frac("sdr", K, g) - frac("zf", K, g)));
  if (worst_diff > 0.1) fails += fmt("sdr/zf fractions differ by %.2f; ", worst_diff);
  return {fails.empty(), table + fmt("max |sdr - zf| %.2f", worst_diff) + (fails.empty() ? "" : "; " + fails)};
}

Verdict c12() {
  double worst = 0;
  {
    ConicProblem p(1);
    p.q << 1.0;
    p.psd.push_back({1, RMatrix::Ones(1, 1), RVector::Zero(1)});
    p.A = RMatrix::Ones(1, 1);
    p.b = RVector::Constant(1, 3.0);
    const ConicSolution s = solve(p);
    if (s.status != SolveStatus::Optimal) return {false, "example 1 not solved"};
    worst = std::max({worst, std::abs(s.z[0] - 3.0), std::abs(s.objective - 3.0)});
  }
  {
    ConicProblem p(4);
    p.q << 1.0, 1.0, 0.0, 0.0;
    p.psd.push_back({2, RMatrix::Identity(4, 4), RVector::Zero(4)});
    p.A = RMatrix::Zero(2, 4);
    p.A(0, 2) = 1.0;
    p.A(1, 3) = 1.0;
    p.b.resize(2);
    p.b << std::sqrt(2.0), 0.0;  // svec scales off-diagonals by sqrt(2): Re x12 = 1, Im x12 = 0
    const ConicSolution s = solve(p);
    if (s.status != SolveStatus::Optimal) return {false, "example 2 not solved"};
    worst = std::max({worst, std::abs(s.objective - 2.0), std::abs(s.z[0] - 1.0), std::abs(s.z[1] - 1.0)});
  }
  {
    ConicProblem p(1);
    p.Q = RMatrix::Ones(1, 1);
    p.q << -4.0;
    p.c = 4.0;
    p.G = RMatrix::Constant(1, 1, -1.0);
    p.h = RVector::Constant(1, -3.0);
    const ConicSolution s = solve(p);
    if (s.status != SolveStatus::Optimal) return {false, "example 3 not solved"};
    worst = std::max({worst, std::abs(s.z[0] - 3.0), std::abs(s.objective - 1.0)});
  }
  std::mt19937_64 rng(12012);
  std::normal_distribution<double> nd;
  double worst_qsdp = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int order = 2 + trial % 2;
    const int n = order * order;
    RMatrix B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = nd(rng);
    RVector q(n);
    for (int i = 0; i < n; ++i) q[i] = 2.0 * nd(rng);
    ConicProblem p(n);
    p.Q = B.transpose() * B / n + 0.05 * RMatrix::Identity(n, n);
    p.q = q;
    // 0 <= X <= I
    p.psd.push_back({order, RMatrix::Identity(n, n), RVector::Zero(n)});
    p.psd.push_back({order, -RMatrix::Identity(n, n), svec(CMatrix::Identity(order, order))});
    const ConicSolution s = solve(p);
    if (s.status != SolveStatus::Optimal) return {false, fmt("QSDP %.0f not solved", trial)};
    worst_qsdp = std::max(worst_qsdp, std::abs(s.objective - testutil::pg_oracle(p.Q, q, order)));
  }
  return {worst <= 1e-6 && worst_qsdp <= 1e-5,
          fmt("trivial examples max error %.2e; 50 QSDPs max |obj - oracle| %.2e", worst, worst_qsdp)};
}

Verdict c13() {
  const ArrayGeometry g;
  const DesignOutcome o = sdr_beamform(objective(), config_db(12.0), channel(13013, 0, 2));
  if (o.status != DesignStatus::Feasible) return {false, "SDR design not feasible"};
  const std::vector<double> grid = angle_grid(-90, 90, 0.1);
  std::vector<double> delays(64);
  for (int d = 0; d < 64; ++d) delays[d] = d;
  const std::vector<RadarTarget> layout = five_target_layout();
  std::string detail;
  bool pass = true;
  int which = 0;
  for (const Precoder& W : {radar_only_precoder(), o.W}) {
    int range_ok = 0, capon_ok = 0;
    for (int t = 0; t < 20; ++t) {
      Rng rng = Rng::stream(13013, {static_cast<std::uint64_t>(which), static_cast<std::uint64_t>(t)});
      const WaveformBlock b = make_block(W, 1024, rng);
      const auto C = range_compress(radar_receive(g, layout, b.X, 1.0, rng), b.X, 64);
      range_ok += find_peaks(range_profile(g, C, 0.0), delays, 3) == std::vector<double>{10, 20, 30};
      const auto pk = find_peaks(capon_spectrum(range_bin_covariance(C[20]), g, grid), grid, 3);
      capon_ok += pk.size() == 3 && std::abs(pk[0] + 40) <= 1 && std::abs(pk[1]) <= 1 && std::abs(pk[2] - 40) <= 1;
    }
    pass = pass && range_ok >= 18 && capon_ok >= 18;
    detail += std::string(which ? "; sdr" : "radar-only") +
              fmt(": range %.0f/20, capon %.0f/20", range_ok, capon_ok);
    ++which;
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"radar-only rank", c1},
      {"SDR tightness", c2},
      {"ZF construction round trip", c3},
      {"Gamma -> 0 limit", c4},
      {"ZF plateau below Gamma_II", c5},
      {"ordering and monotonicity", c6},
      {"high-Gamma convergence", c7},
      {"ZF exactness", c8},
      {"waveform consistency", c9},
      {"beam structure", c10},
      {"feasibility trend", c11},
      {"conic solver suite", c12},
      {"Capon / range structure", c13},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first,
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
