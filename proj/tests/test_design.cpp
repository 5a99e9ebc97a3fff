#include <cmath>
#include <random>

#include "doctest.h"

#include "dfrc/design.hpp"
#include "dfrc/hermitian.hpp"
#include "dfrc/metrics.hpp"
#include "test_util.hpp"

using namespace dfrc;

namespace {

const RadarObjective& default_objective() {
  static const RadarObjective obj = build_radar_loss(ArrayGeometry{}, default_beam_spec());
  return obj;
}

const RadarOnlyResult& default_radar_only() {
  static const RadarOnlyResult r = radar_only(default_objective(), DesignConfig{});
  return r;
}

DesignConfig cfg_db(double gamma_db) {
  DesignConfig c;
  c.gamma = {db_to_linear(gamma_db)};
  return c;
}

CMatrix rayleigh(std::mt19937_64& rng, int K, int M) { return testutil::random_complex(rng, K, M); }

double min_eig(const CMatrix& X) { return hermitian_eigenvalues((X + X.adjoint()) / 2.0).minCoeff(); }

void check_row_power(const Precoder& W, double Pt) {
  const CMatrix S = W.stacked();
  for (Eigen::Index m = 0; m < S.rows(); ++m)
    CHECK(S.row(m).squaredNorm() == doctest::Approx(Pt / S.rows()).epsilon(1e-6));
}

}  // namespace

TEST_CASE("design: radar-only") {
  const RadarOnlyResult& r = default_radar_only();
  REQUIRE(r.solver.status == SolveStatus::Optimal);
  CHECK(numerical_rank(r.R, 1e-3) == 4);
  for (int m = 0; m < 10; ++m) CHECK(r.R(m, m).real() == doctest::Approx(0.1).epsilon(1e-7));
  CHECK(min_eig(r.R) >= -1e-9 * hermitian_eigenvalues(r.R).maxCoeff());
  CHECK(r.loss == doctest::Approx(eval_loss(default_objective(), r.R, r.alpha)).epsilon(1e-9));
  // better than the isotropic feasible point with its own best alpha
  const AlphaFit iso = minimize_alpha(default_objective(), CMatrix::Identity(10, 10) / 10.0);
  CHECK(r.loss <= iso.loss);

  BeamSpec spec = default_beam_spec();
  spec.grid_deg = angle_grid(-90, 90, 1.0);
  DesignConfig c;
  c.total_power = 3.0;
  const RadarOnlyResult one = radar_only(ArrayGeometry{1, 0.5}, spec, c);
  REQUIRE(one.solver.status == SolveStatus::Optimal);
  CHECK(one.R(0, 0).real() == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("design: rank-one extraction") {
  std::mt19937_64 rng(21);
  const CVector w = testutil::random_complex(rng, 5, 1);
  const CVector h = testutil::random_complex(rng, 5, 1);
  const CVector wt = rank_one_extract(w * w.adjoint(), h);
  CHECK((wt * wt.adjoint() - w * w.adjoint()).norm() < 1e-12 * w.squaredNorm());

  CVector e(2);
  e << 1.0, 0.0;
  const CVector u = rank_one_extract(CMatrix::Identity(2, 2), e);
  CHECK((u - e).norm() < 1e-15);

  for (int t = 0; t < 50; ++t) {
    const CMatrix Rk = testutil::random_psd(rng, 6, 1 + t % 6);
    const CVector hk = testutil::random_complex(rng, 6, 1);
    const CVector x = rank_one_extract(Rk, hk);
    const double want = (hk.adjoint() * Rk * hk)(0, 0).real();
    CHECK(std::norm(hk.dot(x)) == doctest::Approx(want).epsilon(1e-10));
    const CMatrix res = Rk - x * x.adjoint();
    CHECK(min_eig(res) >= -1e-8 * hermitian_eigenvalues(Rk).maxCoeff());
  }
  CHECK_THROWS_AS(rank_one_extract(CMatrix::Zero(3, 3), CVector::Ones(3)), DegenerateExtraction);
}

TEST_CASE("design: radar precoder completion") {
  std::mt19937_64 rng(22);
  const CMatrix R = testutil::random_psd(rng, 5);
  const CMatrix Wr = radar_precoder_completion(R, {});
  CHECK((Wr * Wr.adjoint() - R).norm() <= 1e-8 * R.norm());
  CHECK(Wr.isLowerTriangular(1e-14));
  CHECK((Wr - R.llt().matrixL().toDenseMatrix()).norm() <= 1e-8 * Wr.norm());

  const CVector w1 = testutil::random_complex(rng, 5, 1);
  const CVector w2 = testutil::random_complex(rng, 5, 1);
  const CMatrix Rs = w1 * w1.adjoint() + w2 * w2.adjoint();
  CHECK(radar_precoder_completion(Rs, {w1, w2}).norm() < 1e-6 * Rs.norm());

  // residual of rank 2 plus two users
  const CMatrix D = testutil::random_psd(rng, 5, 2);
  const CMatrix W3 = radar_precoder_completion(D + Rs, {w1, w2});
  CHECK((W3 * W3.adjoint() - D).norm() <= 1e-8 * D.norm());

  CHECK_THROWS_AS(radar_precoder_completion(w1 * w1.adjoint(), {2.0 * w1}), TightnessViolation);
}

TEST_CASE("design: ZF precoder construction round trip") {
  CMatrix R1(1, 1), H1(1, 1), F1(1, 2);
  R1 << 1.0;
  H1 << 1.0;
  F1 << 1.0, 0.0;
  const CMatrix W1 = zf_construct_precoder(R1, F1, H1);
  CHECK(std::abs(W1(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(W1(0, 1)) < 1e-12);

  std::mt19937_64 rng(23);
  for (auto [K, M] : {std::pair{1, 2}, std::pair{2, 4}, std::pair{4, 10}}) {
    for (int t = 0; t < 100; ++t) {
      const CMatrix R = testutil::random_psd(rng, M);
      const CMatrix H = rayleigh(rng, K, M);
      CMatrix F = CMatrix::Zero(K, K + M);
      if (t % 2 == 0) {
        F.leftCols(K) = (H * R * H.adjoint()).llt().matrixL();
      } else {
        // general F with the same Gram matrix: rotate a Cholesky-based target
        CMatrix F0 = CMatrix::Zero(K, K + M);
        F0.leftCols(K) = (H * R * H.adjoint()).llt().matrixL();
        const CMatrix U = testutil::random_complex(rng, K + M, K + M).householderQr().householderQ();
        F = F0 * U;
      }
      const CMatrix W = zf_construct_precoder(R, F, H);
      CHECK((W * W.adjoint() - R).norm() <= 1e-8 * R.norm());
      CHECK((H * W - F).norm() <= 1e-8 * F.norm());
    }
  }

  const CMatrix R = testutil::random_psd(rng, 4);
  const CMatrix H = rayleigh(rng, 2, 4);
  CMatrix F = CMatrix::Zero(2, 6);
  F.leftCols(2) = (H * R * H.adjoint()).llt().matrixL();
  CHECK_THROWS_AS(zf_construct_precoder(R, 1.1 * F, H), PreconditionViolation);
  const CMatrix Hd = CMatrix::Ones(2, 4);  // identical rows: H R H^H is singular
  CMatrix Fd = CMatrix::Zero(2, 6);
  const double s = std::sqrt((Hd.row(0) * R * Hd.row(0).adjoint())(0, 0).real());
  Fd(0, 0) = s;
  Fd(1, 0) = s;
  CHECK_THROWS_AS(zf_construct_precoder(R, Fd, Hd), DegenerateUser);
}

TEST_CASE("design: SDR at K=2, 12 dB") {
  std::mt19937_64 rng(24);
  const RadarObjective& obj = default_objective();
  const DesignConfig c = cfg_db(12.0);
  for (int t = 0; t < 3; ++t) {
    const CMatrix H = rayleigh(rng, 2, 10);
    const DesignOutcome o = sdr_beamform(obj, c, H);
    REQUIRE(o.status == DesignStatus::Feasible);
    CHECK(std::abs(o.loss - o.relaxed_loss) <= 1e-5 * (1.0 + o.loss));
    CHECK(o.sinr.minCoeff() >= c.gamma[0] - 1e-6);
    CHECK((o.W.covariance() - o.R).norm() <= 1e-6 * o.R.norm());
    check_row_power(o.W, 1.0);
    const RVector closed = sinr_closed_form(H, o.W, c.noise_power);
    CHECK((closed - o.sinr).norm() <= 1e-9 * closed.norm());

    // three mainlobes
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
    CHECK(in / nin >= 5.0 * out / nout);
  }
}

TEST_CASE("design: SDR limits and per-user thresholds") {
  std::mt19937_64 rng(25);
  const RadarObjective& obj = default_objective();
  const CMatrix H = rayleigh(rng, 2, 10);

  DesignConfig tiny;
  tiny.gamma = {1e-9};
  const DesignOutcome o = sdr_beamform(obj, tiny, H);
  REQUIRE(o.status == DesignStatus::Feasible);
  CHECK(std::abs(o.loss - default_radar_only().loss) <= 1e-4 * default_radar_only().loss);

  DesignConfig huge;
  huge.gamma = {1e20};
  CHECK(sdr_beamform(obj, huge, H).status == DesignStatus::Infeasible);

  DesignConfig per;
  per.gamma = {db_to_linear(6.0), db_to_linear(15.0)};
  const DesignOutcome p = sdr_beamform(obj, per, H);
  REQUIRE(p.status == DesignStatus::Feasible);
  CHECK(p.sinr[0] >= per.gamma[0] - 1e-6);
  CHECK(p.sinr[1] >= per.gamma[1] - 1e-6);

  DesignConfig wrong;
  wrong.gamma = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(sdr_beamform(obj, wrong, H), ContractViolation);
  DesignConfig neg;
  neg.noise_power = -1.0;
  CHECK_THROWS_AS(sdr_beamform(obj, neg, H), ContractViolation);
  CHECK_THROWS(sdr_beamform(obj, cfg_db(10), rayleigh(rng, 10, 10)));
}

TEST_CASE("design: SDR loss is monotone in Gamma") {
  std::mt19937_64 rng(26);
  const CMatrix H = rayleigh(rng, 4, 10);
  double prev = 0.0;
  for (double gdb : {0.0, 6.0, 12.0, 18.0}) {
    const DesignOutcome o = sdr_beamform(default_objective(), cfg_db(gdb), H);
    REQUIRE(o.status == DesignStatus::Feasible);
    CHECK(o.loss >= prev - 1e-6);
    prev = o.loss;
  }
}

TEST_CASE("design: ZF beamformer") {
  std::mt19937_64 rng(27);
  const RadarObjective& obj = default_objective();
  for (int t = 0; t < 3; ++t) {
    const CMatrix H = rayleigh(rng, 2, 10);
    const DesignConfig c = cfg_db(12.0);
    const DesignOutcome z = zf_beamform(obj, c, H);
    REQUIRE(z.status == DesignStatus::Feasible);
    for (const UserPower& u : received_powers(H, z.W))
      CHECK(u.multiuser + u.radar <= 1e-10 * u.signal);
    CHECK((H * z.W.radar).norm() <= 1e-7 * (H * z.W.comm).norm());
    CHECK(fairness(z.sinr) >= c.gamma[0] - 1e-6);
    check_row_power(z.W, 1.0);
    const DesignOutcome s = sdr_beamform(obj, c, H);
    REQUIRE(s.status == DesignStatus::Feasible);
    CHECK(z.loss >= s.loss - 1e-5);

    const ZfRelaxed rel = zf_solve(obj, c, H);
    const CMatrix G = H * rel.R * H.adjoint();
    CHECK(std::abs(G(0, 1)) <= 1e-7 * rel.p.maxCoeff());
  }
  DesignConfig huge;
  huge.gamma = {1e20};
  CHECK(zf_beamform(obj, huge, rayleigh(rng, 2, 10)).status == DesignStatus::Infeasible);
}

TEST_CASE("design: ZF plateau below Gamma_II") {
  std::mt19937_64 rng(28);
  const RadarObjective& obj = default_objective();
  for (int t = 0; t < 2; ++t) {
    const CMatrix H = rayleigh(rng, 2, 10);
    const double g2 = gamma_II(obj, DesignConfig{}, H);
    CHECK(g2 > 0.0);
    DesignConfig c0;
    c0.gamma = {0.0};
    const DesignOutcome base = zf_beamform(obj, c0, H);
    REQUIRE(base.status == DesignStatus::Feasible);
    for (double f : {0.25, 0.5, 1.0}) {
      DesignConfig c;
      c.gamma = {f * g2};
      const DesignOutcome z = zf_beamform(obj, c, H);
      REQUIRE(z.status == DesignStatus::Feasible);
      CHECK(std::abs(z.loss - base.loss) <= 1e-5 * base.loss);
      CHECK(std::abs(fairness(z.sinr) - g2) <= 1e-4 * g2);
    }
    DesignConfig above;
    above.gamma = {1.5 * g2};
    const DesignOutcome z = zf_beamform(obj, above, H);
    if (z.status == DesignStatus::Feasible) CHECK(z.loss > base.loss * (1.0 + 1e-6));
  }
  CHECK(gamma_II(ArrayGeometry{}, default_beam_spec(), DesignConfig{}, rayleigh(rng, 2, 10)) > 0.0);
}
