#include <cmath>
#include <random>

#include "doctest.h"

#include "dfrc/array.hpp"
#include "test_util.hpp"

using namespace dfrc;

TEST_CASE("array: steering vector examples") {
  ArrayGeometry g;
  const CVector a0 = steering_vector(g, 0.0);
  CHECK((a0 - CVector::Ones(10)).norm() < 1e-15);

  ArrayGeometry g2{2, 0.5};
  const CVector a30 = steering_vector(g2, 30.0);
  CHECK(std::abs(a30[0] - cdouble(1, 0)) < 1e-12);
  CHECK(std::abs(a30[1] - cdouble(0, 1)) < 1e-12);

  ArrayGeometry g4{4, 0.5};
  CHECK((steering_vector(g4, -23.0) - steering_vector(g4, 23.0).conjugate()).norm() < 1e-12);

  CHECK_THROWS_AS(steering_vector(g, 90.5), DomainError);
  CHECK_THROWS_AS(steering_vector(g, -91.0), DomainError);
  CHECK_NOTHROW(steering_vector(g, 90.0));
}

TEST_CASE("array: steering vectors have unit-modulus entries") {
  ArrayGeometry g{16, 0.37};
  for (double th = -90.0; th <= 90.0; th += 7.3) {
    const CVector a = steering_vector(g, th);
    for (int m = 0; m < a.size(); ++m) CHECK(std::abs(std::abs(a[m]) - 1.0) < 1e-12);
  }
}

TEST_CASE("array: beam pattern examples") {
  ArrayGeometry g;
  const double Pt = 2.5;
  const CMatrix Ri = (Pt / 10.0) * CMatrix::Identity(10, 10);
  for (double th : {-60.0, 0.0, 12.5}) CHECK(beam_pattern(g, Ri, th) == doctest::Approx(Pt).epsilon(1e-12));

  const CVector a = steering_vector(g, 20.0);
  const CMatrix R1 = (Pt / 10.0) * a * a.adjoint();
  CHECK(beam_pattern(g, R1, 20.0) == doctest::Approx(Pt * 10.0).epsilon(1e-12));

  std::mt19937_64 rng(3);
  ArrayGeometry g3{3, 0.5};
  const CMatrix R = testutil::random_psd(rng, 3);
  CHECK(beam_pattern(g3, R, 17.0) ==
        doctest::Approx(testutil::quad(R, 0.5, 17.0, 17.0).real()).epsilon(1e-12));

  CMatrix bad = R;
  bad(0, 1) += cdouble(0.0, 1e-3);
  CHECK_THROWS_AS(beam_pattern(g3, bad, 0.0), ContractViolation);
}

TEST_CASE("array: beam pattern is non-negative for PSD inputs") {
  std::mt19937_64 rng(5);
  ArrayGeometry g;
  for (int t = 0; t < 20; ++t) {
    const CMatrix R = testutil::random_psd(rng, 10, 1 + t % 4);
    for (double th = -90.0; th <= 90.0; th += 1.7) CHECK(beam_pattern(g, R, th) >= -1e-10);
  }
}

TEST_CASE("array: cross correlation") {
  std::mt19937_64 rng(7);
  ArrayGeometry g;
  for (int t = 0; t < 100; ++t) {
    const CMatrix R = testutil::random_psd(rng, 10);
    const double t1 = -80.0 + 1.6 * t, t2 = 33.0 - 0.9 * t;
    const cdouble c12 = cross_correlation(g, R, t1, t2);
    CHECK(std::abs(c12 - std::conj(cross_correlation(g, R, t2, t1))) < 1e-10 * (1.0 + std::abs(c12)));
    CHECK(std::abs(c12 - testutil::quad(R, 0.5, t1, t2)) < 1e-10 * (1.0 + std::abs(c12)));
    CHECK(cross_correlation(g, R, t1, t1).real() == doctest::Approx(beam_pattern(g, R, t1)));
  }
  ArrayGeometry g2{2, 0.5};
  const cdouble v = cross_correlation(g2, CMatrix::Identity(2, 2), 0.0, 30.0);
  CHECK(std::abs(v - cdouble(1.0, -1.0)) < 1e-12);
}

TEST_CASE("array: desired pattern") {
  const BeamSpec s = default_beam_spec();
  CHECK(desired_pattern(s, 0.0) == 1.0);
  CHECK(desired_pattern(s, 45.0) == 1.0);
  CHECK(desired_pattern(s, 35.0) == 1.0);
  CHECK(desired_pattern(s, 20.0) == 0.0);
  CHECK(desired_pattern(s, 45.1) == 0.0);

  // sum over the grid times resolution ~ P * Delta, within one step per beam
  double area = 0.0;
  for (double th : s.grid_deg) area += desired_pattern(s, th) * 0.1;
  CHECK(std::abs(area - 3 * 10.0) <= 3 * 0.1 + 1e-9);
}

TEST_CASE("array: angle grid") {
  CHECK(angle_grid(-90, 90, 0.1).size() == 1801);
  const auto g = angle_grid(-90, 90, 0.1);
  CHECK(g.front() == -90.0);
  CHECK(g.back() == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(g[900] == doctest::Approx(0.0));
  CHECK((angle_grid(0, 1, 0.5) == std::vector<double>{0.0, 0.5, 1.0}));
  const auto g3 = angle_grid(0, 1, 0.3);
  REQUIRE(g3.size() == 4);
  CHECK(g3[3] == doctest::Approx(0.9));
  CHECK_THROWS_AS(angle_grid(0, 1, 0.0), DomainError);
  CHECK_THROWS_AS(angle_grid(0, 1, -0.1), DomainError);
}

TEST_CASE("array: spec validation") {
  BeamSpec s = default_beam_spec();
  CHECK_NOTHROW(s.validate());
  BeamSpec empty = s;
  empty.target_directions_deg.clear();
  CHECK_THROWS(empty.validate());
  BeamSpec bad_grid = s;
  std::swap(bad_grid.grid_deg[3], bad_grid.grid_deg[4]);
  CHECK_THROWS(bad_grid.validate());
  BeamSpec zero_width = s;
  zero_width.beam_width_deg = 0.0;
  CHECK_THROWS(zero_width.validate());
  CHECK_THROWS((ArrayGeometry{0, 0.5}).validate());
  CHECK_THROWS((ArrayGeometry{4, 0.0}).validate());
}
