#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dfrc/types.hpp"

namespace testutil {

inline dfrc::CMatrix random_complex(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  dfrc::CMatrix A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = {nd(rng), nd(rng)};
  return A;
}

// Random PSD of the given rank (full rank when rank >= m).
inline dfrc::CMatrix random_psd(std::mt19937_64& rng, int m, int rank = -1) {
  const dfrc::CMatrix B = random_complex(rng, m, rank < 0 ? m : rank);
  return B * B.adjoint();
}

inline dfrc::CMatrix random_hermitian(std::mt19937_64& rng, int m) {
  const dfrc::CMatrix B = random_complex(rng, m, m);
  return (B + B.adjoint()) / 2.0;
}

// Steering vector written out from the definition, independent of the library.
inline std::vector<std::complex<double>> steer(int M, double d, double theta_deg) {
  const double pi = std::acos(-1.0);
  std::vector<std::complex<double>> a(M);
  for (int m = 0; m < M; ++m) a[m] = std::polar(1.0, 2.0 * pi * d * m * std::sin(theta_deg * pi / 180.0));
  return a;
}

// a(theta2)^H R a(theta1) by explicit double loop.
inline std::complex<double> quad(const dfrc::CMatrix& R, double d, double th1, double th2) {
  const int M = static_cast<int>(R.rows());
  const auto a1 = steer(M, d, th1);
  const auto a2 = steer(M, d, th2);
  std::complex<double> s = 0.0;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) s += std::conj(a2[i]) * R(i, j) * a1[j];
  return s;
}

}  // namespace testutil
