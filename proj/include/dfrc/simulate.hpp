#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "dfrc/array.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

// mt19937_64 seeded through splitmix64. Streams are derived from a master seed and a
// key path (e.g. {K, trial}), so results do not depend on which thread runs a trial.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

  double normal();  // N(0, 1)
  // Circularly symmetric complex Gaussian, E|z|^2 = variance.
  cdouble complex_normal(double variance = 1.0);
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

struct WaveformBlock {
  CMatrix S;  // M x N radar codes
  CMatrix C;  // K x N user symbols
  CMatrix X;  // M x N transmitted block
  int length() const { return static_cast<int>(X.cols()); }
};

struct RadarTarget {
  cdouble amplitude{1.0, 0.0};
  int delay = 0;
  double angle_deg = 0.0;
};

struct NoiseModel {
  double comm_variance = 0.01;
  double radar_variance = 1.0;
  void validate() const;
};

// K x M, entries CN(0, 1). Requires 1 <= K < M.
Channel rayleigh_channel(int users, int antennas, Rng& rng);

// Entries drawn uniformly from {(+-1 +-j)/sqrt(2)}.
CMatrix gen_qpsk(int rows, int length, Rng& rng);

// X = W_r S + W_c C.
CMatrix transmit(const Precoder& W, const CMatrix& S, const CMatrix& C);

// Fresh QPSK codes and symbols of length N pushed through W.
WaveformBlock make_block(const Precoder& W, int length, Rng& rng);

// H X + noise, noise CN(0, variance) per entry.
CMatrix comm_receive(const CMatrix& H, const CMatrix& X, double noise_variance, Rng& rng);

// sum_p beta_p a^c(theta_p) a^H(theta_p) x[n - n_p] + noise; samples before the delay
// are zero (no wraparound).
CMatrix radar_receive(const ArrayGeometry& geom, const std::vector<RadarTarget>& targets,
                      const CMatrix& X, double noise_variance, Rng& rng);

// (1/N) X X^H.
CMatrix sample_covariance(const CMatrix& X);

// Matched filter against the known block, one M x M matrix per delay hypothesis:
//   C(d) = (1/N) sum_n r[n] x^H[n - d],  d = 0 .. max_delay-1.
std::vector<CMatrix> range_compress(const CMatrix& received, const CMatrix& X,
                                    int max_delay = 64);

// |a^T(theta) C(d) a(theta)| / M per delay. A target (d, theta) with amplitude beta
// contributes |beta| P(theta; R_hat).
std::vector<double> range_profile(const ArrayGeometry& geom, const std::vector<CMatrix>& C,
                                  double theta_deg);

// ||C(d)||_F^2 per delay.
std::vector<double> range_energy(const std::vector<CMatrix>& C);

// Spatial covariance of range bin d, conjugated so that targets appear with steering
// a(theta) (the radar receive model carries a^c).
CMatrix range_bin_covariance(const CMatrix& Cd);

// 1 / (a^H (R + delta tr(R)/M I)^{-1} a) over the grid.
std::vector<double> capon_spectrum(const CMatrix& covariance, const ArrayGeometry& geom,
                                   const std::vector<double>& grid_deg, double loading = 1e-3);

// Grid positions of the `count` largest strict local maxima (endpoints allowed),
// sorted by position.
std::vector<double> find_peaks(const std::vector<double>& values,
                               const std::vector<double>& positions, int count);

// Per-user SINR estimated from a received block with the user symbols known:
// g_k = <r_k, c_k>/N, signal |g_k|^2, interference + noise = mean |r_k - g_k c_k|^2.
RVector empirical_sinr(const CMatrix& received, const CMatrix& C);

// Targets at (delay, angle) (10, 0), (20, -40), (20, 0), (20, 40), (30, 0), beta = 1.
std::vector<RadarTarget> five_target_layout();

}  // namespace dfrc
