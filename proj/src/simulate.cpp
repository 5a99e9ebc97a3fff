#include "dfrc/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace dfrc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t k : keys) s = splitmix64(s ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return Rng(s);
}

double Rng::normal() { return normal_(engine_); }

cdouble Rng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

void NoiseModel::validate() const {
  if (!(comm_variance > 0.0) || !std::isfinite(comm_variance))
    throw ContractViolation("comm noise variance must be positive");
  if (!(radar_variance > 0.0) || !std::isfinite(radar_variance))
    throw ContractViolation("radar noise variance must be positive");
}

Channel rayleigh_channel(int users, int antennas, Rng& rng) {
  if (users < 1 || users >= antennas)
    throw ContractViolation("rayleigh_channel needs 1 <= K < M");
  Channel ch;
  ch.H.resize(users, antennas);
  for (int i = 0; i < users; ++i)
    for (int j = 0; j < antennas; ++j) ch.H(i, j) = rng.complex_normal(1.0);
  return ch;
}

CMatrix gen_qpsk(int rows, int length, Rng& rng) {
  if (rows < 0 || length < 0) throw ContractViolation("gen_qpsk: negative size");
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix out(rows, length);
  // column-major fill, two bits per symbol
  for (int n = 0; n < length; ++n)
    for (int i = 0; i < rows; ++i) {
      const std::uint64_t b = rng.bits();
      out(i, n) = cdouble((b & 1) ? -s : s, (b & 2) ? -s : s);
    }
  return out;
}

CMatrix transmit(const Precoder& W, const CMatrix& S, const CMatrix& C) {
  const int M = W.antennas();
  if (W.radar.rows() != M || W.radar.cols() != M)
    throw ContractViolation("transmit: radar precoder must be M x M");
  if (S.rows() != M || C.rows() != W.users() || S.cols() != C.cols())
    throw ContractViolation("transmit: waveform shapes do not match the precoder");
  return W.radar * S + W.comm * C;
}

WaveformBlock make_block(const Precoder& W, int length, Rng& rng) {
  if (length < 1) throw ContractViolation("make_block: length must be positive");
  WaveformBlock b;
  b.S = gen_qpsk(W.antennas(), length, rng);
  b.C = gen_qpsk(W.users(), length, rng);
  b.X = transmit(W, b.S, b.C);
  return b;
}

namespace {

void add_noise(CMatrix& y, double variance, Rng& rng) {
  if (variance < 0.0) throw ContractViolation("noise variance must be non-negative");
  if (variance == 0.0) return;
  for (Eigen::Index n = 0; n < y.cols(); ++n)
    for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, n) += rng.complex_normal(variance);
}

}  // namespace

CMatrix comm_receive(const CMatrix& H, const CMatrix& X, double noise_variance, Rng& rng) {
  if (H.cols() != X.rows()) throw ContractViolation("comm_receive: H and X do not conform");
  CMatrix y = H * X;
  add_noise(y, noise_variance, rng);
  return y;
}

CMatrix radar_receive(const ArrayGeometry& geom, const std::vector<RadarTarget>& targets,
                      const CMatrix& X, double noise_variance, Rng& rng) {
  geom.validate();
  const int M = geom.num_elements;
  if (X.rows() != M) throw ContractViolation("radar_receive: X must have M rows");
  const Eigen::Index N = X.cols();
  CMatrix r = CMatrix::Zero(M, N);
  for (const auto& t : targets) {
    if (t.delay < 0) throw ContractViolation("radar_receive: negative delay");
    if (t.delay >= N) continue;
    const CVector a = steering_vector(geom, t.angle_deg);
    // a^H x[n] for every n, then outer product with beta a^c
    const Eigen::RowVectorXcd ax = a.adjoint() * X.leftCols(N - t.delay);
    r.rightCols(N - t.delay).noalias() += (t.amplitude * a.conjugate()) * ax;
  }
  add_noise(r, noise_variance, rng);
  return r;
}

CMatrix sample_covariance(const CMatrix& X) {
  if (X.cols() == 0) throw ContractViolation("sample_covariance: empty block");
  return X * X.adjoint() / static_cast<double>(X.cols());
}

std::vector<CMatrix> range_compress(const CMatrix& received, const CMatrix& X, int max_delay) {
  if (received.rows() != X.rows() || received.cols() != X.cols())
    throw ContractViolation("range_compress: received block and X differ in shape");
  if (max_delay < 1) throw ContractViolation("range_compress: max_delay must be positive");
  const Eigen::Index N = X.cols();
  std::vector<CMatrix> out;
  out.reserve(max_delay);
  for (int d = 0; d < max_delay; ++d) {
    if (d >= N) {
      out.push_back(CMatrix::Zero(X.rows(), X.rows()));
      continue;
    }
    out.push_back(received.rightCols(N - d) * X.leftCols(N - d).adjoint() /
                  static_cast<double>(N));
  }
  return out;
}

std::vector<double> range_profile(const ArrayGeometry& geom, const std::vector<CMatrix>& C,
                                  double theta_deg) {
  const CVector a = steering_vector(geom, theta_deg);
  const double M = geom.num_elements;
  std::vector<double> out;
  out.reserve(C.size());
  for (const auto& Cd : C) {
    if (Cd.rows() != a.size() || Cd.cols() != a.size())
      throw ContractViolation("range_profile: matrix size does not match the array");
    out.push_back(std::abs((a.transpose() * Cd * a)(0, 0)) / M);
  }
  return out;
}

std::vector<double> range_energy(const std::vector<CMatrix>& C) {
  std::vector<double> out;
  out.reserve(C.size());
  for (const auto& Cd : C) out.push_back(Cd.squaredNorm());
  return out;
}

CMatrix range_bin_covariance(const CMatrix& Cd) {
  if (Cd.rows() != Cd.cols()) throw ContractViolation("range_bin_covariance: not square");
  return (Cd * Cd.adjoint()).conjugate() / static_cast<double>(Cd.cols());
}

std::vector<double> capon_spectrum(const CMatrix& covariance, const ArrayGeometry& geom,
                                   const std::vector<double>& grid_deg, double loading) {
  geom.validate();
  const int M = geom.num_elements;
  if (covariance.rows() != M || covariance.cols() != M)
    throw ContractViolation("capon_spectrum: covariance must be M x M");
  if (loading < 0.0) throw ContractViolation("capon_spectrum: negative loading");
  CMatrix Rl = (covariance + covariance.adjoint()) / 2.0;
  double delta = loading * Rl.trace().real() / M;
  if (!(delta > 0.0)) delta = std::max(loading, 1e-12);  // all-zero covariance
  Rl.diagonal().array() += delta;
  Eigen::LDLT<CMatrix> ldlt(Rl);
  if (ldlt.info() != Eigen::Success) throw DomainError("capon_spectrum: singular covariance");
  std::vector<double> out;
  out.reserve(grid_deg.size());
  for (double th : grid_deg) {
    const CVector a = steering_vector(geom, th);
    const double q = a.dot(ldlt.solve(a)).real();
    if (!(q > 0.0)) throw DomainError("capon_spectrum: covariance is not positive definite");
    out.push_back(1.0 / q);
  }
  return out;
}

std::vector<double> find_peaks(const std::vector<double>& values,
                               const std::vector<double>& positions, int count) {
  if (values.size() != positions.size())
    throw ContractViolation("find_peaks: values and positions differ in length");
  const int n = static_cast<int>(values.size());
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    const bool left = i == 0 || values[i] > values[i - 1];
    const bool right = i == n - 1 || values[i] >= values[i + 1];
    if (left && right) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] > values[b]; });
  if (static_cast<int>(idx.size()) > count) idx.resize(std::max(count, 0));
  std::sort(idx.begin(), idx.end());
  std::vector<double> out;
  for (int i : idx) out.push_back(positions[i]);
  return out;
}

RVector empirical_sinr(const CMatrix& received, const CMatrix& C) {
  if (received.rows() != C.rows() || received.cols() != C.cols())
    throw ContractViolation("empirical_sinr: received block and symbols differ in shape");
  const Eigen::Index K = C.rows();
  const Eigen::Index N = C.cols();
  if (N == 0) throw ContractViolation("empirical_sinr: empty block");
  RVector out(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const cdouble g = C.row(k).dot(received.row(k)) / C.row(k).squaredNorm();
    const double rest = (received.row(k) - g * C.row(k)).squaredNorm() / static_cast<double>(N);
    out(k) = std::norm(g) / rest;
  }
  return out;
}

std::vector<RadarTarget> five_target_layout() {
  return {{{1.0, 0.0}, 10, 0.0},
          {{1.0, 0.0}, 20, -40.0},
          {{1.0, 0.0}, 20, 0.0},
          {{1.0, 0.0}, 20, 40.0},
          {{1.0, 0.0}, 30, 0.0}};
}

}  // namespace dfrc
