#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dfrc {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Hermitian PSD transmit covariance. The alias documents intent; checks live in
// hermitian.hpp.
using HermitianCov = CMatrix;

// Input outside an operation's mathematical domain (bad angle, empty beam set, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A caller broke a documented precondition (non-Hermitian input, shape mismatch).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Transmit precoder W = [W_c, W_r]: W_c is M x K (one column per user),
// W_r is M x M (radar waveform weights).
struct Precoder {
  CMatrix comm;   // W_c
  CMatrix radar;  // W_r

  int antennas() const { return static_cast<int>(comm.rows()); }
  int users() const { return static_cast<int>(comm.cols()); }

  // Stacked view [W_c, W_r], M x (K + M).
  CMatrix stacked() const;
  // W W^H, the transmit covariance realised by this precoder.
  CMatrix covariance() const;

  // Splits an M x (K + M) matrix into communication and radar parts.
  static Precoder from_stacked(const CMatrix& w, int users);
};

// Downlink channel; row k is h_k^H.
struct Channel {
  CMatrix H;

  int users() const { return static_cast<int>(H.rows()); }
  int antennas() const { return static_cast<int>(H.cols()); }
  // h_k as a column vector (the conjugate of row k).
  CVector user(int k) const { return H.row(k).adjoint(); }

  // Throws ContractViolation unless 1 <= K < M.
  void validate() const;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace dfrc
