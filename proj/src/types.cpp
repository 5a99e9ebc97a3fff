#include "dfrc/types.hpp"

namespace dfrc {

CMatrix Precoder::stacked() const {
  CMatrix w(comm.rows(), comm.cols() + radar.cols());
  w << comm, radar;
  return w;
}

CMatrix Precoder::covariance() const {
  CMatrix r = comm * comm.adjoint() + radar * radar.adjoint();
  return (r + r.adjoint()) * 0.5;
}

Precoder Precoder::from_stacked(const CMatrix& w, int users) {
  if (users < 0 || users > w.cols())
    throw ContractViolation("precoder split: user count out of range");
  Precoder p;
  p.comm = w.leftCols(users);
  p.radar = w.rightCols(w.cols() - users);
  return p;
}

void Channel::validate() const {
  if (H.rows() < 1) throw ContractViolation("channel: need at least one user");
  if (H.rows() >= H.cols())
    throw ContractViolation("channel: number of users must be below number of antennas");
  if (!H.allFinite()) throw ContractViolation("channel: non-finite entries");
}

}  // namespace dfrc
