#include "cone_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dfrc/hermitian.hpp"

namespace dfrc::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soc_det(const Eigen::Ref<const RVector>& x) {
  return x[0] * x[0] - x.tail(x.size() - 1).squaredNorm();
}

// Smallest positive root of a t^2 + 2 b t + c (c > 0), infinity if none.
double smallest_positive_root(double a, double b, double c) {
  if (std::abs(a) < 1e-300) return b < 0.0 ? -c / (2.0 * b) : kInf;
  double disc = b * b - a * c;
  if (disc < 0.0) return kInf;
  double q = -(b + std::copysign(std::sqrt(disc), b));
  double best = kInf;
  if (q != 0.0) {
    double r1 = q / a, r2 = c / q;
    if (r1 > 0.0) best = std::min(best, r1);
    if (r2 > 0.0) best = std::min(best, r2);
  } else {
    double r = std::sqrt(std::max(-c / a, 0.0));
    if (r > 0.0) best = r;
  }
  return best;
}

// Wbar u for the normalised soc scaling point w.
RVector wbar_apply(const RVector& w, const Eigen::Ref<const RVector>& u) {
  const Eigen::Index n = u.size();
  RVector out(n);
  double w1u1 = w.tail(n - 1).dot(u.tail(n - 1));
  out[0] = w[0] * u[0] + w1u1;
  out.tail(n - 1) = u.tail(n - 1) + ((u[0] + w1u1 / (1.0 + w[0])) * w.tail(n - 1));
  return out;
}

RMatrix wbar_matrix(const RVector& w) {
  const Eigen::Index n = w.size();
  RMatrix W(n, n);
  W(0, 0) = w[0];
  W.block(0, 1, 1, n - 1) = w.tail(n - 1).transpose();
  W.block(1, 0, n - 1, 1) = w.tail(n - 1);
  W.block(1, 1, n - 1, n - 1) = RMatrix::Identity(n - 1, n - 1) +
                                w.tail(n - 1) * w.tail(n - 1).transpose() / (1.0 + w[0]);
  return W;
}

}  // namespace

int ConeDims::size() const {
  int n = l;
  for (int k : q) n += k;
  for (int k : s) n += k * k;
  return n;
}

int ConeDims::degree() const {
  int n = l + static_cast<int>(q.size());
  for (int k : s) n += k;
  return n;
}

RVector cone_identity(const ConeDims& dims) {
  RVector e = RVector::Zero(dims.size());
  int off = 0;
  e.head(dims.l).setOnes();
  off = dims.l;
  for (int k : dims.q) {
    e[off] = 1.0;
    off += k;
  }
  for (int k : dims.s) {
    e.segment(off, k).setOnes();
    off += k * k;
  }
  return e;
}

double cone_margin(const ConeDims& dims, const RVector& x) {
  double m = kInf;
  if (dims.l > 0) m = x.head(dims.l).minCoeff();
  int off = dims.l;
  for (int k : dims.q) {
    m = std::min(m, x[off] - x.segment(off + 1, k - 1).norm());
    off += k;
  }
  for (int k : dims.s) {
    m = std::min(m, hermitian_eigenvalues(smat(x.segment(off, k * k), k))[0]);
    off += k * k;
  }
  return m;
}

RVector jordan_product(const ConeDims& dims, const RVector& u, const RVector& v) {
  RVector w(u.size());
  w.head(dims.l) = u.head(dims.l).cwiseProduct(v.head(dims.l));
  int off = dims.l;
  for (int k : dims.q) {
    auto us = u.segment(off, k);
    auto vs = v.segment(off, k);
    w[off] = us.dot(vs);
    w.segment(off + 1, k - 1) = us[0] * vs.tail(k - 1) + vs[0] * us.tail(k - 1);
    off += k;
  }
  for (int k : dims.s) {
    CMatrix U = smat(u.segment(off, k * k), k);
    CMatrix V = smat(v.segment(off, k * k), k);
    w.segment(off, k * k) = svec_herm_part(U * V);
    off += k * k;
  }
  return w;
}

RVector project_cone(const ConeDims& dims, const RVector& x) {
  RVector p(x.size());
  p.head(dims.l) = x.head(dims.l).cwiseMax(0.0);
  int off = dims.l;
  for (int k : dims.q) {
    double t = x[off];
    RVector v = x.segment(off + 1, k - 1);
    double nv = v.norm();
    if (nv <= t) {
      p.segment(off, k) = x.segment(off, k);
    } else if (nv <= -t) {
      p.segment(off, k).setZero();
    } else {
      double a = 0.5 * (t + nv);
      p[off] = a;
      p.segment(off + 1, k - 1) = (a / nv) * v;
    }
    off += k;
  }
  for (int k : dims.s) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(smat(x.segment(off, k * k), k));
    RVector ev = es.eigenvalues().cwiseMax(0.0);
    CMatrix X = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    p.segment(off, k * k) = svec_herm_part(X);
    off += k * k;
  }
  return p;
}

NtScaling::NtScaling(const ConeDims& dims, const RVector& s, const RVector& z)
    : dims_(dims), lambda_(s.size()) {
  const int l = dims.l;
  if (l > 0) {
    if ((s.head(l).array() <= 0.0).any() || (z.head(l).array() <= 0.0).any())
      throw std::runtime_error("nt scaling: point outside nonnegative orthant");
    d_ = (s.head(l).array() / z.head(l).array()).sqrt();
    lambda_.head(l) = (s.head(l).array() * z.head(l).array()).sqrt();
  }
  int off = l;
  for (int k : dims.q) {
    auto ss = s.segment(off, k);
    auto zz = z.segment(off, k);
    double ds = soc_det(ss), dz = soc_det(zz);
    if (!(ds > 0.0 && dz > 0.0 && ss[0] > 0.0 && zz[0] > 0.0))
      throw std::runtime_error("nt scaling: point outside second-order cone");
    RVector sb = ss / std::sqrt(ds);
    RVector zb = zz / std::sqrt(dz);
    double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    RVector w(k);
    w[0] = sb[0] + zb[0];
    w.tail(k - 1) = sb.tail(k - 1) - zb.tail(k - 1);
    w /= 2.0 * gamma;
    double beta = std::pow(ds / dz, 0.25);
    beta_.push_back(beta);
    wbar_.push_back(w);
    lambda_.segment(off, k) = beta * wbar_apply(w, zz);
    off += k;
  }
  for (int k : dims.s) {
    CMatrix S = smat(s.segment(off, k * k), k);
    CMatrix Z = smat(z.segment(off, k * k), k);
    Eigen::LLT<CMatrix> ls(S), lz(Z);
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
      throw std::runtime_error("nt scaling: point outside Hermitian PSD cone");
    CMatrix Ls = ls.matrixL(), Lz = lz.matrixL();
    Eigen::JacobiSVD<CMatrix> svd(Lz.adjoint() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RVector sig = svd.singularValues();
    if (!(sig.minCoeff() > 0.0)) throw std::runtime_error("nt scaling: singular block");
    RVector isq = sig.cwiseSqrt().cwiseInverse();
    CMatrix rw = Ls * svd.matrixV() * isq.asDiagonal();
    CMatrix rwi = sig.cwiseSqrt().asDiagonal() * svd.matrixV().adjoint() *
                  Ls.triangularView<Eigen::Lower>().solve(CMatrix::Identity(k, k));
    rw_.push_back(rw);
    rw_inv_.push_back(rwi);
    lam_psd_.push_back(sig);
    RVector lv = RVector::Zero(k * k);
    lv.head(k) = sig;
    lambda_.segment(off, k * k) = lv;
    off += k * k;
  }
}

RVector NtScaling::apply(const RVector& u, bool transpose, bool inverse) const {
  RVector out(u.size());
  const int l = dims_.l;
  if (l > 0) {
    if (inverse) out.head(l) = u.head(l).cwiseQuotient(d_);
    else out.head(l) = u.head(l).cwiseProduct(d_);
  }
  int off = l;
  for (std::size_t i = 0; i < dims_.q.size(); ++i) {
    const int k = dims_.q[i];
    RVector v = u.segment(off, k);
    if (!inverse) {
      out.segment(off, k) = beta_[i] * wbar_apply(wbar_[i], v);
    } else {
      // Wbar^{-1} = J Wbar J
      v.tail(k - 1) *= -1.0;
      RVector t = wbar_apply(wbar_[i], v);
      t.tail(k - 1) *= -1.0;
      out.segment(off, k) = t / beta_[i];
    }
    off += k;
  }
  for (std::size_t i = 0; i < dims_.s.size(); ++i) {
    const int k = dims_.s[i];
    CMatrix U = smat(u.segment(off, k * k), k);
    const CMatrix& R = inverse ? rw_inv_[i] : rw_[i];
    // W(U) = R^H U R, W^T(U) = R U R^H; inverse swaps R for R^{-1}.
    CMatrix V = transpose ? CMatrix(R * U * R.adjoint()) : CMatrix(R.adjoint() * U * R);
    out.segment(off, k * k) = svec_herm_part(V);
    off += k * k;
  }
  return out;
}

RVector NtScaling::lambda_inv_circ(const RVector& d) const {
  RVector x(d.size());
  const int l = dims_.l;
  x.head(l) = d.head(l).cwiseQuotient(lambda_.head(l));
  int off = l;
  for (int k : dims_.q) {
    auto lam = lambda_.segment(off, k);
    auto dd = d.segment(off, k);
    double det = soc_det(lam);
    double x0 = (lam[0] * dd[0] - lam.tail(k - 1).dot(dd.tail(k - 1))) / det;
    x[off] = x0;
    x.segment(off + 1, k - 1) = (dd.tail(k - 1) - x0 * lam.tail(k - 1)) / lam[0];
    off += k;
  }
  for (std::size_t i = 0; i < dims_.s.size(); ++i) {
    const int k = dims_.s[i];
    const RVector& lam = lam_psd_[i];
    CMatrix D = smat(d.segment(off, k * k), k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) D(a, b) *= 2.0 / (lam[a] + lam[b]);
    x.segment(off, k * k) = svec_herm_part(D);
    off += k * k;
  }
  return x;
}

double NtScaling::max_step(const RVector& d) const {
  double step = kInf;
  const int l = dims_.l;
  for (int i = 0; i < l; ++i)
    if (d[i] < 0.0) step = std::min(step, -lambda_[i] / d[i]);
  int off = l;
  for (int k : dims_.q) {
    auto lam = lambda_.segment(off, k);
    auto dd = d.segment(off, k);
    double c = soc_det(lam);
    double b = lam[0] * dd[0] - lam.tail(k - 1).dot(dd.tail(k - 1));
    double a = soc_det(dd);
    step = std::min(step, smallest_positive_root(a, b, c));
    off += k;
  }
  for (std::size_t i = 0; i < dims_.s.size(); ++i) {
    const int k = dims_.s[i];
    RVector isq = lam_psd_[i].cwiseSqrt().cwiseInverse();
    CMatrix D = smat(d.segment(off, k * k), k);
    CMatrix X = isq.asDiagonal() * D * isq.asDiagonal();
    double mn = hermitian_eigenvalues((X + X.adjoint()) * 0.5)[0];
    if (mn < 0.0) step = std::min(step, -1.0 / mn);
    off += k * k;
  }
  return step;
}

RVector NtScaling::nonneg_inv_t() const {
  return d_.size() ? RVector(d_.cwiseInverse()) : RVector();
}

std::vector<RMatrix> NtScaling::dense_inv_t() const {
  std::vector<RMatrix> out;
  for (std::size_t i = 0; i < dims_.q.size(); ++i) {
    // W^{-T} = W^{-1} = J Wbar J / beta
    RMatrix W = wbar_matrix(wbar_[i]);
    const Eigen::Index k = W.rows();
    W.row(0).tail(k - 1) *= -1.0;
    W.col(0).tail(k - 1) *= -1.0;
    out.push_back(W / beta_[i]);
  }
  for (std::size_t i = 0; i < dims_.s.size(); ++i) {
    const int k = dims_.s[i];
    const CMatrix& R = rw_inv_[i];
    RMatrix D(k * k, k * k);
    RVector e = RVector::Zero(k * k);
    for (int j = 0; j < k * k; ++j) {
      e[j] = 1.0;
      D.col(j) = svec_herm_part(R * smat(e, k) * R.adjoint());
      e[j] = 0.0;
    }
    out.push_back(D);
  }
  return out;
}

}  // namespace dfrc::detail
