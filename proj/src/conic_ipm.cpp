// Primal-dual interior-point method on the homogeneous self-dual embedding with
// Nesterov-Todd scaling and Mehrotra predictor-corrector steps.

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Householder>
#include <Eigen/QR>

#include "cone_ops.hpp"

namespace dfrc::detail {

namespace {

// Reduced KKT system in scaled form:
//   [0 A' Gt'; A 0 0; Gt 0 -I] (x, y, zt) = (rx, ry, rzt),  Gt = W^{-T} G, zt = W z.
// Eliminating zt leaves H x = r with H = Gt' Gt (+ A' A when needed), then a Schur
// complement on A.
//
// H is factored as R'R with R upper triangular in a column permutation. When some cone
// blocks are "x_S in K" (G = -I on their own columns S), their scaled rows are square
// and block diagonal: each gets its own QR, and the few remaining rows are folded in
// with one Householder reflection per column. Otherwise (or if that factor is
// singular) H is factored densely: Cholesky while well conditioned, then a QR of all
// stacked scaled rows.
struct Kkt {
  const LinearConeProgram& p;
  Eigen::Index n = 0;
  std::vector<int> blk_off, blk_len;
  std::vector<std::vector<int>> support;  // nonzero columns of each dense block of G
  std::vector<RMatrix> gblk;              // G restricted to those columns
  SpMat gl;                               // nonneg rows of G
  SpMat gtl;                              // scaled nonneg rows
  std::vector<RMatrix> gtblk;             // scaled dense blocks
  bool added_ata = false;
  const NtScaling* W = nullptr;
  Eigen::LLT<RMatrix> sfac;
  RMatrix hinv_at;  // H^{-1} A^T

  RMatrix rfac;           // H = rfac' rfac in permuted columns
  std::vector<int> perm;  // perm[j]: position of column j in rfac (empty: identity)

  // structured path
  std::vector<char> is_sep;              // per dense block
  std::vector<int> covered, uncovered;
  bool structured = false;
  bool use_structured = false;

  explicit Kkt(const LinearConeProgram& prog) : p(prog), n(prog.c.size()) {
    int off = p.dims.l;
    for (int k : p.dims.q) {
      blk_off.push_back(off);
      blk_len.push_back(k);
      off += k;
    }
    for (int k : p.dims.s) {
      blk_off.push_back(off);
      blk_len.push_back(k * k);
      off += k * k;
    }
    gl = p.G.topRows(p.dims.l);
    std::vector<char> taken(n, 0);
    for (std::size_t b = 0; b < blk_off.size(); ++b) {
      SpMat Gb = p.G.middleRows(blk_off[b], blk_len[b]);
      std::vector<char> used(n, 0);
      for (Eigen::Index r = 0; r < Gb.outerSize(); ++r)
        for (SpMat::InnerIterator it(Gb, r); it; ++it) used[it.col()] = 1;
      std::vector<int> cols;
      for (Eigen::Index j = 0; j < n; ++j)
        if (used[j]) cols.push_back(static_cast<int>(j));
      RMatrix D = RMatrix::Zero(blk_len[b], static_cast<Eigen::Index>(cols.size()));
      std::vector<int> pos(n, -1);
      for (std::size_t c = 0; c < cols.size(); ++c) pos[cols[c]] = static_cast<int>(c);
      for (Eigen::Index r = 0; r < Gb.outerSize(); ++r)
        for (SpMat::InnerIterator it(Gb, r); it; ++it) D(r, pos[it.col()]) = it.value();

      // x_S in K: each row a single -1 on a column no other such block uses
      std::vector<int> cm(blk_len[b], -1);
      bool sep = static_cast<int>(cols.size()) == blk_len[b];
      for (Eigen::Index r = 0; sep && r < Gb.outerSize(); ++r) {
        int cnt = 0;
        for (SpMat::InnerIterator it(Gb, r); it; ++it) {
          if (it.value() == 0.0) continue;
          ++cnt;
          if (it.value() != -1.0 || taken[it.col()]) sep = false;
          cm[r] = static_cast<int>(it.col());
        }
        if (cnt != 1) sep = false;
      }
      if (sep)
        for (int c : cm) taken[c] = 1;
      is_sep.push_back(sep);
      support.push_back(std::move(cols));
      gblk.push_back(std::move(D));
    }
    for (Eigen::Index j = 0; j < n; ++j)
      (taken[j] ? covered : uncovered).push_back(static_cast<int>(j));
    Eigen::Index nv = p.dims.l;
    for (std::size_t b = 0; b < blk_off.size(); ++b)
      if (!is_sep[b]) nv += blk_len[b];
    structured = !covered.empty() && uncovered.size() <= 64 && nv <= std::max<Eigen::Index>(n / 2, 64);
    use_structured = structured;
  }

  RVector gt_mul(const RVector& x) const {
    RVector out(p.h.size());
    out.head(p.dims.l) = gtl * x;
    for (std::size_t b = 0; b < gtblk.size(); ++b) {
      RVector xs(support[b].size());
      for (std::size_t c = 0; c < support[b].size(); ++c) xs[c] = x[support[b][c]];
      out.segment(blk_off[b], blk_len[b]) = gtblk[b] * xs;
    }
    return out;
  }

  RVector gtt_mul(const RVector& v) const {
    RVector out = gtl.transpose() * v.head(p.dims.l);
    for (std::size_t b = 0; b < gtblk.size(); ++b) {
      RVector t = gtblk[b].transpose() * v.segment(blk_off[b], blk_len[b]);
      for (std::size_t c = 0; c < support[b].size(); ++c) out[support[b][c]] += t[c];
    }
    return out;
  }

  RMatrix hsolve(const RMatrix& v) const {
    RMatrix t(v.rows(), v.cols());
    if (perm.empty()) t = v;
    else
      for (Eigen::Index j = 0; j < n; ++j) t.row(perm[j]) = v.row(j);
    rfac.transpose().triangularView<Eigen::Lower>().solveInPlace(t);
    rfac.triangularView<Eigen::Upper>().solveInPlace(t);
    if (perm.empty()) return t;
    RMatrix out(v.rows(), v.cols());
    for (Eigen::Index j = 0; j < n; ++j) out.row(j) = t.row(perm[j]);
    return out;
  }
  RVector hsolve(const RVector& v) const { return hsolve(RMatrix(v)).col(0); }

  bool factor(const NtScaling* scaling) {
    W = scaling;
    if (W) {
      gtl = W->nonneg_inv_t().asDiagonal() * gl;
      std::vector<RMatrix> winv = W->dense_inv_t();
      gtblk.resize(gblk.size());
      for (std::size_t b = 0; b < gblk.size(); ++b) gtblk[b].noalias() = winv[b] * gblk[b];
    } else {
      gtl = gl;
      gtblk = gblk;
    }
    added_ata = false;
    use_structured = structured;
    if (use_structured && factor_structured() && schur()) return true;
    use_structured = false;
    perm.clear();
    added_ata = false;
    if (cholesky_h() && schur()) return true;
    return factor_qr() && schur();
  }

  bool factor_structured() {
    // column order: sep blocks in turn, then the uncovered columns
    perm.assign(n, -1);
    std::vector<int> start(blk_off.size(), 0);
    int next = 0;
    for (std::size_t b = 0; b < blk_off.size(); ++b) {
      if (!is_sep[b]) continue;
      start[b] = next;
      for (int c : support[b]) perm[c] = next++;
    }
    for (int c : uncovered) perm[c] = next++;

    Eigen::Index nv = p.dims.l;
    for (std::size_t b = 0; b < blk_off.size(); ++b)
      if (!is_sep[b]) nv += blk_len[b];
    auto build = [&](bool with_a) {
      const Eigen::Index meq = with_a ? p.A.rows() : 0;
      RMatrix V = RMatrix::Zero(nv + meq, n);
      if (p.dims.l > 0) {
        RMatrix g = gtl;
        for (Eigen::Index j = 0; j < n; ++j) V.col(perm[j]).head(p.dims.l) = g.col(j);
      }
      Eigen::Index r = p.dims.l;
      for (std::size_t b = 0; b < blk_off.size(); ++b) {
        if (is_sep[b]) continue;
        for (std::size_t c = 0; c < support[b].size(); ++c)
          V.block(r, perm[support[b][c]], blk_len[b], 1) = gtblk[b].col(c);
        r += blk_len[b];
      }
      if (meq > 0) {
        RMatrix a = p.A;
        for (Eigen::Index j = 0; j < n; ++j) V.col(perm[j]).tail(meq) = a.col(j);
      }
      return V;
    };
    auto run = [&](RMatrix V) {
      rfac = RMatrix::Zero(n, n);
      for (std::size_t b = 0; b < blk_off.size(); ++b) {
        if (!is_sep[b]) continue;
        Eigen::HouseholderQR<RMatrix> qr(gtblk[b]);
        rfac.block(start[b], start[b], blk_len[b], blk_len[b]) =
            qr.matrixQR().triangularView<Eigen::Upper>();
      }
      // fold the rows of V in, one reflection per column (on V' for contiguous updates)
      RMatrix Vt = V.transpose();
      const Eigen::Index nr = Vt.cols();
      RVector ess(nr), x(nr + 1);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (Vt.row(j).squaredNorm() == 0.0) continue;
        x[0] = rfac(j, j);
        x.tail(nr) = Vt.row(j).transpose();
        double tau, beta;
        x.makeHouseholder(ess, tau, beta);
        rfac(j, j) = beta;
        Vt.row(j).setZero();
        const Eigen::Index rest = n - j - 1;
        if (rest == 0 || tau == 0.0) continue;
        RVector w = rfac.row(j).tail(rest).transpose();
        w.noalias() += Vt.bottomRows(rest) * ess;
        rfac.row(j).tail(rest) -= tau * w.transpose();
        Vt.bottomRows(rest).noalias() -= (tau * w) * ess.transpose();
      }
      RVector d = rfac.diagonal().cwiseAbs();
      return d.allFinite() && d.minCoeff() > 1e-14 * std::max(d.maxCoeff(), 1e-300);
    };
    if (run(build(false))) return true;
    if (p.A.rows() == 0) return false;
    added_ata = true;
    return run(build(true));
  }

  // H assembled block by block on each block's column support; accepted only when the
  // Cholesky diagonal indicates a modest condition number.
  bool cholesky_h() {
    RMatrix H = RMatrix::Zero(n, n);
    if (p.dims.l > 0) H += RMatrix(gtl.transpose() * gtl);
    for (std::size_t b = 0; b < gtblk.size(); ++b) {
      RMatrix hb = gtblk[b].transpose() * gtblk[b];
      const auto& cols = support[b];
      for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < cols.size(); ++i) H(cols[i], cols[j]) += hb(i, j);
    }
    Eigen::LLT<RMatrix> llt(H);
    if (llt.info() != Eigen::Success) return false;
    RVector d = llt.matrixLLT().diagonal();
    if (!d.allFinite() || !(d.minCoeff() > 1e-5 * d.maxCoeff())) return false;
    rfac = llt.matrixU();
    return true;
  }

  // H = Gt' Gt (+ A' A) through a QR of the stacked rows, never formed explicitly
  bool factor_qr() {
    const Eigen::Index rows = p.h.size();
    const Eigen::Index meq = p.A.rows();
    RMatrix S = RMatrix::Zero(std::max(rows + meq, n), n);
    if (p.dims.l > 0) S.topRows(p.dims.l) = RMatrix(gtl);
    for (std::size_t b = 0; b < gtblk.size(); ++b) {
      const auto& cols = support[b];
      for (std::size_t c = 0; c < cols.size(); ++c)
        S.block(blk_off[b], cols[c], blk_len[b], 1) = gtblk[b].col(c);
    }
    auto factor_rows = [&](Eigen::Index r) {
      // zero rows beyond the data keep the factor square
      Eigen::HouseholderQR<RMatrix> qr(S.topRows(std::max(r, n)));
      rfac = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
      RVector d = rfac.diagonal().cwiseAbs();
      return d.allFinite() && d.minCoeff() > 1e-14 * std::max(d.maxCoeff(), 1e-300);
    };
    bool ok = factor_rows(rows);
    if (!ok && meq > 0) {
      S.bottomRows(meq) = RMatrix(p.A);
      added_ata = true;
      ok = factor_rows(rows + meq);
    }
    if (!ok) {
      // static regularization; refinement in solve() recovers the unperturbed step
      const Eigen::Index r = added_ata ? rows + meq : rows;
      RMatrix T = RMatrix::Zero(r + n, n);
      T.topRows(r) = S.topRows(r);
      T.bottomRows(n) = RMatrix::Identity(n, n) * (1e-7 * std::max(S.norm(), 1.0));
      S = std::move(T);
      if (!factor_rows(r + n)) return false;
    }
    return true;
  }

  bool schur() {
    if (p.A.rows() > 0) {
      hinv_at = hsolve(RMatrix(p.A.transpose()));
      RMatrix sc = p.A * hinv_at;
      sfac.compute((sc + sc.transpose()) * 0.5);
      if (sfac.info() != Eigen::Success) return false;
      if (!hinv_at.allFinite()) return false;
    }
    return true;
  }

  void solve_once(const RVector& rx, const RVector& ry, const RVector& rz, RVector& x, RVector& y,
                  RVector& z) const {
    RVector r = rx + gtt_mul(rz);
    if (added_ata) r += p.A.transpose() * ry;
    RVector hr = hsolve(r);
    if (p.A.rows() > 0) {
      y = sfac.solve(p.A * hr - ry);
      x = hr - hinv_at * y;
    } else {
      y = RVector();
      x = hr;
    }
    z = gt_mul(x) - rz;
  }

  // Iterative refinement on the full reduced system (needed when H was regularized or
  // is badly conditioned near the solution). Falls back to the dense factorization if
  // the structured one cannot reach a small residual.
  void solve(const RVector& rx, const RVector& ry, const RVector& rz, RVector& x, RVector& y,
             RVector& z) {
    const double err = refine(rx, ry, rz, x, y, z);
    const double scale = 1.0 + std::sqrt(rx.squaredNorm() + ry.squaredNorm() + rz.squaredNorm());
    if (use_structured && !(err <= 1e-9 * scale)) {
      use_structured = false;
      added_ata = false;
      perm.clear();
      if ((cholesky_h() && schur()) || (factor_qr() && schur())) refine(rx, ry, rz, x, y, z);
    }
  }

  double refine(const RVector& rx, const RVector& ry, const RVector& rz, RVector& x, RVector& y,
                RVector& z) const {
    solve_once(rx, ry, rz, x, y, z);
    const bool eq = p.A.rows() > 0;
    auto residual = [&](RVector& ex, RVector& ey, RVector& ez) {
      // dual row against the unscaled G so that G' W^{-1} zt is what gets corrected
      ex = rx - (W ? RVector(p.G.transpose() * W->apply(z, false, true)) : gtt_mul(z));
      if (eq) ex -= p.A.transpose() * y;
      ey = eq ? RVector(ry - p.A * x) : RVector();
      ez = rz - (gt_mul(x) - z);
      return std::sqrt(ex.squaredNorm() + ey.squaredNorm() + ez.squaredNorm());
    };
    const double scale = 1.0 + std::sqrt(rx.squaredNorm() + ry.squaredNorm() + rz.squaredNorm());
    RVector ex, ey, ez, dx, dy, dz;
    double err = residual(ex, ey, ez);
    for (int k = 0; k < 8 && err > 1e-14 * scale; ++k) {
      solve_once(ex, ey, ez, dx, dy, dz);
      RVector x2 = x + dx, y2 = eq ? RVector(y + dy) : y, z2 = z + dz;
      std::swap(x, x2);
      std::swap(y, y2);
      std::swap(z, z2);
      double e2 = residual(ex, ey, ez);
      if (e2 > 0.5 * err) {
        if (e2 > err) {
          std::swap(x, x2);
          std::swap(y, y2);
          std::swap(z, z2);
          e2 = err;
        }
        err = e2;
        break;
      }
      err = e2;
    }
    return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  }
};

double safe_dot(const RVector& a, const RVector& b) { return a.size() ? a.dot(b) : 0.0; }

}  // namespace

LcpResult solve_ipm(const LinearConeProgram& p, const SolverConfig& cfg) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Eigen::Index n = p.c.size(), m = p.b.size();
  const ConeDims& dims = p.dims;
  const RVector e = cone_identity(dims);
  const double nu = dims.degree();
  const double resx0 = std::max(1.0, p.c.norm());
  const double resy0 = std::max(1.0, m ? p.b.norm() : 0.0);
  const double resz0 = std::max(1.0, p.h.norm());

  LcpResult res;
  Kkt kkt(p);
  if (!kkt.factor(nullptr)) return res;

  RVector x, y, z, s, dummy;
  {
    RVector zx;
    kkt.solve(RVector::Zero(n), p.b, p.h, x, dummy, zx);
    s = -zx;
    RVector dx;
    kkt.solve(-p.c, RVector::Zero(m), RVector::Zero(p.h.size()), dx, y, z);
    if (m == 0) y = RVector();
  }
  {
    double ap = -cone_margin(dims, s);
    if (ap >= -1e-8 * std::max(s.norm(), 1.0)) s += (1.0 + ap) * e;
    double ad = -cone_margin(dims, z);
    if (ad >= -1e-8 * std::max(z.norm(), 1.0)) z += (1.0 + ad) * e;
  }
  double tau = 1.0, kappa = 1.0;

  for (int it = 0; it <= cfg.max_iter_ipm; ++it) {
    res.iterations = it;
    RVector rx = p.G.transpose() * z + p.c * tau;
    if (m) rx += p.A.transpose() * y;
    RVector ry = m ? RVector(p.A * x - p.b * tau) : RVector();
    RVector rz = s + p.G * x - p.h * tau;
    const double cx = p.c.dot(x), by = safe_dot(p.b, y), hz = p.h.dot(z);
    const double rt = kappa + cx + by + hz;
    const double gap = s.dot(z);
    const double mu = (gap + tau * kappa) / (nu + 1.0);

    const double pres = std::max(m ? ry.norm() / resy0 : 0.0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    const double pcost = cx / tau, dcost = -(by + hz) / tau;
    double relgap = kInf;
    if (pcost < 0.0) relgap = gap / (tau * tau) / -pcost;
    else if (dcost > 0.0) relgap = gap / (tau * tau) / dcost;
    double pinfres = kInf, dinfres = kInf;
    if (by + hz < 0.0) {
      RVector g = p.G.transpose() * z;
      if (m) g += p.A.transpose() * y;
      pinfres = g.norm() / resx0 / -(by + hz);
    }
    if (cx < 0.0) {
      double a = m ? (p.A * x).norm() / resy0 : 0.0;
      double b = (s + p.G * x).norm() / resz0;
      dinfres = std::max(a, b) / -cx;
    }
    if (cfg.verbose)
      std::fprintf(stderr, "%3d pcost % .8e dcost % .8e gap %.2e pres %.2e dres %.2e k/t %.2e\n",
                   it, pcost, dcost, gap / (tau * tau), pres, dres, kappa / tau);

    res.pres = pres;
    res.dres = dres;
    res.gap = gap / (tau * tau);
    if (pres <= cfg.feas_tol && dres <= cfg.feas_tol &&
        (gap / (tau * tau) <= cfg.abs_tol || relgap <= cfg.rel_tol)) {
      res.status = SolveStatus::Optimal;
      res.x = x / tau;
      res.y = m ? RVector(y / tau) : RVector();
      res.z = z / tau;
      res.s = s / tau;
      return res;
    }
    if (pinfres <= cfg.infeas_tol) {
      double scale = -(by + hz);
      res.status = SolveStatus::Infeasible;
      res.cert = pinfres;
      res.y = m ? RVector(y / scale) : RVector();
      res.z = z / scale;
      res.x = x / tau;
      return res;
    }
    if (dinfres <= cfg.infeas_tol) {
      res.status = SolveStatus::Unbounded;
      res.cert = dinfres;
      res.x = x / -cx;
      res.s = s / -cx;
      return res;
    }
    if (it == cfg.max_iter_ipm) break;

    std::unique_ptr<NtScaling> W;
    try {
      W = std::make_unique<NtScaling>(dims, s, z);
    } catch (const std::exception&) {
      res.status = SolveStatus::NumericalFailure;
      res.x = x / tau;
      return res;
    }
    if (!kkt.factor(W.get())) {
      res.status = SolveStatus::NumericalFailure;
      res.x = x / tau;
      return res;
    }
    const RVector& lam = W->lambda();
    const RVector ht = W->apply(p.h, true, true);
    RVector x1, y1, z1;
    kkt.solve(-p.c, p.b, ht, x1, y1, z1);
    const double den = p.c.dot(x1) + safe_dot(p.b, y1) + ht.dot(z1) - kappa / tau;
    const RVector rzt = W->apply(rz, true, true);

    RVector lamsq = jordan_product(dims, lam, lam);
    RVector dsa, dza;
    double dtaua = 0.0, dkapa = 0.0, sigma = 0.0;
    RVector dx, dy, dst, dzt;
    double dtau = 0.0, dkap = 0.0, step = 0.0;

    for (int pass = 0; pass < 2; ++pass) {
      double eta;
      RVector ds;
      double dk;
      if (pass == 0) {
        eta = 1.0;
        ds = -lamsq;
        dk = -tau * kappa;
      } else {
        eta = 1.0 - sigma;
        ds = -lamsq - jordan_product(dims, dsa, dza) + sigma * mu * e;
        dk = -tau * kappa - dtaua * dkapa + sigma * mu;
      }
      RVector lids = W->lambda_inv_circ(ds);
      RVector x0, y0, z0;
      kkt.solve(-eta * rx, -eta * ry, -eta * rzt - lids, x0, y0, z0);
      dtau = (-eta * rt - dk / tau - p.c.dot(x0) - safe_dot(p.b, y0) - ht.dot(z0)) / den;
      dx = x0 + dtau * x1;
      dy = m ? RVector(y0 + dtau * y1) : RVector();
      dzt = z0 + dtau * z1;
      dst = lids - dzt;
      dkap = (dk - kappa * dtau) / tau;

      double amax = std::min(W->max_step(dst), W->max_step(dzt));
      if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
      if (dkap < 0.0) amax = std::min(amax, -kappa / dkap);
      if (pass == 0) {
        double aa = std::min(1.0, amax);
        sigma = std::pow(1.0 - aa, 3);
        dsa = dst;
        dza = dzt;
        dtaua = dtau;
        dkapa = dkap;
      } else {
        step = std::min(1.0, 0.99 * amax);
      }
    }
    if (!(step > 0.0) || !std::isfinite(step) || !dx.allFinite()) {
      res.status = SolveStatus::NumericalFailure;
      res.x = x / tau;
      return res;
    }
    x += step * dx;
    if (m) y += step * dy;
    z += step * W->apply(dzt, false, true);
    s += step * W->apply(dst, true, false);
    tau += step * dtau;
    kappa += step * dkap;
  }
  res.status = SolveStatus::MaxIterations;
  res.x = x / tau;
  return res;
}

}  // namespace dfrc::detail
