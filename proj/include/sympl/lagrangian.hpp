#pragma once

#include "symplectic.hpp"

namespace sympl {

/** @brief Lagrangian plane given by a 2n x n spanning frame. */
class LagrangianFrame {
 public:
  LagrangianFrame() = default;
  explicit LagrangianFrame(const Mat& basis, const Tolerances& tol = default_tol()) {
    if (basis.rows() != 2 * basis.cols() || basis.cols() == 0)
      fail(ErrorKind::dimension, "Lagrangian frame must be 2n x n, got ", basis.rows(), "x", basis.cols());
    n_ = static_cast<int>(basis.cols());
    if (numerical_rank(basis, 1e-10) != n_) fail(ErrorKind::validation, "frame does not have full column rank");
    Q_ = orthonormal_columns(basis);
    double iso = (Q_.transpose() * standard_j(n_) * Q_).cwiseAbs().maxCoeff();
    if (iso > tol.eps_symp) fail(ErrorKind::isotropy, "frame is not isotropic (defect ", iso, ")");
  }

  int n() const { return n_; }
  // orthonormal basis of the plane
  const Mat& basis() const { return Q_; }

  static LagrangianFrame x_plane(int n) {  // X = {p = 0}
    Mat F = Mat::Zero(2 * n, n);
    F.topRows(n) = Mat::Identity(n, n);
    return LagrangianFrame(F);
  }
  static LagrangianFrame p_plane(int n) {  // X* = {x = 0}
    Mat F = Mat::Zero(2 * n, n);
    F.bottomRows(n) = Mat::Identity(n, n);
    return LagrangianFrame(F);
  }
  // l_A = {(x, Ax)}
  static LagrangianFrame graph(const Mat& A) {
    const int n = static_cast<int>(A.rows());
    Mat F(2 * n, n);
    F.topRows(n) = Mat::Identity(n, n);
    F.bottomRows(n) = A;
    return LagrangianFrame(F);
  }
  LagrangianFrame transformed(const SymplecticMatrix& S) const { return LagrangianFrame(S.mat() * Q_); }

 private:
  Mat Q_;
  int n_ = 0;
};

inline LagrangianFrame random_lagrangian(int n, Rng& rng) {
  return LagrangianFrame::p_plane(n).transformed(random_symplectic(n, rng));
}

// dim(l cap l') as rank deficiency of [F F']
inline int intersection_dim(const LagrangianFrame& a, const LagrangianFrame& b) {
  Mat C(2 * a.n(), 2 * a.n());
  C << a.basis(), b.basis();
  return 2 * a.n() - numerical_rank(C, default_tol().eps_rank_rel);
}

// l' (+) l'' in Z' (+) Z'', coordinates (x', x'', p', p'')
inline LagrangianFrame direct_sum(const LagrangianFrame& a, const LagrangianFrame& b) {
  const int n1 = a.n(), n2 = b.n(), n = n1 + n2;
  Mat F = Mat::Zero(2 * n, n);
  F.block(0, 0, n1, n1) = a.basis().topRows(n1);
  F.block(n1, n1, n2, n2) = b.basis().topRows(n2);
  F.block(n, 0, n1, n1) = a.basis().bottomRows(n1);
  F.block(n + n1, n1, n2, n2) = b.basis().bottomRows(n2);
  return LagrangianFrame(F);
}

// plane l with dim(l cap l0) = k, l0 = S X, l = S l_A with rank A = n - k
inline std::pair<LagrangianFrame, LagrangianFrame> stratified_pair(int n, int k, Rng& rng) {
  if (k < 0 || k > n) fail(ErrorKind::validation, "intersection dimension ", k, " outside [0, ", n, "]");
  Mat R = random_matrix(n, n - k, rng);
  Mat D = Mat::Zero(n - k, n - k);
  for (int i = 0; i < n - k; ++i) D(i, i) = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.5, 2.0);
  Mat A = R * D * R.transpose();
  SymplecticMatrix S = random_symplectic(n, rng, 0.7);
  return {LagrangianFrame::x_plane(n).transformed(S), LagrangianFrame::graph(A).transformed(S)};
}

// ---------------------------------------------------------------------------
// unitary representative w = u u^T, l = u X*  (iota: [[A,-B],[B,A]] -> A + iB)

inline CMat frame_to_unitary(const LagrangianFrame& l) {
  const int n = l.n();
  const Mat& F = l.basis();  // orthonormal, so [X; P] gives u = P - iX unitary
  CMat u = F.bottomRows(n).cast<cd>() - I_unit * F.topRows(n).cast<cd>();
  return u * u.transpose();
}

// plane {z : zeta = w conj(zeta)}, zeta = p - ix, as the kernel of a real 2n x 2n matrix
inline LagrangianFrame unitary_to_frame(const CMat& w) {
  const int n = static_cast<int>(w.rows());
  Mat R = w.real(), M = w.imag();
  Mat K(2 * n, 2 * n);
  K << M, Mat::Identity(n, n) - R, Mat::Identity(n, n) + R, M;
  Eigen::JacobiSVD<Mat> svd(K, Eigen::ComputeFullV);
  return LagrangianFrame(svd.matrixV().rightCols(n));
}

inline void require_symmetric_unitary(const CMat& w, const Tolerances& tol = default_tol()) {
  const int n = static_cast<int>(w.rows());
  double s = (w - w.transpose()).cwiseAbs().maxCoeff();
  double u = (w * w.adjoint() - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (s > tol.eps_unit * 10 || u > tol.eps_unit * 10)
    fail(ErrorKind::validation, "w is not symmetric unitary (sym ", s, ", unit ", u, ")");
}

/** @brief Point (w, theta) of the Maslov bundle, det w = e^{i theta}. */
struct LagLift {
  CMat w;
  double theta = 0.0;

  static LagLift of(const LagrangianFrame& l) {
    CMat w = frame_to_unitary(l);
    return {w, std::arg(w.determinant())};
  }
  void validate(const Tolerances& tol = default_tol()) const {
    require_symmetric_unitary(w, tol);
    if (std::abs(w.determinant() - std::exp(I_unit * theta)) > 1e-8)
      fail(ErrorKind::validation, "det w differs from e^{i theta}");
  }
  int n() const { return static_cast<int>(w.rows()); }
  // beta^r action
  LagLift shifted(int r) const { return {w, theta + 2 * pi * r}; }
  LagLift direct_sum(const LagLift& o) const {
    const int a = n(), b = o.n();
    CMat W = CMat::Zero(a + b, a + b);
    W.topLeftCorner(a, a) = w;
    W.bottomRightCorner(b, b) = o.w;
    return {W, theta + o.theta};
  }
  LagrangianFrame plane() const { return unitary_to_frame(w); }
};

// ---------------------------------------------------------------------------
// Kashiwara-Wall signature

// sigma(u, v) = u^T Om v with Om = J^T
inline int kashiwara_signature(const LagrangianFrame& l, const LagrangianFrame& lp, const LagrangianFrame& lpp) {
  const int n = l.n();
  if (lp.n() != n || lpp.n() != n) fail(ErrorKind::dimension, "Kashiwara triple of mixed dimension");
  Mat Om = standard_j(n).transpose();
  const Mat &F = l.basis(), &G = lp.basis(), &H = lpp.basis();
  Mat Q = Mat::Zero(3 * n, 3 * n);
  Mat ab = 0.5 * F.transpose() * Om * G;
  Mat bc = 0.5 * G.transpose() * Om * H;
  Mat ca = 0.5 * H.transpose() * Om * F;
  Q.block(0, n, n, n) = ab;
  Q.block(n, 0, n, n) = ab.transpose();
  Q.block(n, 2 * n, n, n) = bc;
  Q.block(2 * n, n, n, n) = bc.transpose();
  Q.block(2 * n, 0, n, n) = ca;
  Q.block(0, 2 * n, n, n) = ca.transpose();
  // orthonormal frames keep Q of order one; an all-round-off Q (l = l' = l'') must count as zero
  return inertia(Q, default_tol().eps_rank_rel * std::max(1.0, Q.cwiseAbs().maxCoeff())).signature();
}

// projection route: l cap l'' = 0, signature of z' -> sigma(P z', z') on l', P the projection onto l along l''
inline int kashiwara_transversal(const LagrangianFrame& l, const LagrangianFrame& lp, const LagrangianFrame& lpp) {
  const int n = l.n();
  if (intersection_dim(l, lpp) != 0) fail(ErrorKind::precondition, "l and l'' are not transversal");
  Mat C(2 * n, 2 * n);
  C << l.basis(), lpp.basis();
  Mat coef = C.partialPivLu().solve(lp.basis());
  Mat Pz = l.basis() * coef.topRows(n);  // P z' for each column of l'
  Mat Om = standard_j(n).transpose();
  Mat Q = Pz.transpose() * Om * lp.basis();
  Q = 0.5 * (Q + Q.transpose());
  return inertia(Q, default_tol().eps_rank_rel * std::max(1.0, Q.cwiseAbs().maxCoeff())).signature();
}

// ---------------------------------------------------------------------------
// ALM index

struct AlmDetail {
  int value = 0;
  bool transversal = true;
  double raw = 0.0;  // pre-rounding value of the transversal formula
  int draws = 0;
};

namespace detail {
// (1/pi)[theta - theta' + i Tr Log(-w w'^{-1})]
inline double alm_transversal_raw(const LagLift& a, const LagLift& b, const Tolerances& tol) {
  CMat arg = -a.w * b.w.adjoint();
  cd tl = unitary_log_trace(arg, tol);
  cd v = (a.theta - b.theta + I_unit * tl) / pi;
  return v.real();
}

inline double min_singular(const CMat& A) {
  Eigen::JacobiSVD<CMat> svd(A);
  return svd.singularValues().tail(1)(0);
}
}  // namespace detail

inline AlmDetail alm_index_detail(const LagLift& a, const LagLift& b, Rng& rng, const Tolerances& tol = default_tol()) {
  const int n = a.n();
  if (b.n() != n) fail(ErrorKind::dimension, "ALM index of lifts with different n");
  AlmDetail d;
  // transversal iff w - w' invertible; use a margin so -w w'^{-1} stays off the cut
  if (detail::min_singular(a.w - b.w) > 1e-7) {
    try {
      d.raw = detail::alm_transversal_raw(a, b, tol);
      d.value = static_cast<int>(round_checked(d.raw, tol.eps_int, "transversal ALM index"));
      return d;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::branch_cut) throw;
    }
  }
  d.transversal = false;
  LagrangianFrame la = a.plane(), lb = b.plane();
  for (int k = 0; k < tol.aux_draws; ++k) {
    CMat v = random_unitary(n, rng);
    CMat w3 = v * v.transpose();
    if (detail::min_singular(a.w - w3) < tol.aux_margin || detail::min_singular(b.w - w3) < tol.aux_margin) continue;
    LagLift c{w3, std::arg(w3.determinant())};
    LagrangianFrame lc = unitary_to_frame(w3);
    double m1 = detail::alm_transversal_raw(a, c, tol);
    double m2 = detail::alm_transversal_raw(b, c, tol);
    int i1 = static_cast<int>(round_checked(m1, tol.eps_int, "auxiliary ALM index"));
    int i2 = static_cast<int>(round_checked(m2, tol.eps_int, "auxiliary ALM index"));
    d.draws = k + 1;
    d.value = i1 - i2 + kashiwara_signature(la, lb, lc);
    d.raw = d.value;
    return d;
  }
  fail(ErrorKind::search, "no transversal auxiliary plane after ", tol.aux_draws, " draws");
}

inline int alm_index(const LagLift& a, const LagLift& b, Rng& rng, const Tolerances& tol = default_tol()) {
  return alm_index_detail(a, b, rng, tol).value;
}

// convenience with a fixed internal stream
inline int alm_index(const LagLift& a, const LagLift& b) {
  Rng rng(0x5eed);
  return alm_index(a, b, rng);
}

// Leray index of inertia of a pairwise transversal triple
inline int leray_inertia(const LagrangianFrame& l, const LagrangianFrame& lp, const LagrangianFrame& lpp) {
  if (intersection_dim(l, lp) || intersection_dim(lp, lpp) || intersection_dim(l, lpp))
    fail(ErrorKind::precondition, "Leray inertia needs pairwise transversal planes");
  int t = kashiwara_signature(l, lp, lpp);
  if ((t + l.n()) % 2) fail(ErrorKind::integrality, "tau + n is odd for a transversal triple");
  return (t + l.n()) / 2;
}

}  // namespace sympl
