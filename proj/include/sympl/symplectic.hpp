#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "numkit.hpp"

namespace sympl {

/** @brief J = [[0, I], [-I, 0]] in (x, p) ordering. */
inline Mat standard_j(int n) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Mat::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return J;
}

// sigma(z, z') = <Jz, z'>
inline double sigma(const Vec& z, const Vec& zp) {
  const int n = static_cast<int>(z.size() / 2);
  return z.tail(n).dot(zp.head(n)) - z.head(n).dot(zp.tail(n));
}

inline bool is_symplectic(const Mat& S, double eps = default_tol().eps_symp) {
  if (S.rows() != S.cols() || S.rows() % 2)
    fail(ErrorKind::dimension, "is_symplectic needs a square even-dimensional matrix, got ", S.rows(), "x", S.cols());
  const int n = static_cast<int>(S.rows() / 2);
  Mat J = standard_j(n);
  return (S.transpose() * J * S - J).cwiseAbs().maxCoeff() <= eps;
}

/** @brief Validated element of Sp(2n, R). */
class SymplecticMatrix {
 public:
  SymplecticMatrix() : S_(Mat::Identity(2, 2)), n_(1) {}
  explicit SymplecticMatrix(const Mat& S, double eps = default_tol().eps_symp) : S_(S) {
    if (S.rows() != S.cols() || S.rows() % 2 || S.rows() == 0)
      fail(ErrorKind::dimension, "symplectic matrix must be 2n x 2n, got ", S.rows(), "x", S.cols());
    n_ = static_cast<int>(S.rows() / 2);
    // scale the check with ||S||^2, exponentials of large Hamiltonians are badly conditioned
    double scale = std::max(1.0, S.cwiseAbs().maxCoeff() * S.cwiseAbs().maxCoeff());
    if (!is_symplectic(S, eps * scale))
      fail(ErrorKind::validation, "matrix is not symplectic (defect ",
           (S.transpose() * standard_j(n_) * S - standard_j(n_)).cwiseAbs().maxCoeff(), ")");
  }
  static SymplecticMatrix identity(int n) { return SymplecticMatrix(Mat::Identity(2 * n, 2 * n)); }
  static SymplecticMatrix J(int n) { return SymplecticMatrix(standard_j(n)); }

  int n() const { return n_; }
  const Mat& mat() const { return S_; }
  Mat A() const { return S_.topLeftCorner(n_, n_); }
  Mat B() const { return S_.topRightCorner(n_, n_); }
  Mat C() const { return S_.bottomLeftCorner(n_, n_); }
  Mat D() const { return S_.bottomRightCorner(n_, n_); }

  // J^{-1} S^T J, exact inverse for symplectic S
  SymplecticMatrix inverse() const {
    Mat J = standard_j(n_);
    return SymplecticMatrix(-J * S_.transpose() * J);
  }
  SymplecticMatrix operator*(const SymplecticMatrix& o) const {
    if (o.n_ != n_) fail(ErrorKind::dimension, "product of symplectic matrices of different size");
    return SymplecticMatrix(S_ * o.S_);
  }
  double det_minus_identity() const { return (S_ - Mat::Identity(2 * n_, 2 * n_)).determinant(); }

 private:
  Mat S_;
  int n_;
};

inline Mat block_diag(const Mat& a, const Mat& b) {
  Mat r = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  r.topLeftCorner(a.rows(), a.cols()) = a;
  r.bottomRightCorner(b.rows(), b.cols()) = b;
  return r;
}

// symplectic direct sum in (x, p) ordering: (x1, x2, p1, p2)
inline Mat symplectic_sum(const Mat& S1, const Mat& S2) {
  const int a = static_cast<int>(S1.rows() / 2), b = static_cast<int>(S2.rows() / 2);
  const int n = a + b;
  Mat S = Mat::Zero(2 * n, 2 * n);
  auto put = [&](const Mat& M, int off, int m) {
    S.block(off, off, m, m) = M.topLeftCorner(m, m);
    S.block(off, n + off, m, m) = M.topRightCorner(m, m);
    S.block(n + off, off, m, m) = M.bottomLeftCorner(m, m);
    S.block(n + off, n + off, m, m) = M.bottomRightCorner(m, m);
  };
  put(S1, 0, a);
  put(S2, a, b);
  return S;
}

// exp(J H) for symmetric H
inline Mat hamiltonian_exp(const Mat& H) {
  const int n = static_cast<int>(H.rows() / 2);
  Mat K = standard_j(n) * H;
  return K.exp();
}

inline SymplecticMatrix random_symplectic(int n, Rng& rng, double scale = 1.0) {
  Mat H = random_symmetric(2 * n, rng, scale);
  return SymplecticMatrix(hamiltonian_exp(H));
}

// random S with |det(S - I)| >= floor
inline SymplecticMatrix random_symplectic_nondegenerate(int n, Rng& rng, double floor = 0.1, double scale = 1.0) {
  for (int tries = 0; tries < 1000; ++tries) {
    SymplecticMatrix S = random_symplectic(n, rng, scale);
    if (std::abs(S.det_minus_identity()) >= floor) return S;
  }
  fail(ErrorKind::search, "no symplectic matrix with |det(S-I)| >= ", floor, " after 1000 draws");
}

// ---------------------------------------------------------------------------
// free symplectic matrices and generating functions
//   W(x, x') = 1/2 <Px, x> - <Lx, x'> + 1/2 <Qx', x'>

struct GeneratingFunction {
  Mat P, L, Q;
  int n() const { return static_cast<int>(L.rows()); }
  void validate(const Tolerances& tol = default_tol()) const {
    if (P.rows() != L.rows() || Q.rows() != L.rows() || L.rows() != L.cols())
      fail(ErrorKind::dimension, "generating function blocks of inconsistent size");
    require_symmetric(P, tol.eps_sym, "P");
    require_symmetric(Q, tol.eps_sym, "Q");
    if (std::abs(L.determinant()) <= tol.eps_rank_rel * std::max(1.0, L.norm()))
      fail(ErrorKind::precondition, "L is singular (det ", L.determinant(), ")");
  }
  // W(x, x')
  double operator()(const Vec& x, const Vec& xp) const {
    return 0.5 * x.dot(P * x) - x.dot(L.transpose() * xp) + 0.5 * xp.dot(Q * xp);
  }
};

inline SymplecticMatrix free_from_generating(const GeneratingFunction& W, const Tolerances& tol = default_tol()) {
  W.validate(tol);
  const int n = W.n();
  Mat Li = W.L.inverse();
  Mat S(2 * n, 2 * n);
  S.topLeftCorner(n, n) = Li * W.Q;
  S.topRightCorner(n, n) = Li;
  S.bottomLeftCorner(n, n) = W.P * Li * W.Q - W.L.transpose();
  S.bottomRightCorner(n, n) = W.P * Li;
  return SymplecticMatrix(S);
}

inline bool is_free(const SymplecticMatrix& S, const Tolerances& tol = default_tol()) {
  return std::abs(S.B().determinant()) > tol.eps_rank_rel * std::max(1.0, std::pow(S.B().norm(), S.n()));
}

inline GeneratingFunction generating_from_free(const SymplecticMatrix& S, const Tolerances& tol = default_tol()) {
  if (!is_free(S, tol)) fail(ErrorKind::not_free, "upper-right block B is singular (det ", S.B().determinant(), ")");
  Mat Bi = S.B().inverse();
  GeneratingFunction W{S.D() * Bi, Bi, Bi * S.A()};
  double scale = std::max(1.0, W.P.norm() + W.Q.norm());
  if (sym_defect(W.P) > 1e-8 * scale || sym_defect(W.Q) > 1e-8 * scale)
    fail(ErrorKind::validation, "P or Q not symmetric; input is not symplectic");
  W.P = 0.5 * (W.P + W.P.transpose());
  W.Q = 0.5 * (W.Q + W.Q.transpose());
  return W;
}

// W_S = D B^{-1} + B^{-1} A - B^{-1} - B^{-T}
inline Mat hessian_WS(const SymplecticMatrix& S, const Tolerances& tol = default_tol()) {
  if (!is_free(S, tol)) fail(ErrorKind::not_free, "hessian_WS needs a free matrix");
  Mat Bi = S.B().inverse();
  Mat W = S.D() * Bi + Bi * S.A() - Bi - Bi.transpose();
  return 0.5 * (W + W.transpose());
}

// ---------------------------------------------------------------------------
// symplectic Cayley transform  M_S = 1/2 J (S + I)(S - I)^{-1}

inline void require_nondegenerate(const SymplecticMatrix& S, const Tolerances& tol, const char* what = "S") {
  double d = S.det_minus_identity();
  if (std::abs(d) <= tol.eps_det) fail(ErrorKind::degenerate, "det(", what, " - I) = ", d, " (fixed point)");
}

inline Mat cayley_transform(const SymplecticMatrix& S, const Tolerances& tol = default_tol()) {
  require_nondegenerate(S, tol);
  const int m = 2 * S.n();
  Mat I = Mat::Identity(m, m);
  Mat J = standard_j(S.n());
  Mat X = (S.mat() - I).transpose().partialPivLu().solve((S.mat() + I).transpose()).transpose();
  Mat M = 0.5 * J * X;
  Mat alt = 0.5 * J + J * (S.mat() - I).inverse();  // cayleybis form
  double sc = std::max(1.0, M.norm());
  if ((M - alt).norm() > 1e-8 * sc) fail(ErrorKind::validation, "Cayley forms disagree by ", (M - alt).norm());
  if (sym_defect(M) > 1e-8 * sc) fail(ErrorKind::validation, "Cayley transform not symmetric (", sym_defect(M), ")");
  return 0.5 * (M + M.transpose());
}

// S = (M - J/2)^{-1} (M + J/2)
inline SymplecticMatrix cayley_inverse(const Mat& M, const Tolerances& tol = default_tol()) {
  require_symmetric(M, std::max(tol.eps_sym, 1e-9 * M.norm()), "Cayley matrix");
  const int n = static_cast<int>(M.rows() / 2);
  Mat J = standard_j(n);
  Mat A = M - 0.5 * J;
  Eigen::PartialPivLU<Mat> lu(A);
  if (std::abs(lu.determinant()) <= tol.eps_rank_rel)
    fail(ErrorKind::domain, "M - J/2 is singular");
  return SymplecticMatrix(lu.solve(M + 0.5 * J));
}

struct CayleyProductCheck {
  Mat M;               // from the product formula
  double direct_err = 0;  // vs cayley_transform(S S')
  double inverse_sum_err = 0;
};

inline CayleyProductCheck cayley_of_product(const SymplecticMatrix& S, const SymplecticMatrix& Sp,
                                            const Tolerances& tol = default_tol()) {
  const int m = 2 * S.n();
  Mat I = Mat::Identity(m, m);
  Mat J = standard_j(S.n());
  auto need = [&](double d, const char* what) {
    if (std::abs(d) <= tol.eps_det) fail(ErrorKind::degenerate, "degenerate composition: det(", what, ") = ", d);
  };
  need(S.det_minus_identity(), "S - I");
  need(Sp.det_minus_identity(), "S' - I");
  SymplecticMatrix SSp = S * Sp;
  need(SSp.det_minus_identity(), "SS' - I");
  Mat MS = cayley_transform(S, tol), MSp = cayley_transform(Sp, tol);
  Mat sum = MS + MSp;
  need(sum.determinant(), "M_S + M_S'");
  Mat sumInv = sum.inverse();
  CayleyProductCheck r;
  r.M = MS + (S.mat().transpose() - I).inverse() * J * sumInv * J * (S.mat() - I).inverse();
  Mat direct = cayley_transform(SSp, tol);
  r.direct_err = rel_err(r.M, direct);
  Mat inv_sum = -(Sp.mat() - I) * (SSp.mat() - I).inverse() * (S.mat() - I) * J;
  r.inverse_sum_err = rel_err(sumInv, inv_sum);
  if (r.direct_err > 1e-9 || r.inverse_sum_err > 1e-9)
    fail(ErrorKind::validation, "Cayley product identities fail (direct ", r.direct_err, ", inverse sum ", r.inverse_sum_err, ")");
  r.M = 0.5 * (r.M + r.M.transpose());
  return r;
}

}  // namespace sympl
