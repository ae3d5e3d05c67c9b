#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sympl {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cd I_unit{0.0, 1.0};

// ---------------------------------------------------------------------------
// errors

enum class ErrorKind {
  symmetry,
  singular,
  branch_cut,
  undersampled,
  dimension,
  not_free,
  degenerate,
  precondition,
  search,
  isotropy,
  resolution,
  domain,
  integrality,
  commensurability,
  validation,
  io,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::symmetry: return "symmetry";
    case ErrorKind::singular: return "singular";
    case ErrorKind::branch_cut: return "branch-cut";
    case ErrorKind::undersampled: return "undersampled";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::not_free: return "not-free";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::search: return "search";
    case ErrorKind::isotropy: return "isotropy";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::domain: return "domain";
    case ErrorKind::integrality: return "integrality";
    case ErrorKind::commensurability: return "commensurability";
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& msg)
      : std::runtime_error(std::string(to_string(k)) + " error: " + msg), kind_(k) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <typename... Args>
[[noreturn]] void fail(ErrorKind k, Args&&... args) {
  std::ostringstream oss;
  (oss << ... << args);
  throw Error(k, oss.str());
}

// ---------------------------------------------------------------------------
// tolerances, one record for everything

struct Tolerances {
  double eps_sym = 1e-10;       // symmetry, absolute
  double eps_rank_rel = 1e-8;   // eigenvalue threshold relative to ||M||
  double eps_symp = 1e-9;       // ||S^T J S - J||_inf
  double eps_det = 1e-10;       // |det(S - I)| floor
  double eps_cut = 1e-9;        // distance of an eigenvalue argument from +-pi
  double eps_int = 1e-6;        // integrality before rounding
  double eps_unit = 1e-9;       // unitarity / unit modulus
  double aux_margin = 1e-3;     // transversality margin of auxiliary planes
  int aux_draws = 64;
};

// process-wide record; set once from the config before any work starts
inline Tolerances& tolerance_store() {
  static Tolerances t{};
  return t;
}
inline const Tolerances& default_tol() { return tolerance_store(); }
inline void set_default_tol(const Tolerances& t) { tolerance_store() = t; }

// ---------------------------------------------------------------------------
// rng: mt19937_64 with hand-rolled uniforms so streams are identical everywhere

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2 * pi * u2);
    has_spare_ = true;
    return r * std::cos(2 * pi * u2);
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline Mat random_symmetric(int n, Rng& rng, double a = 1.0) {
  Mat H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) H(i, j) = H(j, i) = rng.uniform(-a, a);
  return H;
}

inline Mat random_matrix(int r, int c, Rng& rng, double a = 1.0) {
  Mat X(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) X(i, j) = rng.uniform(-a, a);
  return X;
}

// Haar-ish unitary from QR of a complex Gaussian matrix
inline CMat random_unitary(int n, Rng& rng) {
  CMat Z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Z(i, j) = cd(rng.normal(), rng.normal());
  Eigen::HouseholderQR<CMat> qr(Z);
  CMat Q = qr.householderQ() * CMat::Identity(n, n);
  CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    cd d = R(j, j);
    if (std::abs(d) > 0) Q.col(j) *= d / std::abs(d);
  }
  return Q;
}

// ---------------------------------------------------------------------------
// integers

inline long round_checked(double x, double tol, const char* what) {
  double r = std::round(x);
  if (!std::isfinite(x) || std::abs(x - r) > tol)
    fail(ErrorKind::integrality, what, " = ", x, " is not within ", tol, " of an integer");
  return static_cast<long>(r);
}

inline int mod4(long k) { return static_cast<int>(((k % 4) + 4) % 4); }

inline cd i_pow(long k) {
  switch (mod4(k)) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// ---------------------------------------------------------------------------
// symmetric matrices and inertia

inline double sym_defect(const Mat& M) {
  if (M.rows() != M.cols()) return std::numeric_limits<double>::infinity();
  return (M - M.transpose()).cwiseAbs().maxCoeff();
}

inline void require_symmetric(const Mat& M, double eps, const char* what = "matrix") {
  if (M.rows() != M.cols()) fail(ErrorKind::dimension, what, " is not square");
  if (M.size() && sym_defect(M) > eps)
    fail(ErrorKind::symmetry, what, " not symmetric (defect ", sym_defect(M), ")");
}

struct Inertia {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;
  int signature() const { return n_plus - n_minus; }
  int n() const { return n_plus + n_minus + n_zero; }
  bool operator==(const Inertia&) const = default;
};

// eps_rank < 0 means the default 1e-8 * ||M||
inline Inertia inertia(const Mat& M, double eps_rank = -1.0,
                       const Tolerances& tol = default_tol()) {
  require_symmetric(M, tol.eps_sym);
  Inertia r;
  if (M.rows() == 0) return r;
  Mat Ms = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(Ms, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  double thr = eps_rank >= 0 ? eps_rank : tol.eps_rank_rel * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  if (eps_rank < 0 && ev.cwiseAbs().maxCoeff() == 0.0) thr = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] > thr) ++r.n_plus;
    else if (ev[i] < -thr) ++r.n_minus;
    else ++r.n_zero;
  }
  return r;
}

inline int signature(const Mat& M, double eps_rank = -1.0) { return inertia(M, eps_rank).signature(); }

// ---------------------------------------------------------------------------
// Fresnel closed form:
//   (2pi)^{-m/2} int e^{-i<v,u>} e^{(i/2)<Mu,u>} du
//     = |det M|^{-1/2} e^{i pi/4 sign M} e^{-(i/2)<M^{-1}v,v>}

inline cd fresnel_gaussian_ft(const Mat& M, const Vec& v, const Tolerances& tol = default_tol()) {
  require_symmetric(M, tol.eps_sym, "Fresnel matrix");
  if (v.size() != M.rows()) fail(ErrorKind::dimension, "vector length ", v.size(), " vs matrix ", M.rows());
  Inertia in = inertia(M, -1.0, tol);
  if (in.n_zero != 0 || M.rows() == 0) {
    Eigen::JacobiSVD<Mat> svd(M);
    double cond = svd.singularValues().size()
                      ? svd.singularValues()(0) / std::max(svd.singularValues().tail(1)(0), 1e-300)
                      : 0.0;
    fail(ErrorKind::singular, "Fresnel matrix is singular (condition estimate ", cond, ")");
  }
  Eigen::PartialPivLU<Mat> lu(M);
  double det = lu.determinant();
  Vec Minv_v = lu.solve(v);
  double q = v.dot(Minv_v);
  return std::pow(std::abs(det), -0.5) * std::exp(I_unit * (pi / 4 * in.signature() - 0.5 * q));
}

// ---------------------------------------------------------------------------
// Tr Log of a unitary matrix, principal branch

inline cd unitary_log_trace(const CMat& w, const Tolerances& tol = default_tol()) {
  if (w.rows() != w.cols()) fail(ErrorKind::dimension, "unitary_log_trace needs a square matrix");
  const int n = static_cast<int>(w.rows());
  double udef = (w * w.adjoint() - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (udef > tol.eps_unit * 10) fail(ErrorKind::precondition, "matrix not unitary (defect ", udef, ")");
  Eigen::ComplexEigenSolver<CMat> es(w, false);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    double a = std::arg(es.eigenvalues()[k]);
    if (pi - std::abs(a) < tol.eps_cut)
      fail(ErrorKind::branch_cut, "eigenvalue ", es.eigenvalues()[k], " on the negative real axis");
    s += a;
  }
  return cd(0.0, s);
}

// ---------------------------------------------------------------------------
// continuous argument

struct PhaseTrack {
  std::vector<cd> samples;
  std::vector<double> theta;
  double winding() const { return theta.empty() ? 0.0 : (theta.back() - theta.front()) / (2 * pi); }
};

// theta0: if finite, the lift starts there (must match samples[0]); otherwise arg(samples[0])
inline PhaseTrack lift_phase(const std::vector<cd>& samples,
                             double theta0 = std::numeric_limits<double>::quiet_NaN(),
                             double max_jump = pi, const Tolerances& tol = default_tol()) {
  PhaseTrack pt;
  pt.samples = samples;
  if (samples.empty()) return pt;
  for (const cd& s : samples)
    if (std::abs(std::abs(s) - 1.0) > tol.eps_unit * 10)
      fail(ErrorKind::precondition, "phase sample of modulus ", std::abs(s));
  double t = std::arg(samples[0]);
  if (std::isfinite(theta0)) {
    if (std::abs(std::exp(I_unit * theta0) - samples[0]) > 1e-8)
      fail(ErrorKind::precondition, "initial lift inconsistent with first sample");
    t = theta0;
  }
  pt.theta.push_back(t);
  for (std::size_t k = 1; k < samples.size(); ++k) {
    double d = std::arg(samples[k] / samples[k - 1]);
    if (std::abs(d) >= max_jump)
      fail(ErrorKind::undersampled, "phase jump ", d, " at sample ", k);
    t += d;
    pt.theta.push_back(t);
  }
  return pt;
}

// ---------------------------------------------------------------------------
// small linear algebra helpers

inline int numerical_rank(const Mat& A, double rel = 1e-8) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(A);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

inline Mat orthonormal_columns(const Mat& A) {
  Eigen::HouseholderQR<Mat> qr(A);
  return qr.householderQ() * Mat::Identity(A.rows(), A.cols());
}

inline double rel_err(const Mat& a, const Mat& b) {
  double d = (a - b).norm();
  double s = std::max(a.norm(), b.norm());
  return s > 0 ? d / s : d;
}

}  // namespace sympl
