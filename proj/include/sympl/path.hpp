#pragma once

#include <functional>

#include "lagrangian.hpp"

namespace sympl {

/** @brief Sampled continuous path in Sp(2n) starting at the identity; stands for S_inf. */
struct SymplecticPathLift {
  int n = 1;
  std::vector<Mat> samples;
  int refinement = 0;

  const Mat& end() const { return samples.back(); }
  SymplecticMatrix end_matrix() const { return SymplecticMatrix(samples.back()); }
  std::size_t size() const { return samples.size(); }

  void validate(const Tolerances& tol = default_tol()) const {
    if (samples.empty()) fail(ErrorKind::validation, "empty path");
    if ((samples.front() - Mat::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() > 1e-9)
      fail(ErrorKind::validation, "path does not start at the identity");
    for (const Mat& S : samples) {
      if (S.rows() != 2 * n) fail(ErrorKind::dimension, "path sample of wrong size");
      double sc = std::max(1.0, S.cwiseAbs().maxCoeff() * S.cwiseAbs().maxCoeff());
      if (!is_symplectic(S, tol.eps_symp * sc)) fail(ErrorKind::validation, "path sample is not symplectic");
    }
  }

  static SymplecticPathLift constant(int n, int count = 2) {
    return {n, std::vector<Mat>(count, Mat::Identity(2 * n, 2 * n)), 0};
  }

  // t -> exp(t K), K Hamiltonian (K = J H)
  static SymplecticPathLift exponential(const Mat& K, int count = 0) {
    const int n = static_cast<int>(K.rows() / 2);
    if (count <= 0) count = std::max(16, static_cast<int>(std::ceil(8.0 * K.norm())) + 1);
    SymplecticPathLift p{n, {}, 0};
    for (int k = 0; k < count; ++k) p.samples.push_back((K * (double(k) / (count - 1))).exp());
    p.samples.front() = Mat::Identity(2 * n, 2 * n);
    return p;
  }

  // t -> exp(t J H)
  static SymplecticPathLift hamiltonian(const Mat& H, int count = 0) {
    return exponential(standard_j(static_cast<int>(H.rows() / 2)) * H, count);
  }

  // t -> exp(t pi J / 2), ends at J
  static SymplecticPathLift quarter_rotation(int n, int count = 17) {
    return exponential(standard_j(n) * (pi / 2), count);
  }

  // alpha: t -> exp(-2 pi t J_1) (+) I, traversed r times (r < 0 reverses)
  static SymplecticPathLift alpha_loop(int n, int r = 1, int per_turn = 33) {
    Mat K = Mat::Zero(2 * n, 2 * n);
    K(0, n) = -2 * pi;
    K(n, 0) = 2 * pi;
    K *= r;
    SymplecticPathLift p = exponential(K, std::max(2, per_turn * std::abs(r)) + 1);
    p.samples.back() = Mat::Identity(2 * n, 2 * n);
    return p;
  }

  // a then a.end * b_t
  static SymplecticPathLift concat(const SymplecticPathLift& a, const SymplecticPathLift& b) {
    if (a.n != b.n) fail(ErrorKind::dimension, "concatenating paths of different n");
    SymplecticPathLift p = a;
    Mat E = a.end();
    for (std::size_t k = 1; k < b.samples.size(); ++k) p.samples.push_back(E * b.samples[k]);
    p.refinement = std::max(a.refinement, b.refinement);
    return p;
  }

  static SymplecticPathLift prepend_alpha(const SymplecticPathLift& s, int r) {
    if (r == 0) return s;
    return concat(alpha_loop(s.n, r), s);
  }

  // t -> S_t^{-1}
  SymplecticPathLift inverse() const {
    SymplecticPathLift p{n, {}, refinement};
    Mat J = standard_j(n);
    for (const Mat& S : samples) p.samples.push_back(-J * S.transpose() * J);
    return p;
  }

  // geodesic path from I: S exp(t log(S^{-1} S')) between consecutive nodes
  static SymplecticPathLift through(const std::vector<Mat>& nodes, int per_segment = 16) {
    const int n = static_cast<int>(nodes.front().rows() / 2);
    SymplecticPathLift p{n, {Mat::Identity(2 * n, 2 * n)}, 0};
    Mat cur = Mat::Identity(2 * n, 2 * n);
    Mat J = standard_j(n);
    for (const Mat& nx : nodes) {
      Mat step = (-J * cur.transpose() * J) * nx;
      Mat K = step.log();
      for (int k = 1; k <= per_segment; ++k) p.samples.push_back(cur * (K * (double(k) / per_segment)).exp());
      p.samples.back() = nx;
      cur = nx;
    }
    return p;
  }
};

namespace detail {
inline Mat symplectic_inverse(const Mat& S) {
  Mat J = standard_j(static_cast<int>(S.rows() / 2));
  return -J * S.transpose() * J;
}

// midpoint of the geodesic segment S_a -> S_b
inline Mat segment_midpoint(const Mat& Sa, const Mat& Sb) {
  Mat step = symplectic_inverse(Sa) * Sb;
  double d = (step - Mat::Identity(step.rows(), step.cols())).norm();
  if (d > 1.5) fail(ErrorKind::undersampled, "path samples too far apart to refine (||S_a^{-1}S_b - I|| = ", d, ")");
  Mat K = step.log();
  return Sa * (0.5 * K).exp();
}

// sum of eigen-arguments of Ua^{-1} Ub, valid when every eigenphase is small
inline bool small_step(const CMat& Ua, const CMat& Ub, double& inc) {
  CMat R = Ua.adjoint() * Ub;
  Eigen::ComplexEigenSolver<CMat> es(R, false);
  inc = 0.0;
  for (int k = 0; k < R.rows(); ++k) {
    double a = std::arg(es.eigenvalues()[k]);
    if (std::abs(a) >= pi / 4) return false;
    inc += a;
  }
  return true;
}

inline void lift_segment(const Mat& Sa, const Mat& Sb, const CMat& ga, const CMat& gb,
                         const std::function<CMat(const Mat&)>& g, double& theta, int depth, int& max_depth) {
  double inc = 0.0;
  if (small_step(ga, gb, inc)) {
    theta += inc;
    return;
  }
  if (depth >= 24) fail(ErrorKind::undersampled, "refinement did not converge");
  max_depth = std::max(max_depth, depth + 1);
  Mat Sm = segment_midpoint(Sa, Sb);
  CMat gm = g(Sm);
  lift_segment(Sa, Sm, ga, gm, g, theta, depth + 1, max_depth);
  lift_segment(Sm, Sb, gm, gb, g, theta, depth + 1, max_depth);
}
}  // namespace detail

struct LiftedPhase {
  double theta_start = 0.0;
  double theta_end = 0.0;
  int refinement = 0;
};

// continuous argument of t -> det g(S_t) for a unitary-valued g, starting at theta0
inline LiftedPhase lift_along(const SymplecticPathLift& path, const std::function<CMat(const Mat&)>& g,
                              double theta0) {
  LiftedPhase r;
  r.theta_start = r.theta_end = theta0;
  CMat prev = g(path.samples.front());
  if (std::abs(std::exp(I_unit * theta0) - prev.determinant()) > 1e-7)
    fail(ErrorKind::precondition, "initial lift inconsistent");
  for (std::size_t k = 1; k < path.samples.size(); ++k) {
    CMat cur = g(path.samples[k]);
    detail::lift_segment(path.samples[k - 1], path.samples[k], prev, cur, g, r.theta_end, 0, r.refinement);
    prev = cur;
  }
  return r;
}

// S_inf acting on l_inf
inline LagLift act_on_lift(const SymplecticPathLift& path, const LagLift& l, int* refinement = nullptr) {
  if (path.n != l.n()) fail(ErrorKind::dimension, "path and plane of different n");
  const Mat F = l.plane().basis();
  auto g = [&](const Mat& S) { return frame_to_unitary(LagrangianFrame(S * F)); };
  // g(I) is det w up to round-off; start from the lift's own theta
  LiftedPhase ph = lift_along(path, g, l.theta);
  if (refinement) *refinement = ph.refinement;
  CMat w_end = frame_to_unitary(LagrangianFrame(path.end() * F));
  double th = ph.theta_end;
  // snap theta so that det w_end = e^{i theta} exactly modulo round-off
  th += std::arg(w_end.determinant() * std::exp(-I_unit * th));
  return {w_end, th};
}

// orthogonal polar factor and its image under iota
inline CMat iota_polar(const Mat& S) {
  const int n = static_cast<int>(S.rows() / 2);
  Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat U = svd.matrixU() * svd.matrixV().transpose();
  CMat u = U.topLeftCorner(n, n).cast<cd>() + I_unit * U.bottomLeftCorner(n, n).cast<cd>();
  return u;
}

// degree of t -> det iota(U_t) for a closed path
inline int loop_maslov_index(const SymplecticPathLift& gamma) {
  if ((gamma.samples.front() - gamma.end()).cwiseAbs().maxCoeff() > 1e-9)
    fail(ErrorKind::precondition, "loop_maslov_index needs a closed path");
  auto g = [](const Mat& S) { return iota_polar(S); };
  double t0 = std::arg(g(gamma.samples.front()).determinant());
  LiftedPhase ph = lift_along(gamma, g, t0);
  return static_cast<int>(round_checked((ph.theta_end - ph.theta_start) / (2 * pi), 1e-6, "loop degree"));
}

}  // namespace sympl
