#pragma once

#include "maslov.hpp"
#include "word.hpp"

namespace sympl {

/** @brief Z (+) Z with sigma (+) (-sigma), carried to standard 4n coordinates by Phi.
 *
 * Phi is anti-symplectic: it takes sigma (+) (-sigma) to minus the standard form. With the
 * form taken literally, I (+) alpha is the negative generator of pi_1 and nu would pick up -2
 * per alpha turn; the sign flip makes nu(alpha S) = nu(S) + 2.
 */
struct DoubledSpace {
  int n = 1;

  // (x1, p1, x2, p2) -> (X, P) = ((x1, x2), (-p1, p2))
  Mat phi() const {
    Mat F = Mat::Zero(4 * n, 4 * n);
    for (int k = 0; k < n; ++k) {
      F(k, k) = 1;                   // x1
      F(n + k, 2 * n + k) = 1;       // x2
      F(2 * n + k, n + k) = -1;      // -p1
      F(3 * n + k, 3 * n + k) = 1;   // p2
    }
    return F;
  }
  // sigma (+) (-sigma) as a block matrix in (z1, z2) ordering
  Mat sigma_minus() const { return block_diag(standard_j(n), -standard_j(n)); }

  // I (+) S in standard coordinates
  Mat embed(const Mat& S) const {
    Mat D = block_diag(Mat::Identity(2 * n, 2 * n), S);
    Mat F = phi();
    return F * D * F.transpose();  // Phi is a signed permutation
  }
  LagrangianFrame diagonal() const {
    Mat G(4 * n, 2 * n);
    G << Mat::Identity(2 * n, 2 * n), Mat::Identity(2 * n, 2 * n);
    return LagrangianFrame(phi() * G);
  }
  LagrangianFrame p_planes() const { return LagrangianFrame::p_plane(2 * n); }

  SymplecticPathLift lift(const SymplecticPathLift& s) const {
    SymplecticPathLift d{2 * n, {}, s.refinement};
    for (const Mat& S : s.samples) d.samples.push_back(embed(S));
    return d;
  }
};

enum class NuRoute { free_formula, doubled };

struct NuValue {
  int value = 0;
  NuRoute route = NuRoute::doubled;
};

// nu = 1/2 mu((I (+) S) Delta, Delta)
inline NuValue nu_via_doubled(const SymplecticPathLift& s, Rng& rng) {
  DoubledSpace ds{s.n};
  int mu = maslov_mu_ell(ds.lift(s), ds.diagonal(), rng);
  if (mu % 2) fail(ErrorKind::integrality, "doubled-space index ", mu, " is odd");
  return {mu / 2, NuRoute::doubled};
}

inline NuValue nu_via_doubled(const SymplecticPathLift& s) {
  Rng rng(0x5eed);
  return nu_via_doubled(s, rng);
}

// nu = 1/2 (mu_{X*} + sign W_S)
inline NuValue nu_via_free(const SymplecticPathLift& s, Rng& rng) {
  SymplecticMatrix S = s.end_matrix();
  if (!is_free(S)) fail(ErrorKind::not_free, "endpoint is not free");
  require_nondegenerate(S, default_tol(), "S");
  int mu = maslov_mu_ell(s, LagrangianFrame::p_plane(s.n), rng);
  int sw = inertia(hessian_WS(S)).signature();
  if ((mu + sw) % 2) fail(ErrorKind::integrality, "mu_X* + sign W_S = ", mu + sw, " is odd");
  return {(mu + sw) / 2, NuRoute::free_formula};
}

inline NuValue nu_via_free(const SymplecticPathLift& s) {
  Rng rng(0x5eed);
  return nu_via_free(s, rng);
}

inline int nu_both(const SymplecticPathLift& s, Rng& rng) {
  int a = nu_via_doubled(s, rng).value;
  int b = nu_via_free(s, rng).value;
  if (a != b) fail(ErrorKind::validation, "nu routes disagree: doubled ", a, ", free ", b);
  return a;
}

inline bool nu_antisymmetry_check(const SymplecticPathLift& s, Rng& rng) {
  return nu_via_doubled(s.inverse(), rng).value + nu_via_doubled(s, rng).value == 0;
}

// 1/2 sign(M_S + M_S'), must be an integer
inline int half_sign_sum(const SymplecticMatrix& S, const SymplecticMatrix& Sp) {
  Mat sum = cayley_transform(S) + cayley_transform(Sp);
  Inertia in = inertia(0.5 * (sum + sum.transpose()));
  if (in.n_zero) fail(ErrorKind::degenerate, "M_S + M_S' is singular");
  int s = in.signature();
  if (s % 2) fail(ErrorKind::integrality, "sign(M_S + M_S') = ", s, " is odd");
  return s / 2;
}

inline int nu_of_product(int nu, int nup, const SymplecticMatrix& S, const SymplecticMatrix& Sp) {
  const auto& tol = default_tol();
  require_nondegenerate(S, tol, "S");
  require_nondegenerate(Sp, tol, "S'");
  require_nondegenerate(S * Sp, tol, "SS'");
  return nu + nup + half_sign_sum(S, Sp);
}

namespace detail {
// samples of S exp(t K) stay in one component of Sp(2n) minus {det(S - I) = 0}
inline bool stays_in_component(const Mat& S, const Mat& K, int count, double sign0) {
  for (int k = 0; k <= count; ++k) {
    Mat St = S * (K * (double(k) / count)).exp();
    double d = (St - Mat::Identity(St.rows(), St.cols())).determinant();
    if (d * sign0 <= default_tol().eps_det) return false;
  }
  return true;
}
}  // namespace detail

// nu is constant along a connecting path inside det(S - I) != 0
inline bool nu_locally_constant_check(const SymplecticPathLift& s, const SymplecticMatrix& Sp, Rng& rng,
                                      int tries = 16) {
  SymplecticMatrix S = s.end_matrix();
  double d0 = S.det_minus_identity(), d1 = Sp.det_minus_identity();
  if (std::abs(d0) <= default_tol().eps_det || std::abs(d1) <= default_tol().eps_det)
    fail(ErrorKind::degenerate, "endpoint on det(S - I) = 0");
  if ((d0 > 0) != (d1 > 0)) fail(ErrorKind::precondition, "det(S - I) and det(S' - I) differ in sign");
  const int n = s.n;
  Mat rel = S.inverse().mat() * Sp.mat();
  const int count = 64;
  // straight geodesic first, then detours through a random intermediate point
  std::vector<Mat> route;
  if ((rel - Mat::Identity(2 * n, 2 * n)).norm() < 1e-14) {
    route = {};
  } else {
    Mat K = rel.log();
    if (detail::stays_in_component(S.mat(), K, count, d0 > 0 ? 1 : -1)) {
      route.push_back(Sp.mat());
    } else {
      bool found = false;
      for (int t = 0; t < tries && !found; ++t) {
        Mat mid = S.mat() * hamiltonian_exp(random_symmetric(2 * n, rng, 0.3 * (t + 1)));
        if ((mid - Mat::Identity(2 * n, 2 * n)).determinant() * d0 <= 0) continue;
        Mat K1 = (S.inverse().mat() * mid).log();
        Mat K2 = (detail::symplectic_inverse(mid) * Sp.mat()).log();
        if (detail::stays_in_component(S.mat(), K1, count, d0 > 0 ? 1 : -1) &&
            detail::stays_in_component(mid, K2, count, d0 > 0 ? 1 : -1)) {
          route = {mid, Sp.mat()};
          found = true;
        }
      }
      if (!found) fail(ErrorKind::search, "no connecting path inside the component after ", tries, " detours");
    }
  }
  SymplecticPathLift ext = s;
  Mat cur = S.mat();
  for (const Mat& nx : route) {
    Mat K = (detail::symplectic_inverse(cur) * nx).log();
    for (int k = 1; k <= count; ++k) ext.samples.push_back(cur * (K * (double(k) / count)).exp());
    ext.samples.back() = nx;
    cur = nx;
  }
  return nu_via_doubled(ext, rng).value == nu_via_doubled(s, rng).value;
}

// nu(S_inf) mod 4 for the path lift of a word
inline int nu_mod4(const MetaplecticWord& w, Rng& rng) {
  require_nondegenerate(w.projection(), default_tol(), "S");
  return mod4(nu_via_doubled(w.path(), rng).value);
}

inline int nu_mod4(const MetaplecticWord& w) {
  Rng rng(0x5eed);
  return nu_mod4(w, rng);
}

}  // namespace sympl
