#pragma once

#include "path.hpp"

namespace sympl {

// mu_l(S_inf) = mu(S_inf l_inf, l_inf)
inline int maslov_mu_ell(const SymplecticPathLift& path, const LagrangianFrame& l, Rng& rng,
                         const Tolerances& tol = default_tol()) {
  LagLift base = LagLift::of(l);
  LagLift moved = act_on_lift(path, base);
  return alm_index(moved, base, rng, tol);
}

inline int maslov_mu_ell(const SymplecticPathLift& path, const LagrangianFrame& l) {
  Rng rng(0x5eed);
  return maslov_mu_ell(path, l, rng);
}

// m_l = (mu_l + n + dim(Sl cap l)) / 2
inline int reduced_m_ell(const SymplecticPathLift& path, const LagrangianFrame& l, Rng& rng) {
  int mu = maslov_mu_ell(path, l, rng);
  int d = intersection_dim(l.transformed(path.end_matrix()), l);
  int s = mu + l.n() + d;
  if (s % 2) fail(ErrorKind::integrality, "mu_l + n + dim is odd (", s, ")");
  return s / 2;
}

inline int reduced_m_ell(const SymplecticPathLift& path, const LagrangianFrame& l) {
  Rng rng(0x5eed);
  return reduced_m_ell(path, l, rng);
}

// m(l_inf, l'_inf) = (mu + n + dim(l cap l')) / 2
inline int reduced_alm(const LagLift& a, const LagLift& b, Rng& rng) {
  int mu = alm_index(a, b, rng);
  int d = intersection_dim(a.plane(), b.plane());
  int s = mu + a.n() + d;
  if (s % 2) fail(ErrorKind::integrality, "mu + n + dim is odd (", s, ")");
  return s / 2;
}

// composition form tau(X*, SX*, SS'X*) checked against sign(B^{-1} B'' B'^{-1})
struct CompositionForm {
  int tau = 0;
  int block_sign = 0;
};

inline CompositionForm composition_form_Q(const SymplecticMatrix& S, const SymplecticMatrix& Sp) {
  if (!is_free(S) || !is_free(Sp)) fail(ErrorKind::not_free, "composition form needs free S and S'");
  const int n = S.n();
  LagrangianFrame Xs = LagrangianFrame::p_plane(n);
  CompositionForm r;
  r.tau = kashiwara_signature(Xs, Xs.transformed(S), Xs.transformed(S * Sp));
  Mat Bpp = (S.mat() * Sp.mat()).topRightCorner(n, n);
  Mat F = S.B().inverse() * Bpp * Sp.B().inverse();
  r.block_sign = inertia(0.5 * (F + F.transpose())).signature();
  if (r.tau != r.block_sign)
    fail(ErrorKind::validation, "composition form routes disagree: tau ", r.tau, " vs block sign ", r.block_sign);
  return r;
}

// ---------------------------------------------------------------------------
// Lagrangian paths

struct LagrangianPath {
  std::vector<LagrangianFrame> frames;
  LagLift start;  // lift of frames.front()

  static LagrangianPath image(const SymplecticPathLift& p, const LagrangianFrame& l) {
    LagrangianPath lp;
    for (const Mat& S : p.samples) lp.frames.push_back(LagrangianFrame(S * l.basis()));
    lp.start = LagLift::of(lp.frames.front());
    return lp;
  }
  LagrangianPath reversed(const LagLift& end_lift) const {
    LagrangianPath r;
    r.frames.assign(frames.rbegin(), frames.rend());
    r.start = end_lift;
    return r;
  }
};

// lift the end point by continuous transport of det w
inline LagLift transport_end(const LagrangianPath& lp) {
  std::vector<cd> dets;
  for (const auto& f : lp.frames) dets.push_back(frame_to_unitary(f).determinant());
  PhaseTrack pt = lift_phase(dets, std::numeric_limits<double>::quiet_NaN(), pi / 2);
  double th = lp.start.theta + (pt.theta.back() - pt.theta.front());
  CMat w = frame_to_unitary(lp.frames.back());
  th += std::arg(w.determinant() * std::exp(-I_unit * th));
  return {w, th};
}

// 1/2 (m(l_b, l) - m(l_a, l))
inline double robbin_salamon(const LagrangianPath& lp, const LagrangianFrame& l, Rng& rng) {
  LagLift base = LagLift::of(l);
  LagLift b = transport_end(lp);
  return 0.5 * (reduced_alm(b, base, rng) - reduced_alm(lp.start, base, rng));
}

// Sigma given by absolute samples starting at prefix.end()
inline double symplectic_intersection_index(const SymplecticPathLift& prefix, const std::vector<Mat>& sigma,
                                            const LagrangianFrame& l, Rng& rng) {
  if (sigma.empty() || (sigma.front() - prefix.end()).cwiseAbs().maxCoeff() > 1e-9)
    fail(ErrorKind::precondition, "Sigma must start at the end of the prefix path");
  SymplecticPathLift full = prefix;
  for (std::size_t k = 1; k < sigma.size(); ++k) full.samples.push_back(sigma[k]);
  return 0.5 * (reduced_m_ell(full, l, rng) - reduced_m_ell(prefix, l, rng));
}

}  // namespace sympl
