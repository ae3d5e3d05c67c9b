#include <gtest/gtest.h>

#include "sympl/cz_index.hpp"
#include "sympl/maslov.hpp"

using namespace sympl;

namespace {

Mat m1(double a) { return Mat::Constant(1, 1, a); }

Mat mat2(double a, double b, double c, double d) {
  Mat M(2, 2);
  M << a, b, c, d;
  return M;
}

bool throws_kind(ErrorKind k, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == k;
  }
  return false;
}

GeneratingFunction random_w(int n, Rng& rng) {
  GeneratingFunction W{random_symmetric(n, rng, 0.7), Mat::Identity(n, n) + random_matrix(n, n, rng, 0.3),
                       random_symmetric(n, rng, 0.7)};
  return W;
}

// 1-d regulated oscillatory integral int e^{-i v u} e^{(i/2) m u^2 - eps u^2} du / sqrt(2 pi)
cd regulated_fresnel_1d(double m, double v, double eps = 2e-5, double L = 1500, double h = 2e-4) {
  cd s = 0;
  for (double u = -L; u <= L; u += h) s += std::exp(cd(-eps * u * u, 0.5 * m * u * u - v * u));
  return s * h / std::sqrt(2 * pi);
}

}  // namespace

// ---------------------------------------------------------------------------
// numkit

TEST(Inertia, DiagonalCounts) {
  Mat D = Vec((Vec(3) << 1, -1, 3).finished()).asDiagonal();
  Inertia in = inertia(D);
  EXPECT_EQ(in.n_plus, 2);
  EXPECT_EQ(in.n_minus, 1);
  EXPECT_EQ(in.n_zero, 0);
  EXPECT_EQ(in.signature(), 1);
}

TEST(Inertia, ZeroMatrix) {
  Inertia in = inertia(Mat::Zero(2, 2));
  EXPECT_EQ(in.n_zero, 2);
  EXPECT_EQ(in.signature(), 0);
}

TEST(Inertia, HessianOfJ) {
  Inertia in = inertia(hessian_WS(SymplecticMatrix::J(1)));
  EXPECT_EQ(in.n_minus, 1);
  EXPECT_EQ(in.signature(), -1);
}

TEST(Inertia, RejectsAsymmetric) {
  EXPECT_TRUE(throws_kind(ErrorKind::symmetry, [] { inertia(mat2(1, 1, 0, 1)); }));
}

TEST(Fresnel, ScalarSigns) {
  EXPECT_LT(std::abs(fresnel_gaussian_ft(m1(1), Vec::Zero(1)) - std::exp(I_unit * (pi / 4))), 1e-14);
  EXPECT_LT(std::abs(fresnel_gaussian_ft(m1(-1), Vec::Zero(1)) - std::exp(-I_unit * (pi / 4))), 1e-14);
}

TEST(Fresnel, IdentityWithShiftMatchesQuadrature) {
  Vec v(2);
  v << 1, 0;
  cd closed = fresnel_gaussian_ft(Mat::Identity(2, 2), v);
  EXPECT_LT(std::abs(closed - std::exp(I_unit * (pi / 2 - 0.5))), 1e-14);
  // separable: one factor per coordinate
  cd quad = regulated_fresnel_1d(1, 1) * regulated_fresnel_1d(1, 0);
  EXPECT_LT(std::abs(quad - closed), 2e-3);
}

TEST(Fresnel, SingularRejected) {
  EXPECT_TRUE(throws_kind(ErrorKind::singular, [] { fresnel_gaussian_ft(Mat::Zero(2, 2), Vec::Zero(2)); }));
}

TEST(UnitaryLogTrace, Examples) {
  EXPECT_LT(std::abs(unitary_log_trace(CMat::Identity(3, 3))), 1e-15);
  CMat w = CMat::Constant(1, 1, I_unit);
  EXPECT_LT(std::abs(unitary_log_trace(w) - I_unit * (pi / 2)), 1e-15);
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = std::exp(I_unit * (pi / 3));
  d(1, 1) = std::exp(-I_unit * (pi / 4));
  EXPECT_LT(std::abs(unitary_log_trace(d) - I_unit * (pi / 3 - pi / 4)), 1e-14);
}

TEST(UnitaryLogTrace, BranchCut) {
  CMat w = -CMat::Identity(1, 1);
  EXPECT_TRUE(throws_kind(ErrorKind::branch_cut, [&] { unitary_log_trace(w); }));
}

TEST(LiftPhase, Examples) {
  PhaseTrack c = lift_phase({1.0, 1.0, 1.0});
  for (double t : c.theta) EXPECT_EQ(t, 0.0);

  PhaseTrack lin = lift_phase({1.0, std::exp(I_unit * (pi / 2)), std::exp(I_unit * pi)});
  EXPECT_NEAR(lin.theta[1], pi / 2, 1e-14);
  EXPECT_NEAR(lin.theta[2], pi, 1e-14);

  std::vector<cd> loop;
  for (int k = 0; k <= 8; ++k) loop.push_back(std::exp(2 * pi * I_unit * (k / 8.0)));
  PhaseTrack l = lift_phase(loop);
  EXPECT_NEAR(l.theta.back(), 2 * pi, 1e-12);
  EXPECT_NEAR(l.winding(), 1.0, 1e-12);
}

TEST(LiftPhase, UndersampledRejected) {
  EXPECT_TRUE(throws_kind(ErrorKind::undersampled, [] { lift_phase({1.0, std::exp(I_unit * 3.1)}, NAN, 1.0); }));
}

// ---------------------------------------------------------------------------
// symplectic core

TEST(Symplectic, Membership) {
  EXPECT_TRUE(is_symplectic(Mat::Identity(2, 2)));
  EXPECT_TRUE(is_symplectic(standard_j(1)));
  EXPECT_FALSE(is_symplectic(mat2(2, 0, 0, 1)));
  EXPECT_TRUE(throws_kind(ErrorKind::validation, [] { SymplecticMatrix(mat2(2, 0, 0, 1)); }));
}

TEST(GeneratingFunction, JFromMinusXXPrime) {
  for (int n : {1, 2}) {
    GeneratingFunction W{Mat::Zero(n, n), Mat::Identity(n, n), Mat::Zero(n, n)};
    EXPECT_LT((free_from_generating(W).mat() - standard_j(n)).cwiseAbs().maxCoeff(), 1e-15);
  }
  GeneratingFunction back = generating_from_free(SymplecticMatrix::J(1));
  EXPECT_NEAR(back.P(0, 0), 0, 1e-15);
  EXPECT_NEAR(back.L(0, 0), 1, 1e-15);
  EXPECT_NEAR(back.Q(0, 0), 0, 1e-15);
}

TEST(GeneratingFunction, IdentityIsNotFree) {
  EXPECT_TRUE(throws_kind(ErrorKind::not_free, [] { generating_from_free(SymplecticMatrix::identity(2)); }));
}

TEST(GeneratingFunction, Roundtrips) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    int n = 1 + t % 3;
    GeneratingFunction W = random_w(n, rng);
    SymplecticMatrix S = free_from_generating(W);
    GeneratingFunction W2 = generating_from_free(S);
    EXPECT_LT(rel_err(W2.P, W.P) + rel_err(W2.L, W.L) + rel_err(W2.Q, W.Q), 1e-10);
    EXPECT_LT(rel_err(free_from_generating(W2).mat(), S.mat()), 1e-10);
  }
}

TEST(Cayley, Examples) {
  EXPECT_LT((cayley_transform(SymplecticMatrix::J(1)) - 0.5 * Mat::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT(cayley_transform(SymplecticMatrix(-Mat::Identity(2, 2))).norm(), 1e-15);
  EXPECT_LT((cayley_inverse(0.5 * Mat::Identity(2, 2)).mat() - standard_j(1)).norm(), 1e-15);
  EXPECT_LT((cayley_inverse(Mat::Zero(2, 2)).mat() + Mat::Identity(2, 2)).norm(), 1e-15);
}

TEST(Cayley, IdentityIsDegenerate) {
  EXPECT_TRUE(throws_kind(ErrorKind::degenerate, [] { cayley_transform(SymplecticMatrix::identity(1)); }));
}

TEST(Cayley, InverseNegatesAndRoundtrips) {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    SymplecticMatrix S = random_symplectic_nondegenerate(1 + t % 3, rng);
    Mat M = cayley_transform(S);
    EXPECT_LT(rel_err(cayley_transform(S.inverse()), -M), 1e-9);
    EXPECT_LT(rel_err(cayley_inverse(M).mat(), S.mat()), 1e-9);
  }
}

TEST(Cayley, ProductOfJWithItself) {
  SymplecticMatrix J = SymplecticMatrix::J(1);
  EXPECT_LT(cayley_of_product(J, J).M.norm(), 1e-14);
}

TEST(Cayley, ProductRandomPairs) {
  Rng rng(13);
  int done = 0;
  while (done < 20) {
    int n = 1 + done % 3;
    SymplecticMatrix S = random_symplectic(n, rng), Sp = random_symplectic(n, rng);
    if (std::abs(S.det_minus_identity()) < 0.1 || std::abs(Sp.det_minus_identity()) < 0.1 ||
        std::abs((S * Sp).det_minus_identity()) < 0.1 ||
        std::abs((cayley_transform(S) + cayley_transform(Sp)).determinant()) < 0.1)
      continue;
    CayleyProductCheck c = cayley_of_product(S, Sp);
    EXPECT_LT(rel_err(c.M, cayley_transform(S * Sp)), 1e-9);
    ++done;
  }
}

TEST(Cayley, ProductWithInverseIsDegenerate) {
  Rng rng(14);
  SymplecticMatrix S = random_symplectic_nondegenerate(2, rng);
  EXPECT_TRUE(throws_kind(ErrorKind::degenerate, [&] { cayley_of_product(S, S.inverse()); }));
}

TEST(HessianWS, JAndDeterminantFactorization) {
  SymplecticMatrix J = SymplecticMatrix::J(1);
  EXPECT_NEAR(hessian_WS(J)(0, 0), -2, 1e-15);
  EXPECT_NEAR(-1 * J.B().determinant() * hessian_WS(J).determinant(), 2.0, 1e-15);
  EXPECT_NEAR(J.det_minus_identity(), 2.0, 1e-15);
  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    int n = 1 + t % 3;
    SymplecticMatrix S = free_from_generating(random_w(n, rng));
    double rhs = std::pow(-1.0, n) * S.B().determinant() * hessian_WS(S).determinant();
    EXPECT_NEAR(S.det_minus_identity(), rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
  }
}

// ---------------------------------------------------------------------------
// Lagrangian planes and Maslov indices

TEST(FrameToUnitary, Examples) {
  EXPECT_LT((frame_to_unitary(LagrangianFrame::p_plane(2)) - CMat::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT(std::abs(frame_to_unitary(LagrangianFrame::x_plane(1))(0, 0) + 1.0), 1e-15);
  cd w = frame_to_unitary(LagrangianFrame::graph(m1(1)))(0, 0);
  EXPECT_NEAR(std::abs(w), 1.0, 1e-15);
  EXPECT_GT(std::abs(w - 1.0), 0.1);
  EXPECT_GT(std::abs(w + 1.0), 0.1);
}

TEST(FrameToUnitary, RejectsNonIsotropic) {
  Mat F = Mat::Zero(2, 1);
  F << 1, 0;
  Mat G = Mat::Zero(4, 2);
  G(0, 0) = 1;
  G(2, 1) = 1;  // x1 and p1 span a symplectic plane
  EXPECT_TRUE(throws_kind(ErrorKind::isotropy, [&] { LagrangianFrame l(G); }));
}

TEST(Kashiwara, Examples) {
  Rng rng(21);
  LagrangianFrame a = random_lagrangian(2, rng), b = random_lagrangian(2, rng);
  EXPECT_EQ(kashiwara_signature(a, a, b), 0);
  EXPECT_EQ(kashiwara_signature(a, b, b), 0);
  EXPECT_EQ(kashiwara_signature(b, a, b), 0);
  const LagrangianFrame Xs = LagrangianFrame::p_plane(1), X = LagrangianFrame::x_plane(1);
  EXPECT_EQ(kashiwara_signature(Xs, LagrangianFrame::graph(m1(2)), X), 1);
  EXPECT_EQ(kashiwara_signature(Xs, LagrangianFrame::graph(m1(-3)), X), -1);
  EXPECT_EQ(kashiwara_transversal(Xs, LagrangianFrame::graph(m1(2)), X), 1);
}

TEST(Kashiwara, GraphSignatureRandom) {
  Rng rng(22);
  for (int t = 0; t < 50; ++t) {
    int n = 1 + t % 4;
    Mat A = random_symmetric(n, rng, 1.0);
    EXPECT_EQ(kashiwara_signature(LagrangianFrame::p_plane(n), LagrangianFrame::graph(A), LagrangianFrame::x_plane(n)),
              inertia(A).signature());
  }
}

TEST(Kashiwara, TransversalRoutineAgrees) {
  Rng rng(23);
  for (int t = 0; t < 40; ++t) {
    int n = 1 + t % 4;
    LagrangianFrame a = random_lagrangian(n, rng), b = random_lagrangian(n, rng), c = random_lagrangian(n, rng);
    EXPECT_EQ(kashiwara_transversal(a, b, c), kashiwara_signature(a, b, c));
  }
}

TEST(Kashiwara, VanishesOnSplitMiddlePlane) {
  // l' = (l cap l') + (l'' cap l'), the form on l + l' + l'' then has no definite part
  Rng rng(24);
  for (int t = 0; t < 10; ++t) {
    int n = 2;
    SymplecticMatrix S = random_symplectic(n, rng, 0.5);
    LagrangianFrame l = LagrangianFrame::x_plane(n).transformed(S);
    LagrangianFrame lpp = LagrangianFrame::p_plane(n).transformed(S);
    Mat F = Mat::Zero(4, 2);
    F(0, 0) = 1;  // x1 in l
    F(3, 1) = 1;  // p2 in l''
    LagrangianFrame lp = LagrangianFrame(F).transformed(S);
    EXPECT_EQ(kashiwara_signature(l, lp, lpp), 0);
  }
}

TEST(Kashiwara, TransversalRoutineRejectsNonTransversal) {
  Rng rng(25);
  LagrangianFrame a = random_lagrangian(2, rng), b = random_lagrangian(2, rng);
  EXPECT_TRUE(throws_kind(ErrorKind::precondition, [&] { kashiwara_transversal(a, b, a); }));
}

TEST(Alm, SelfAntisymmetryAndShift) {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    int n = 1 + t % 3;
    LagLift a = LagLift::of(random_lagrangian(n, rng)), b = LagLift::of(random_lagrangian(n, rng));
    EXPECT_EQ(alm_index(a, a, rng), 0);
    int ab = alm_index(a, b, rng);
    EXPECT_EQ(alm_index(b, a, rng), -ab);
    int r = rng.integer(-3, 3), rp = rng.integer(-3, 3);
    EXPECT_EQ(alm_index(a.shifted(r), b.shifted(rp), rng), ab + 2 * (r - rp));
  }
}

TEST(Alm, NonTransversalUsesAuxiliaryPlane) {
  Rng rng(32);
  auto [l0, l1] = stratified_pair(3, 2, rng);
  AlmDetail d = alm_index_detail(LagLift::of(l0), LagLift::of(l1), rng);
  EXPECT_FALSE(d.transversal);
  EXPECT_GE(d.draws, 1);
}

TEST(ActOnLift, ConstantPathLeavesLiftUnchanged) {
  Rng rng(33);
  LagLift l = LagLift::of(random_lagrangian(2, rng));
  LagLift m = act_on_lift(SymplecticPathLift::constant(2), l);
  EXPECT_LT((m.w - l.w).norm(), 1e-14);
  EXPECT_NEAR(m.theta, l.theta, 1e-14);
}

TEST(ActOnLift, AlphaLoopAddsFourPi) {
  Rng rng(34);
  for (int n = 1; n <= 3; ++n) {
    LagLift l = LagLift::of(random_lagrangian(n, rng));
    LagLift m = act_on_lift(SymplecticPathLift::alpha_loop(n), l);
    EXPECT_LT((m.w - l.w).norm(), 1e-9);
    EXPECT_NEAR(m.theta - l.theta, 4 * pi, 1e-9);
  }
}

TEST(ActOnLift, QuarterRotationOfPPlane) {
  LagLift m = act_on_lift(SymplecticPathLift::quarter_rotation(1), LagLift::of(LagrangianFrame::p_plane(1)));
  EXPECT_LT(std::abs(m.w(0, 0) + 1.0), 1e-12);  // over X
  EXPECT_NEAR(m.theta, -pi, 1e-12);
}

TEST(MuEll, Examples) {
  Rng rng(41);
  const LagrangianFrame Xs = LagrangianFrame::p_plane(1);
  EXPECT_EQ(maslov_mu_ell(SymplecticPathLift::constant(2), random_lagrangian(2, rng), rng), 0);
  SymplecticPathLift q = SymplecticPathLift::quarter_rotation(1);
  EXPECT_EQ(maslov_mu_ell(q, Xs, rng), -1);
  for (int r : {-2, 1, 2}) EXPECT_EQ(maslov_mu_ell(SymplecticPathLift::prepend_alpha(q, r), Xs, rng), -1 + 4 * r);
}

TEST(ReducedMEll, Examples) {
  Rng rng(42);
  for (int n = 1; n <= 3; ++n)
    EXPECT_EQ(reduced_m_ell(SymplecticPathLift::constant(n), random_lagrangian(n, rng), rng), n);
  SymplecticPathLift q = SymplecticPathLift::quarter_rotation(1);
  const LagrangianFrame Xs = LagrangianFrame::p_plane(1);
  EXPECT_EQ(reduced_m_ell(q, Xs, rng), 0);
  EXPECT_EQ(reduced_m_ell(SymplecticPathLift::prepend_alpha(q, 1), Xs, rng), 2);
  EXPECT_EQ(reduced_m_ell(SymplecticPathLift::prepend_alpha(q, 3), Xs, rng), 6);
}

TEST(LerayInertia, Examples) {
  const LagrangianFrame Xs = LagrangianFrame::p_plane(1), X = LagrangianFrame::x_plane(1);
  EXPECT_EQ(leray_inertia(Xs, LagrangianFrame::graph(m1(2)), X), 1);
  EXPECT_EQ(leray_inertia(Xs, LagrangianFrame::graph(m1(-3)), X), 0);
  Rng rng(43);
  for (int t = 0; t < 30; ++t) {
    int n = 1 + t % 4;
    LagrangianFrame a = random_lagrangian(n, rng), b = random_lagrangian(n, rng), c = random_lagrangian(n, rng);
    EXPECT_EQ(2 * leray_inertia(a, b, c) - n, kashiwara_signature(a, b, c));
  }
}

TEST(CompositionForm, RoutesAgree) {
  SymplecticMatrix J = SymplecticMatrix::J(1);
  SymplecticMatrix Sw = free_from_generating({m1(1), m1(1), m1(1)});
  CompositionForm c = composition_form_Q(J, Sw);
  EXPECT_EQ(c.tau, c.block_sign);
  Rng rng(44);
  int done = 0;
  while (done < 20) {
    int n = 1 + done % 3;
    SymplecticMatrix S = free_from_generating(random_w(n, rng)), Sp = free_from_generating(random_w(n, rng));
    if (!is_free(S * Sp) || std::abs((S * Sp).B().determinant()) < 1e-3) continue;
    CompositionForm f = composition_form_Q(S, Sp);
    EXPECT_EQ(f.tau, f.block_sign);
    ++done;
  }
}

TEST(CompositionForm, DegenerateProductRejected) {
  SymplecticMatrix J = SymplecticMatrix::J(1), I(Mat::Identity(2, 2));
  EXPECT_TRUE(throws_kind(ErrorKind::not_free, [&] { composition_form_Q(I, J); }));
  EXPECT_TRUE(throws_kind(ErrorKind::not_free, [&] { composition_form_Q(J, I); }));
  EXPECT_NO_THROW(composition_form_Q(J, J.inverse()));
}

TEST(RobbinSalamon, ConstantAndReverse) {
  Rng rng(45);
  LagrangianFrame l = random_lagrangian(2, rng);
  LagrangianPath c = LagrangianPath::image(SymplecticPathLift::constant(2, 5), random_lagrangian(2, rng));
  EXPECT_EQ(robbin_salamon(c, l, rng), 0.0);
  for (int t = 0; t < 10; ++t) {
    SymplecticPathLift p = SymplecticPathLift::hamiltonian(random_symmetric(4, rng, 1.5));
    LagrangianPath lp = LagrangianPath::image(p, random_lagrangian(2, rng));
    double fwd = robbin_salamon(lp, l, rng);
    double back = robbin_salamon(lp.reversed(transport_end(lp)), l, rng);
    EXPECT_EQ(fwd + back, 0.0);
  }
}

TEST(RobbinSalamon, QuarterRotationOfPPlane) {
  Rng rng(46);
  const LagrangianFrame Xs = LagrangianFrame::p_plane(1), X = LagrangianFrame::x_plane(1);
  LagrangianPath lp = LagrangianPath::image(SymplecticPathLift::quarter_rotation(1), Xs);
  double rs = robbin_salamon(lp, X, rng);
  // endpoints from the ALM index directly: the frame (sin s, cos s) has w = -e^{-2is},
  // so the lift turns clockwise by pi from X* (w = -1) to X (w = 1)
  LagLift base = LagLift::of(X), start = LagLift::of(Xs);
  LagLift end{CMat::Constant(1, 1, 1.0), start.theta - pi};
  int me = (alm_index(end, base, rng) + 1 + intersection_dim(X, X)) / 2;
  int ms = (alm_index(start, base, rng) + 1 + intersection_dim(Xs, X)) / 2;
  EXPECT_EQ(me, ms);
  EXPECT_EQ(rs, 0.5 * (me - ms));
  EXPECT_EQ(rs, 0.0);
}

TEST(IntersectionIndex, ConstantAdditiveAndAlpha) {
  Rng rng(47);
  LagrangianFrame l = random_lagrangian(2, rng);
  SymplecticPathLift prefix = SymplecticPathLift::hamiltonian(random_symmetric(4, rng, 1.0));
  std::vector<Mat> still(4, prefix.end());
  EXPECT_EQ(symplectic_intersection_index(prefix, still, l, rng), 0.0);

  SymplecticPathLift tail = SymplecticPathLift::hamiltonian(random_symmetric(4, rng, 1.0));
  SymplecticPathLift ext = SymplecticPathLift::concat(prefix, tail);
  std::vector<Mat> sigma(ext.samples.begin() + static_cast<long>(prefix.size()) - 1, ext.samples.end());
  std::size_t mid = sigma.size() / 2;
  std::vector<Mat> s1(sigma.begin(), sigma.begin() + static_cast<long>(mid) + 1), s2(sigma.begin() + static_cast<long>(mid), sigma.end());
  SymplecticPathLift prefix2 = prefix;
  for (std::size_t k = 1; k < s1.size(); ++k) prefix2.samples.push_back(s1[k]);
  double whole = symplectic_intersection_index(prefix, sigma, l, rng);
  double parts = symplectic_intersection_index(prefix, s1, l, rng) + symplectic_intersection_index(prefix2, s2, l, rng);
  EXPECT_EQ(whole, parts);

  SymplecticPathLift trivial = SymplecticPathLift::constant(2, 2);
  SymplecticPathLift a = SymplecticPathLift::alpha_loop(2);
  EXPECT_EQ(symplectic_intersection_index(trivial, a.samples, LagrangianFrame::p_plane(2), rng), 1.0);
}

TEST(LoopIndex, AlphaDegree) {
  EXPECT_EQ(loop_maslov_index(SymplecticPathLift::constant(2, 3)), 0);
  for (int n = 1; n <= 3; ++n) EXPECT_EQ(loop_maslov_index(SymplecticPathLift::alpha_loop(n)), 1);
  EXPECT_EQ(loop_maslov_index(SymplecticPathLift::alpha_loop(2, 3)), 3);
  EXPECT_EQ(loop_maslov_index(SymplecticPathLift::alpha_loop(1, -2)), -2);
}

TEST(LoopIndex, OpenPathRejected) {
  EXPECT_TRUE(throws_kind(ErrorKind::precondition, [] { loop_maslov_index(SymplecticPathLift::quarter_rotation(1)); }));
}

// ---------------------------------------------------------------------------
// nu

TEST(Nu, ConstantPathDoubledRoute) { EXPECT_EQ(nu_via_doubled(SymplecticPathLift::constant(2)).value, 0); }

TEST(Nu, QuarterRotation) {
  SymplecticPathLift q = SymplecticPathLift::quarter_rotation(1);
  EXPECT_EQ(nu_via_doubled(q).value, -1);
  EXPECT_EQ(nu_via_free(q).value, -1);
  Rng rng(51);
  EXPECT_EQ(nu_via_doubled(q.inverse(), rng).value, 1);
  EXPECT_TRUE(nu_antisymmetry_check(q, rng));
  EXPECT_TRUE(nu_antisymmetry_check(SymplecticPathLift::constant(1), rng));
}

TEST(Nu, AlphaShiftBothRoutes) {
  SymplecticPathLift q = SymplecticPathLift::quarter_rotation(1);
  for (int r : {-1, 1, 2}) {
    SymplecticPathLift p = SymplecticPathLift::prepend_alpha(q, r);
    EXPECT_EQ(nu_via_doubled(p).value, -1 + 2 * r);
    EXPECT_EQ(nu_via_free(p).value, -1 + 2 * r);
  }
}

TEST(Nu, RoutesAgreeOnRandomPaths) {
  Rng rng(52);
  int done = 0, tries = 0;
  while (done < 100 && tries < 1000) {
    ++tries;
    int n = 1 + done % 3;
    SymplecticPathLift p = SymplecticPathLift::hamiltonian(random_symmetric(2 * n, rng, 2.0));
    SymplecticMatrix S = p.end_matrix();
    if (!is_free(S) || std::abs(S.B().determinant()) < 1e-3 || std::abs(S.det_minus_identity()) < 1e-3) continue;
    EXPECT_EQ(nu_via_free(p, rng).value, nu_via_doubled(p, rng).value);
    EXPECT_TRUE(nu_antisymmetry_check(p, rng));
    ++done;
  }
  EXPECT_EQ(done, 100);
}

TEST(Nu, FreeRouteNeedsFreeEndpoint) {
  EXPECT_TRUE(throws_kind(ErrorKind::not_free, [] { nu_via_free(SymplecticPathLift::constant(1)); }));
}

TEST(NuProduct, HalfRotation) {
  SymplecticMatrix J = SymplecticMatrix::J(1);
  EXPECT_EQ(nu_of_product(-1, -1, J, J), -1);
  SymplecticPathLift q = SymplecticPathLift::quarter_rotation(1);
  EXPECT_EQ(nu_via_doubled(SymplecticPathLift::concat(q, q)).value, -1);
}

TEST(NuProduct, IdentityFactorRejected) {
  EXPECT_TRUE(throws_kind(ErrorKind::degenerate,
                          [] { nu_of_product(0, -1, SymplecticMatrix::identity(1), SymplecticMatrix::J(1)); }));
}

TEST(NuProduct, MatchesConcatenatedPath) {
  Rng rng(53);
  int done = 0;
  while (done < 20) {
    int n = 1 + done % 3;
    SymplecticPathLift a = SymplecticPathLift::hamiltonian(random_symmetric(2 * n, rng, 2.0));
    SymplecticPathLift b = SymplecticPathLift::hamiltonian(random_symmetric(2 * n, rng, 2.0));
    SymplecticMatrix S = a.end_matrix(), Sp = b.end_matrix();
    if (std::abs(S.det_minus_identity()) < 1e-3 || std::abs(Sp.det_minus_identity()) < 1e-3 ||
        std::abs((S * Sp).det_minus_identity()) < 1e-3 ||
        std::abs((cayley_transform(S) + cayley_transform(Sp)).determinant()) < 1e-3)
      continue;
    int lhs = nu_via_doubled(SymplecticPathLift::concat(a, b), rng).value;
    EXPECT_EQ(lhs, nu_of_product(nu_via_doubled(a, rng).value, nu_via_doubled(b, rng).value, S, Sp));
    ++done;
  }
}

TEST(NuLocallyConstant, Examples) {
  Rng rng(54);
  SymplecticPathLift q = SymplecticPathLift::quarter_rotation(1);
  SymplecticMatrix J = q.end_matrix();
  EXPECT_TRUE(nu_locally_constant_check(q, J, rng));
  Mat H = random_symmetric(2, rng, 1.0);
  SymplecticMatrix Sp(J.mat() * hamiltonian_exp(0.05 * H));
  EXPECT_TRUE(nu_locally_constant_check(q, Sp, rng));
  // hyperbolic target on the other side of det(S - I) = 0
  Mat K = Mat::Zero(2, 2);
  K(0, 0) = 2;
  K(1, 1) = 0.5;
  EXPECT_TRUE(throws_kind(ErrorKind::precondition, [&] { nu_locally_constant_check(q, SymplecticMatrix(K), rng); }));
}

TEST(NuMod4, JWord) {
  MetaplecticWord w(1, {Factor::Jhat()});
  EXPECT_EQ(nu_mod4(w), 3);
  // the deck transformation alpha^2 shifts nu by 4
  EXPECT_EQ(mod4(nu_via_doubled(SymplecticPathLift::prepend_alpha(w.path(), 2)).value), 3);
}

TEST(NuMod4, PhaseRelationOnGenerators) {
  Rng rng(55);
  for (int t = 0; t < 20; ++t) {
    int n = 1 + t % 3;
    GeneratingFunction W = random_w(n, rng);
    if (rng.uniform() < 0.5) W.L.row(0) *= -1;
    QuadraticFourierTransform q{W, default_m(W.L) + 2 * rng.integer(0, 1)};
    SymplecticMatrix S = q.projection();
    if (std::abs(S.det_minus_identity()) < 1e-3) continue;
    int nu = nu_mod4(MetaplecticWord::single(q), rng);
    int sw = inertia(hessian_WS(S)).signature();
    cd lhs = i_pow(nu) * std::exp(-I_unit * (pi / 4 * sw));
    cd rhs = std::exp(I_unit * (pi / 2 * (q.m - 0.5 * n)));
    EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  }
}
