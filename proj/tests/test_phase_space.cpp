#include <gtest/gtest.h>

#include "sympl/phase_space.hpp"

using namespace sympl;

namespace {

const Axis kSd = self_dual_axis(256);

Mat m1(double a) { return Mat::Constant(1, 1, a); }

Vec z2(double x, double p) {
  Vec z(2);
  z << x, p;
  return z;
}

GridFunctionX state(Rng& rng, const Axis& a = kSd) { return gaussian_superposition(1, a, rng, 3, 1.0); }

GridFunctionX times_x(GridFunctionX f) {
  for (int j = 0; j < f.axis.N; ++j) f.values[j] *= f.axis.x(j);
  return f;
}

GridFunctionX normalized(GridFunctionX f) {
  double n = f.norm();
  for (cd& v : f.values) v /= n;
  return f;
}

double max_abs_diff(const GridFunctionZ& a, const GridFunctionZ& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double max_abs(const GridFunctionZ& a) {
  double m = 0;
  for (const cd& v : a.values) m = std::max(m, std::abs(v));
  return m;
}

QuadraticFourierTransform q1(double P, double L, double Q) { return {{m1(P), m1(L), m1(Q)}, default_m(m1(L))}; }

}  // namespace

// ---------------------------------------------------------------------------
// symplectic Fourier transform

TEST(SymplecticFourier, ConstantGivesSpikeAtOrigin) {
  GridFunctionZ one = GridFunctionZ::sample(kSd, kSd, [](double, double) { return cd(1.0); });
  GridFunctionZ s = symplectic_fourier(one);
  const int c = kSd.N / 2;
  EXPECT_LT(std::abs(s.at(c, c) * s.cell() - 2 * pi), 1e-10);
  s.at(c, c) = 0;
  EXPECT_LT(max_abs(s), 1e-10);
}

TEST(SymplecticFourier, GaussianIsFixed) {
  GridFunctionZ g = GridFunctionZ::sample(kSd, kSd, [](double x, double p) { return cd(std::exp(-0.5 * (x * x + p * p))); });
  EXPECT_LT(rel_l2(symplectic_fourier(g), g), 1e-10);
}

TEST(SymplecticFourier, Involution) {
  Rng rng(1);
  GridFunctionZ F = u_phi(state(rng), WindowState::gaussian(kSd));
  EXPECT_LT(rel_l2(symplectic_fourier(symplectic_fourier(F)), F), 1e-10);
}

TEST(SymplecticFourier, NeedsSelfDualGrid) {
  Axis a{0.0, 8.0, 64};
  GridFunctionZ F(a, a);
  EXPECT_THROW(symplectic_fourier(F), Error);
}

// ---------------------------------------------------------------------------
// Wigner-Moyal

TEST(Wigner, GroundStateBlob) {
  GridFunctionX phi = gaussian_phi0(1, kSd);
  GridFunctionZ W = wigner_moyal(phi, phi);
  double worst = 0;
  for (int j = 0; j < W.nx(); ++j)
    for (int m = 0; m < W.np(); ++m) {
      double x = W.x(j), p = W.p(m);
      worst = std::max(worst, std::abs(W.at(j, m) - std::exp(-x * x - p * p) / pi));
    }
  EXPECT_LT(worst, 1e-10);
}

TEST(Wigner, MoyalIdentity) {
  Rng rng(2);
  for (int t = 0; t < 3; ++t) {
    GridFunctionX f = state(rng), fp = state(rng), g = state(rng), gp = state(rng);
    cd lhs = inner(wigner_moyal(f, g), wigner_moyal(fp, gp));
    cd rhs = inner(f, fp) * std::conj(inner(g, gp)) / (2 * pi);
    EXPECT_LT(std::abs(lhs - rhs), 1e-6 * std::abs(rhs) + 1e-14);
  }
}

TEST(Wigner, MetaplecticCovariance) {
  Rng rng(3);
  GridFunctionX f = state(rng), g = state(rng);
  for (const MetaplecticWord& w : {MetaplecticWord(1, {Factor::Jhat()}), MetaplecticWord(1, {Factor::V(m1(0.4))}),
                                   MetaplecticWord::single(q1(0.3, 0.9, -0.2)).expanded()}) {
    GridFunctionX Sf = apply_word(w, f), Sg = apply_word(w, g);
    Mat Si = w.projection().inverse().mat();
    std::vector<Vec> zs, zsi;
    for (int i = 0; i < 40; ++i) {
      Vec z = z2(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5));
      zs.push_back(z);
      zsi.push_back(Si * z);
    }
    auto lhs = wigner_at(Sf, Sg, zs), rhs = wigner_at(f, g, zsi);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      num += std::norm(lhs[i] - rhs[i]);
      den += std::norm(rhs[i]);
    }
    EXPECT_LT(std::sqrt(num / den), 1e-5);
  }
}

// ---------------------------------------------------------------------------
// U_phi

TEST(UPhi, Isometry) {
  Rng rng(4);
  WindowState win = WindowState::gaussian(kSd);
  for (int t = 0; t < 3; ++t) {
    GridFunctionX f = state(rng);
    EXPECT_NEAR(u_phi(f, win).norm() / f.norm(), 1.0, 1e-6);
  }
}

TEST(UPhi, GroundStateWithItself) {
  WindowState win = WindowState::gaussian(kSd);
  GridFunctionZ F = u_phi(win.phi, win);
  cd c = F.at(kSd.N / 2, kSd.N / 2);
  EXPECT_GT(c.real(), 0);
  EXPECT_LT(std::abs(c.imag()), 1e-14);
  EXPECT_NEAR(F.norm(), 1.0, 1e-10);
}

TEST(UPhi, OrthogonalStaysOrthogonal) {
  WindowState win = WindowState::gaussian(kSd);
  GridFunctionX f = gaussian_phi0(1, kSd), g = times_x(gaussian_phi0(1, kSd));
  ASSERT_LT(std::abs(inner(f, g)), 1e-14);
  EXPECT_LT(std::abs(inner(u_phi(f, win), u_phi(g, win))), 1e-6);
}

TEST(UPhi, AdjointInvertsAndProjects) {
  Rng rng(5);
  WindowState win = WindowState::gaussian(kSd);
  GridFunctionX f = state(rng);
  GridFunctionZ U = u_phi(f, win);
  EXPECT_LT(rel_l2(u_phi_adjoint(U, win), f), 1e-6);

  // a phase-space function outside the range
  GridFunctionZ G = GridFunctionZ::sample(kSd, kSd, [](double x, double p) {
    return cd(std::exp(-0.3 * (x - 1) * (x - 1) - 0.5 * p * p), std::exp(-0.4 * (x * x + (p + 1) * (p + 1))));
  });
  cd l = inner(U, G), r = inner(f, u_phi_adjoint(G, win));
  EXPECT_LT(std::abs(l - r), 1e-8 * std::max(1.0, std::abs(l)));
  GridFunctionZ PG = u_phi(u_phi_adjoint(G, win), win);
  GridFunctionZ PPG = u_phi(u_phi_adjoint(PG, win), win);
  EXPECT_LT(rel_l2(PPG, PG), 1e-6);
}

// ---------------------------------------------------------------------------
// Heisenberg operators

TEST(Heisenberg, TranslationsCommuteUpToPhase) {
  Rng rng(6);
  const double h = kSd.step();
  GridFunctionZ F = u_phi(state(rng), WindowState::gaussian(kSd));
  EXPECT_LT(max_abs_diff(t_ph(z2(0, 0), F), F), 1e-15);
  for (int t = 0; t < 5; ++t) {
    Vec a = z2(h * rng.integer(-8, 8), h * rng.integer(-8, 8)), b = z2(h * rng.integer(-8, 8), h * rng.integer(-8, 8));
    double sab = sigma(a, b);
    GridFunctionZ ba = t_ph(b, t_ph(a, F)), ab = t_ph(a, t_ph(b, F));
    EXPECT_LT(max_abs_diff(ba, scaled(ab, std::exp(-I_unit * sab))), 1e-10 * max_abs(F));
    GridFunctionZ sum = t_ph(a + b, F);
    EXPECT_LT(max_abs_diff(ab, scaled(sum, std::exp(0.5 * I_unit * sab))), 1e-10 * max_abs(F));
  }
}

TEST(Heisenberg, CentralPhaseAndGroupLaw) {
  Rng rng(7);
  const double h = kSd.step();
  GridFunctionZ F = u_phi(state(rng), WindowState::gaussian(kSd));
  EXPECT_LT(max_abs_diff(t_ph_heisenberg(z2(0, 0), 0.7, F), scaled(F, std::exp(0.7 * I_unit))), 1e-15);
  for (int t = 0; t < 5; ++t) {
    Vec a = z2(h * rng.integer(-8, 8), h * rng.integer(-8, 8)), b = z2(h * rng.integer(-8, 8), h * rng.integer(-8, 8));
    double ta = rng.uniform(-1, 1), tb = rng.uniform(-1, 1);
    GridFunctionZ lhs = t_ph_heisenberg(a, ta, t_ph_heisenberg(b, tb, F));
    GridFunctionZ rhs = t_ph_heisenberg(a + b, ta + tb + 0.5 * sigma(a, b), F);
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-10 * max_abs(F));
  }
}

TEST(Heisenberg, SchroedingerSide) {
  Rng rng(8);
  const double h = kSd.step();
  GridFunctionX f = state(rng);
  EXPECT_LT(rel_l2(heisenberg_weyl(z2(0, 0), 0, f), f), 1e-15);
  WindowState win = WindowState::gaussian(kSd);
  for (int t = 0; t < 4; ++t) {
    Vec a = z2(h * rng.integer(-8, 8), h * rng.integer(-8, 8)), b = z2(h * rng.integer(-8, 8), h * rng.integer(-8, 8));
    double ta = rng.uniform(-1, 1), tb = rng.uniform(-1, 1);
    GridFunctionX Tf = heisenberg_weyl(a, ta, f);
    EXPECT_NEAR(Tf.norm(), f.norm(), 1e-14 * f.norm());
    GridFunctionX lhs = heisenberg_weyl(a, ta, heisenberg_weyl(b, tb, f));
    GridFunctionX rhs = heisenberg_weyl(a + b, ta + tb + 0.5 * sigma(a, b), f);
    EXPECT_LT(rel_l2(lhs, rhs), 1e-10);
    // intertwining with the phase-space representation
    EXPECT_LT(rel_l2(t_ph_heisenberg(a, ta, u_phi(f, win)), u_phi(Tf, win)), 1e-6);
  }
}

TEST(Heisenberg, OffLatticeRejected) {
  GridFunctionZ F(kSd, kSd);
  EXPECT_THROW(t_ph(z2(0.5 * kSd.step(), 0), F), Error);
}

// ---------------------------------------------------------------------------
// x_ph, p_ph and the oscillator

TEST(Ladder, IntertwiningRelations) {
  Rng rng(9);
  WindowState win = WindowState::gaussian(kSd);
  for (int t = 0; t < 3; ++t) {
    GridFunctionX f = state(rng);
    GridFunctionZ U = u_phi(f, win);
    EXPECT_LT(rel_l2(zhat_ph_apply(ZComponent::x, U), u_phi(times_x(f), win)), 1e-5);
    GridFunctionX df = f;
    df.values = spectral_derivative(f.values, f.axis);
    for (cd& v : df.values) v *= -I_unit;
    EXPECT_LT(rel_l2(zhat_ph_apply(ZComponent::p, U), u_phi(df, win)), 1e-5);
  }
}

TEST(Ladder, CanonicalCommutator) {
  Rng rng(10);
  GridFunctionZ F = u_phi(state(rng), WindowState::gaussian(kSd));
  GridFunctionZ xp = zhat_ph_apply(ZComponent::x, zhat_ph_apply(ZComponent::p, F));
  GridFunctionZ px = zhat_ph_apply(ZComponent::p, zhat_ph_apply(ZComponent::x, F));
  EXPECT_LT(rel_l2(xp - px, scaled(F, I_unit)), 1e-6);
}

TEST(Ladder, ConstantFunction) {
  GridFunctionZ C = GridFunctionZ::sample(kSd, kSd, [](double, double) { return cd(2.0); });
  GridFunctionZ X = zhat_ph_apply(ZComponent::x, C);
  double worst = 0;
  for (int j = 0; j < C.nx(); ++j)
    for (int m = 0; m < C.np(); ++m) worst = std::max(worst, std::abs(X.at(j, m) - C.x(j)));
  EXPECT_LT(worst, 1e-12);
}

TEST(Oscillator, Eigenrelations) {
  WindowState win = WindowState::gaussian(kSd);
  GridFunctionZ U0 = u_phi(gaussian_phi0(1, kSd), win);
  EXPECT_LT(rel_l2(harmonic_oscillator_ph(U0), scaled(U0, 0.5)), 1e-5);
  GridFunctionZ U1 = u_phi(normalized(times_x(gaussian_phi0(1, kSd))), win);
  EXPECT_LT(rel_l2(harmonic_oscillator_ph(U1), scaled(U1, 1.5)), 1e-5);
}

TEST(Oscillator, RoutesAndIntertwining) {
  Rng rng(11);
  WindowState win = WindowState::gaussian(kSd);
  GridFunctionX f = state(rng);
  GridFunctionZ U = u_phi(f, win);
  EXPECT_LT(rel_l2(harmonic_oscillator_ph_ladder(U), harmonic_oscillator_ph(U)), 1e-8);
  EXPECT_LT(rel_l2(harmonic_oscillator_ph(U), u_phi(harmonic_oscillator_x(f), win)), 1e-6);
}

// ---------------------------------------------------------------------------
// A_ph

TEST(APh, DeltaSymbolIsIdentity) {
  Rng rng(12);
  GridFunctionZ F = u_phi(state(rng), WindowState::gaussian(kSd));
  GridFunctionZ d(kSd, kSd);
  d.at(kSd.N / 2, kSd.N / 2) = 2 * pi / d.cell();
  EXPECT_LT(rel_l2(a_ph_apply(d, F), F), 1e-10);
}

TEST(APh, FastRouteMatchesDense) {
  Rng rng(13);
  const Axis a = self_dual_axis(64);
  GaussianSymbol s = random_gaussian_symbol(rng);
  GridFunctionZ as = sample_twisted(s, a, a);
  GridFunctionZ F = u_phi(state(rng, a), WindowState::gaussian(a));
  EXPECT_LT(rel_l2(a_ph_apply(as, F), a_ph_apply_dense(as, F)), 1e-10);
}

TEST(APh, Intertwining) {
  Rng rng(14);
  WindowState win = WindowState::gaussian(kSd);
  GaussianSymbol s = random_gaussian_symbol(rng);
  GridFunctionZ as = sample_twisted(s, kSd, kSd);
  GridFunctionX f = state(rng);
  EXPECT_LT(rel_l2(a_ph_apply(as, u_phi(f, win)), u_phi(weyl_apply_x(s, f), win)), 1e-5);
}

TEST(APh, CompositionIsTwistedConvolution) {
  Rng rng(15);
  // at N = 64 the state's wrap on the torus already shows at 1e-8
  const Axis a = self_dual_axis(128);
  GaussianSymbol sa = random_gaussian_symbol(rng), sb = random_gaussian_symbol(rng);
  GridFunctionZ A = sample_twisted(sa, a, a), B = sample_twisted(sb, a, a);
  // c(w) = (2 pi)^{-1} int a(z) b(w - z) e^{(i/2) sigma(z, w)} dz on the lattice
  const int N = a.N;
  GridFunctionZ C(a, a);
  for (int jw = 0; jw < N; ++jw)
    for (int mw = 0; mw < N; ++mw) {
      cd acc = 0;
      for (int j = 0; j < N; ++j) {
        int jd = jw - j + N / 2;
        if (jd < 0 || jd >= N) continue;
        for (int m = 0; m < N; ++m) {
          int md = mw - m + N / 2;
          if (md < 0 || md >= N) continue;
          double sg = C.p(m) * C.x(jw) - C.p(mw) * C.x(j);
          acc += A.at(j, m) * B.at(jd, md) * std::exp(0.5 * I_unit * sg);
        }
      }
      C.at(jw, mw) = acc * C.cell() / (2 * pi);
    }
  GridFunctionZ F = u_phi(state(rng, a), WindowState::gaussian(a));
  EXPECT_LT(rel_l2(a_ph_apply(C, F), a_ph_apply(A, a_ph_apply(B, F))), 1e-10);
}

// ---------------------------------------------------------------------------
// range of U_{phi0}

TEST(CauchyRiemann, MembersAndGenericFunctions) {
  Rng rng(16);
  WindowState win = WindowState::gaussian(kSd);
  EXPECT_LT(cr_condition_residual(u_phi(state(rng), win)), 1e-4);
  EXPECT_LT(cr_condition_residual(u_phi(times_x(gaussian_phi0(1, kSd)), win)), 1e-4);
  GridFunctionZ G = GridFunctionZ::sample(kSd, kSd, [](double x, double p) {
    return cd(std::exp(-0.5 * ((x - 0.5) * (x - 0.5) + p * p)) * std::cos(x * p), 0.0);
  });
  EXPECT_GT(cr_condition_residual(G), 0.1);
}

// ---------------------------------------------------------------------------
// metaplectic covariance

TEST(Covariance, IdentityWord) {
  Rng rng(17);
  WindowState win = WindowState::gaussian(kSd);
  std::vector<GridFunctionX> battery{state(rng)};
  EXPECT_LT(metaplectic_covariance_check(MetaplecticWord::identity(1), random_gaussian_symbol(rng), battery, win), 1e-10);
}

TEST(Covariance, JWithRotationInvariantSymbol) {
  Rng rng(18);
  WindowState win = WindowState::gaussian(kSd);
  MetaplecticWord w(1, {Factor::Jhat()});
  GaussianSymbol s{cd(1.0, 0.0), 0.7 * Mat::Identity(2, 2), Vec::Zero(2)};
  GaussianSymbol sS = s.composed(w.projection());
  EXPECT_LT((sS.G - s.G).norm() + sS.zc.norm(), 1e-14);
  std::vector<GridFunctionX> battery{state(rng)};
  EXPECT_LT(metaplectic_covariance_check(w, s, battery, win), 1e-5);
}

TEST(Covariance, GeneratorWithRandomSymbol) {
  Rng rng(19);
  WindowState win = WindowState::gaussian(kSd);
  MetaplecticWord w = MetaplecticWord::single(q1(0.3, 0.9, -0.2)).expanded();
  std::vector<GridFunctionX> battery{state(rng)};
  EXPECT_LT(metaplectic_covariance_check(w, random_gaussian_symbol(rng), battery, win), 1e-5);
}

TEST(WindowRule, IdentityAndJ) {
  Rng rng(20);
  WindowState win = WindowState::gaussian(kSd);
  std::vector<GridFunctionX> battery{state(rng), state(rng)};
  EXPECT_LT(window_transform_rule_check(MetaplecticWord::identity(1), win, battery, rng, 50), 1e-12);
  MetaplecticWord j(1, {Factor::Jhat()});
  EXPECT_LT(window_transform_rule_check(j, win, battery, rng, 50), 1e-5);
  // both sides are isometric images of f
  GridFunctionX cphi = win.phi;
  for (cd& v : cphi.values) v = std::conj(v);
  GridFunctionX phiS = apply_word(j.inverse().expanded(), cphi);
  for (cd& v : phiS.values) v = std::conj(v);
  const GridFunctionX& f = battery[0];
  EXPECT_NEAR(u_phi(apply_word(j, f), win).norm(), u_phi(f, WindowState(phiS)).norm(), 1e-8);
}
