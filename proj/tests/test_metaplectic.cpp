#include <gtest/gtest.h>

#include "sympl/metaplectic.hpp"

using namespace sympl;

namespace {

const Axis kAx{0.0, 12.0, 256};

Mat m1(double a) { return Mat::Constant(1, 1, a); }

bool throws_kind(ErrorKind k, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == k;
  }
  return false;
}

QuadraticFourierTransform q1(double P, double L, double Q, int m = -1) {
  return {{m1(P), m1(L), m1(Q)}, m < 0 ? default_m(m1(L)) : m};
}

GridFunctionX scaled(GridFunctionX f, cd c) {
  for (cd& v : f.values) v *= c;
  return f;
}

GridFunctionX test_state(Rng& rng) { return gaussian_superposition(1, kAx, rng, 3, 1.0); }

}  // namespace

// ---------------------------------------------------------------------------
// generators

TEST(Generators, JOnGroundStateIsPhase) {
  GridFunctionX phi = gaussian_phi0(1, kAx);
  GridFunctionX g = apply_j(phi, 1);
  cd ph = g.values[kAx.N / 2] / phi.values[kAx.N / 2];
  EXPECT_NEAR(std::abs(ph), 1.0, 1e-12);
  double worst = 0;
  for (int j = 0; j < kAx.N; ++j) {
    worst = std::max(worst, std::abs(std::abs(g.values[j]) - std::abs(phi.values[j])));
    worst = std::max(worst, std::abs(g.values[j] - ph * phi.values[j]));
  }
  EXPECT_LT(worst, 1e-12);
  EXPECT_LT(std::abs(ph - std::exp(-I_unit * (pi / 4))), 1e-12);
}

TEST(Generators, TrivialFactorsAreIdentity) {
  Rng rng(1);
  GridFunctionX f = test_state(rng);
  EXPECT_LT(rel_l2(apply_v(m1(0), f), f), 1e-15);
  EXPECT_LT(rel_l2(apply_m(m1(1), 0, f), f), 1e-13);  // interpolation round-off
}

TEST(Generators, UnitarityOnRandomStates) {
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    GridFunctionX f = test_state(rng);
    double n0 = f.norm();
    EXPECT_NEAR(apply_v(m1(rng.uniform(-1, 1)), f).norm() / n0, 1, 1e-12);
    EXPECT_NEAR(apply_m(m1(-1.2), 1, f).norm() / n0, 1, 1e-9);
    EXPECT_NEAR(apply_j(f, -1).norm() / n0, 1, 1e-12);
    EXPECT_NEAR(apply_swm(q1(0.3, 0.9, -0.2), f).norm() / n0, 1, 1e-9);
  }
}

TEST(Generators, MParityMustMatchDeterminant) {
  EXPECT_TRUE(throws_kind(ErrorKind::validation, [] { MetaplecticWord(1, {Factor::Mult(m1(-1), 0)}); }));
  EXPECT_TRUE(throws_kind(ErrorKind::validation, [] { q1(0, -1, 0, 2).validate(); }));
}

TEST(FactorSwm, PlainJWordIsJUpToPhase) {
  Rng rng(3);
  GridFunctionX f = test_state(rng);
  for (int m : {0, 2}) {
    QuadraticFourierTransform q = q1(0, 1, 0, m);
    GridFunctionX word = apply_word(factor_swm(q), f);
    EXPECT_LT(rel_l2(word, scaled(apply_j(f, 1), i_pow(m))), 1e-12);
  }
}

TEST(FactorSwm, MatchesDenseQuadrature) {
  Rng rng(4);
  for (int t = 0; t < 4; ++t) {
    QuadraticFourierTransform q = random_generator(1, rng);
    GridFunctionX f = test_state(rng);
    GridFunctionX dense = apply_swm_dense(q, f);
    EXPECT_LT(rel_l2(apply_word(factor_swm(q), f), dense), 1e-8);
    EXPECT_LT(rel_l2(apply_swm(q, f), dense), 1e-10);
  }
}

TEST(FactorSwm, ProjectionIsSW) {
  Rng rng(5);
  for (int n = 1; n <= 3; ++n) {
    QuadraticFourierTransform q = random_generator(n, rng);
    EXPECT_LT(rel_err(factor_swm(q).projection().mat(), free_from_generating(q.W).mat()), 1e-12);
  }
}

TEST(Resolution, UnderResolvedKernelRejected) {
  Rng rng(6);
  GridFunctionX f = test_state(rng);
  EXPECT_TRUE(throws_kind(ErrorKind::resolution, [&] { apply_swm(q1(40, 1, 0), f); }));
}

// ---------------------------------------------------------------------------
// symbols

TEST(TwistedSymbol, Examples) {
  GaussianTwistedSymbol a = twisted_symbol(SymplecticMatrix(-Mat::Identity(2, 2)), 1);
  EXPECT_NEAR(a.amplitude, 0.5, 1e-15);
  EXPECT_LT(a.M.norm(), 1e-15);
  EXPECT_LT(std::abs(a(Vec::Random(2)) - I_unit * 0.5), 1e-15);

  GaussianTwistedSymbol j = twisted_symbol(SymplecticMatrix::J(1), 0);
  EXPECT_NEAR(j.amplitude, std::sqrt(0.5), 1e-15);
  EXPECT_LT((j.M - 0.5 * Mat::Identity(2, 2)).norm(), 1e-15);

  Rng rng(7);
  SymplecticMatrix S = random_symplectic_nondegenerate(2, rng);
  EXPECT_LT(rel_err(twisted_symbol(S.inverse(), -3).M, -twisted_symbol(S, 3).M), 1e-9);
  EXPECT_EQ(twisted_symbol(S.inverse(), -3).nu, 1);
}

TEST(PlainSymbol, MinusIdentityIsNotGaussian) {
  EXPECT_TRUE(throws_kind(ErrorKind::domain, [] { plain_weyl_symbol(SymplecticMatrix(-Mat::Identity(2, 2)), 0); }));
}

TEST(PlainSymbol, J) {
  GaussianWeylSymbol a = plain_weyl_symbol(SymplecticMatrix::J(1), 0);
  EXPECT_NEAR(std::abs(a.c), std::sqrt(2.0), 1e-14);
  EXPECT_LT((a.Q + 2 * Mat::Identity(2, 2)).norm(), 1e-14);
}

TEST(PlainSymbol, MatchesFresnelOfTwistedSymbol) {
  Rng rng(8);
  int done = 0;
  while (done < 10) {
    int n = 1 + done % 2;
    SymplecticMatrix S = random_symplectic_nondegenerate(n, rng, 0.1);
    int nu = rng.integer(0, 3);
    GaussianTwistedSymbol t = twisted_symbol(S, nu);
    GaussianWeylSymbol a;
    try {
      a = plain_weyl_symbol(S, nu);
    } catch (const Error&) {
      continue;
    }
    for (int k = 0; k < 5; ++k) {
      Vec z = Vec::Random(2 * n);
      EXPECT_LT(std::abs(a(z) - plain_symbol_fresnel(t, z)), 1e-9 * std::max(1.0, std::abs(a(z))));
    }
    ++done;
  }
}

TEST(ComposeTwisted, ProductMatchesCayleyOfProduct) {
  Rng rng(9);
  int done = 0;
  while (done < 10) {
    int n = 1 + done % 3;
    SymplecticMatrix S = random_symplectic(n, rng), Sp = random_symplectic(n, rng);
    if (std::abs(S.det_minus_identity()) < 0.1 || std::abs(Sp.det_minus_identity()) < 0.1 ||
        std::abs((S * Sp).det_minus_identity()) < 0.1 ||
        std::abs((cayley_transform(S) + cayley_transform(Sp)).determinant()) < 0.1)
      continue;
    ComposeCheck chk;
    GaussianTwistedSymbol c = compose_twisted(twisted_symbol(S, 0), twisted_symbol(Sp, 1), &chk);
    EXPECT_LT(rel_err(c.M, cayley_transform(S * Sp)), 1e-9);
    EXPECT_LT(chk.amp_err, 1e-9);
    ++done;
  }
}

TEST(ComposeTwisted, HalfRotation) {
  SymplecticMatrix J = SymplecticMatrix::J(1);
  for (int nu : {0, 3}) {
    GaussianTwistedSymbol c = compose_twisted(twisted_symbol(J, nu), twisted_symbol(J, 1));
    EXPECT_EQ(c.nu, mod4(nu + 1 + 1));
    EXPECT_LT(c.M.norm(), 1e-14);
  }
}

// ---------------------------------------------------------------------------
// R_nu on grids

TEST(RNu, JSymbolMatchesGenerator) {
  Rng rng(10);
  QuadraticFourierTransform q = q1(0, 1, 0);
  int nu = nu_mod4(MetaplecticWord::single(q));
  EXPECT_EQ(nu, 3);
  GaussianTwistedSymbol a = twisted_symbol(q.projection(), nu);
  for (int t = 0; t < 3; ++t) {
    GridFunctionX f = test_state(rng);
    GridFunctionX r = r_nu_apply(a, f);
    EXPECT_LT(rel_l2(r, apply_swm(q, f)), 1e-6);
    EXPECT_NEAR(r.norm() / f.norm(), 1.0, 1e-6);
  }
}

TEST(RNu, InverseSymbolUndoes) {
  Rng rng(11);
  SymplecticMatrix J = SymplecticMatrix::J(1);
  GridFunctionX f = test_state(rng);
  GridFunctionX back = r_nu_apply(twisted_symbol(J.inverse(), -3), r_nu_apply(twisted_symbol(J, 3), f));
  EXPECT_LT(rel_l2(back, f), 1e-8);
}

TEST(RNu, ComposeThenApply) {
  Rng rng(12);
  // a product near -I would have an unresolvable kernel on this box
  QuadraticFourierTransform qa = q1(0.3, 0.9, -0.2), qb = q1(-0.6, 0.8, 0.3);
  SymplecticMatrix S = qa.projection(), Sp = qb.projection();
  GaussianTwistedSymbol a = twisted_symbol(S, nu_of_generator(qa)), b = twisted_symbol(Sp, nu_of_generator(qb));
  GaussianTwistedSymbol c = compose_twisted(a, b);
  GridFunctionX f = test_state(rng);
  GridFunctionX rb = r_nu_apply(b, f);
  ASSERT_LT(edge_mass(rb), 1e-14);
  EXPECT_LT(rel_l2(r_nu_apply(c, f), r_nu_apply(a, rb)), 1e-6);
  // and the same operator as the word
  EXPECT_LT(rel_l2(r_nu_apply(c, f), apply_swm(qa, apply_swm(qb, f))), 1e-6);
}

TEST(RNu, TruncatedInputRejected) {
  GridFunctionX f = GridFunctionX::sample(1, kAx, [](const Vec& x) { return cd(std::exp(-0.02 * x[0] * x[0])); });
  EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { r_nu_apply(twisted_symbol(SymplecticMatrix::J(1), 3), f); }));
}

// ---------------------------------------------------------------------------
// words

TEST(FreePair, AdmissiblePairUnchanged) {
  QuadraticFourierTransform a = q1(0.3, 0.9, -0.2), b = q1(-0.4, 1.1, 0.25);
  FreePair fp = free_pair_factorization(MetaplecticWord::pair(a, b));
  EXPECT_EQ(fp.lambda, 0.0);
  EXPECT_LT((fp.first.W.Q - a.W.Q).norm() + (fp.second.W.P - b.W.P).norm(), 1e-15);
}

TEST(FreePair, JJ) {
  Rng rng(13);
  QuadraticFourierTransform j = q1(0, 1, 0);
  MetaplecticWord w = MetaplecticWord::pair(j, j);
  FreePair fp = free_pair_factorization(w);
  EXPECT_GE(std::abs(fp.det_first), 1e-6);
  EXPECT_GE(std::abs(fp.det_second), 1e-6);
  GridFunctionX f = test_state(rng);
  GridFunctionX ref = apply_word(w, f);
  EXPECT_LT(rel_l2(apply_word(MetaplecticWord::pair(fp.first, fp.second), f), ref), 1e-7);
}

TEST(FreePair, DegenerateFactorIsShifted) {
  Rng rng(14);
  // P + Q = 2L makes det(S_W - I) vanish for the first factor
  QuadraticFourierTransform a = q1(0.2, 0.3, 0.4), b = q1(0.3, 0.8, 0.1);
  ASSERT_LT(std::abs(a.projection().det_minus_identity()), 1e-12);
  MetaplecticWord w = MetaplecticWord::pair(a, b);
  FreePair fp = free_pair_factorization(w);
  EXPECT_NE(fp.lambda, 0.0);
  EXPECT_GE(std::abs(fp.det_first), 1e-6);
  EXPECT_GE(std::abs(fp.det_second), 1e-6);
  GridFunctionX f = test_state(rng);
  EXPECT_LT(rel_l2(apply_word(MetaplecticWord::pair(fp.first, fp.second), f), apply_word(w, f)), 1e-7);
}

TEST(NuOfWord, JGenerator) {
  EXPECT_EQ(nu_of_word(MetaplecticWord::single(q1(0, 1, 0))), 3);
}

TEST(NuOfWord, AgreesWithPathRoute) {
  Rng rng(15);
  int done = 0;
  while (done < 12) {
    int n = 1 + done % 3;
    MetaplecticWord w = done % 2 ? MetaplecticWord::single(random_generator(n, rng))
                                 : MetaplecticWord::pair(random_generator(n, rng), random_generator(n, rng));
    if (std::abs(w.projection().det_minus_identity()) < 1e-3) continue;
    int nu;
    try {
      nu = nu_of_word(w);
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::search);
      continue;
    }
    EXPECT_EQ(nu, nu_mod4(w, rng));
    ++done;
  }
}

TEST(MaslovHat, GeneratorValue) {
  for (int m : {0, 2}) EXPECT_EQ(maslov_hat_m(MetaplecticWord::single(q1(0.2, 1.3, 0.1, m))), m);
  for (int m : {1, 3}) EXPECT_EQ(maslov_hat_m(MetaplecticWord::single(q1(0.2, -1.3, 0.1, m))), m);
}

TEST(MaslovHat, ProductLaw) {
  Rng rng(16);
  int done = 0;
  while (done < 20) {
    int n = 1 + done % 3;
    QuadraticFourierTransform a = random_generator(n, rng), b = random_generator(n, rng);
    MetaplecticWord w = MetaplecticWord::pair(a, b);
    const LagrangianFrame Xs = LagrangianFrame::p_plane(n);
    SymplecticMatrix S1 = a.projection(), S12 = w.projection();
    if (intersection_dim(Xs, Xs.transformed(S12)) != 0) continue;
    int inert = leray_inertia(Xs, Xs.transformed(S1), Xs.transformed(S12));
    EXPECT_EQ(maslov_hat_m(w), mod4(a.m + b.m + inert - n));
    ++done;
  }
}

TEST(MaslovHat, MatchesPathLift) {
  Rng rng(17);
  int done = 0;
  while (done < 12) {
    int n = 1 + done % 3;
    MetaplecticWord w = MetaplecticWord::pair(random_generator(n, rng), random_generator(n, rng));
    const LagrangianFrame Xs = LagrangianFrame::p_plane(n);
    if (intersection_dim(Xs, Xs.transformed(w.projection())) != 0) continue;
    EXPECT_EQ(maslov_hat_m(w), mod4(reduced_m_ell(w.path(), Xs, rng)));
    ++done;
  }
}
