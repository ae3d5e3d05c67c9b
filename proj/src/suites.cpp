#include <sympl/harness/suites.hpp>

#include <sympl/phase_space.hpp>

#include <atomic>
#include <chrono>
#include <thread>

namespace sympl::harness {

namespace {

int perm_sign(const std::array<int, 3>& p) {
  int inv = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

// m = (mu + n + dim) / 2 without recomputing mu
int reduced_from(int mu, int n, int d) {
  int s = mu + n + d;
  if (s % 2) fail(ErrorKind::integrality, "mu + n + dim = ", s, " is odd");
  return s / 2;
}

SymplecticPathLift random_path(int n, Rng& rng, double a = 2.0) {
  return SymplecticPathLift::hamiltonian(random_symmetric(2 * n, rng, a));
}

int nonzero_r(Rng& rng) {
  int r = rng.integer(1, 2);
  return rng.uniform() < 0.5 ? -r : r;
}

// ---------------------------------------------------------------------------

void kashiwara_instance(long idx, Rng& rng, Recorder& rec) {
  const int n = 1 + static_cast<int>(idx % 4);
  std::vector<LagrangianFrame> l;
  if (idx % 3 == 1) {
    // planes meeting in a k-dimensional subspace
    auto [a, b] = stratified_pair(n, rng.integer(1, n), rng);
    l = {a, b, random_lagrangian(n, rng)};
  } else {
    l = {random_lagrangian(n, rng), random_lagrangian(n, rng), random_lagrangian(n, rng)};
  }
  const int t = kashiwara_signature(l[0], l[1], l[2]);

  std::array<int, 3> p{0, 1, 2};
  do {
    rec.exact("tau.antisymmetry", kashiwara_signature(l[p[0]], l[p[1]], l[p[2]]), perm_sign(p) * t);
  } while (std::next_permutation(p.begin(), p.end()));
  rec.exact("tau.repeated_plane", kashiwara_signature(l[0], l[0], l[1]), 0);
  rec.exact("tau.repeated_plane", kashiwara_signature(l[1], l[2], l[2]), 0);

  SymplecticMatrix S = random_symplectic(n, rng);
  rec.exact("tau.symplectic_invariance",
            kashiwara_signature(l[0].transformed(S), l[1].transformed(S), l[2].transformed(S)), t);

  LagrangianFrame l4 = random_lagrangian(n, rng);
  int cocycle = t - kashiwara_signature(l[1], l[2], l4) + kashiwara_signature(l[0], l[2], l4) -
                kashiwara_signature(l[0], l[1], l4);
  rec.exact("tau.cocycle", cocycle, 0);

  int d = intersection_dim(l[0], l[1]) + intersection_dim(l[1], l[2]) + intersection_dim(l[2], l[0]);
  rec.exact("tau.parity", mod4(t + n + d) % 2, 0);

  // sum of n one-dimensional triples
  {
    std::array<LagrangianFrame, 3> acc{random_lagrangian(1, rng), random_lagrangian(1, rng), random_lagrangian(1, rng)};
    int sum = kashiwara_signature(acc[0], acc[1], acc[2]);
    for (int k = 1; k < n; ++k) {
      std::array<LagrangianFrame, 3> one{random_lagrangian(1, rng), random_lagrangian(1, rng),
                                         random_lagrangian(1, rng)};
      sum += kashiwara_signature(one[0], one[1], one[2]);
      for (int j = 0; j < 3; ++j) acc[j] = direct_sum(acc[j], one[j]);
    }
    rec.exact("tau.additivity", kashiwara_signature(acc[0], acc[1], acc[2]), sum);
  }
  if (n < 4) {
    const int m = rng.integer(1, 4 - n);
    std::array<LagrangianFrame, 3> o{random_lagrangian(m, rng), random_lagrangian(m, rng), random_lagrangian(m, rng)};
    rec.exact("tau.additivity",
              kashiwara_signature(direct_sum(l[0], o[0]), direct_sum(l[1], o[1]), direct_sum(l[2], o[2])),
              t + kashiwara_signature(o[0], o[1], o[2]));
  }

  if (intersection_dim(l[0], l[2]) == 0) rec.exact("tau.projection_route", kashiwara_transversal(l[0], l[1], l[2]), t);
  if (d == 0) rec.exact("tau.leray_inertia", 2 * leray_inertia(l[0], l[1], l[2]) - n, t);

  if (idx < 50) {
    // tau(X*, l_A, X) = sign A
    Mat A = random_symmetric(n, rng, 1.5);
    while (inertia(A).n_zero) A = random_symmetric(n, rng, 1.5);
    rec.exact("tau.graph_signature",
              kashiwara_signature(LagrangianFrame::p_plane(n), LagrangianFrame::graph(A), LagrangianFrame::x_plane(n)),
              inertia(A).signature());
  }
}

// ---------------------------------------------------------------------------

LagLift random_lift(int n, Rng& rng) { return LagLift::of(random_lagrangian(n, rng)).shifted(rng.integer(-2, 2)); }

void alm_instance(long idx, Rng& rng, Recorder& rec) {
  const int n = 1 + static_cast<int>(idx % 3);
  LagLift a, b, c;
  if (idx % 4 == 2) {
    auto [x, y] = stratified_pair(n, rng.integer(1, n), rng);
    a = LagLift::of(x).shifted(rng.integer(-2, 2));
    b = LagLift::of(y).shifted(rng.integer(-2, 2));
  } else {
    a = random_lift(n, rng);
    b = random_lift(n, rng);
  }
  c = random_lift(n, rng);
  const LagrangianFrame la = a.plane(), lb = b.plane(), lc = c.plane();

  AlmDetail dab = alm_index_detail(a, b, rng);
  const int mab = dab.value, mac = alm_index(a, c, rng), mbc = alm_index(b, c, rng);
  rec.exact("mu.cocycle", mab - mac + mbc, kashiwara_signature(la, lb, lc));
  rec.exact("mu.antisymmetry", alm_index(b, a, rng), -mab);
  rec.exact("mu.self", alm_index(a, a, rng), 0);
  rec.exact("mu.parity", mod4(mab + n + intersection_dim(la, lb)) % 2, 0);

  const int r = rng.integer(-3, 3), rp = rng.integer(-3, 3);
  rec.exact("mu.lift_shift", alm_index(a.shifted(r), b.shifted(rp), rng), mab + 2 * (r - rp));

  {
    const int m = rng.integer(1, 2);
    LagLift a2 = random_lift(m, rng), b2 = random_lift(m, rng);
    rec.exact("mu.additivity", alm_index(a.direct_sum(a2), b.direct_sum(b2), rng), mab + alm_index(a2, b2, rng));
  }

  {
    SymplecticPathLift path = random_path(n, rng, 1.5);
    rec.exact("mu.symplectic_invariance", alm_index(act_on_lift(path, a), act_on_lift(path, b), rng), mab);
  }

  for (const auto& [x, y] : {std::pair{a, c}, std::pair{b, c}, std::pair{a, b}}) {
    AlmDetail dd = alm_index_detail(x, y, rng);
    if (dd.transversal) rec.check("mu.transversal_integrality", std::abs(dd.raw - dd.value), 1e-6);
  }

  if (!dab.transversal) {
    // the auxiliary plane must not matter
    Rng other(rng.next());
    rec.exact("mu.auxiliary_independence", alm_index(a, b, other), mab);
  }
}

// ---------------------------------------------------------------------------

void maslov_instance(long idx, Rng& rng, Recorder& rec) {
  const int n = 1 + static_cast<int>(idx % 3);
  SymplecticPathLift p1 = random_path(n, rng), p2 = random_path(n, rng);
  SymplecticPathLift p12 = SymplecticPathLift::concat(p1, p2);
  LagrangianFrame l = random_lagrangian(n, rng), lp = random_lagrangian(n, rng);
  SymplecticMatrix S = p1.end_matrix(), Sp = p2.end_matrix(), SSp = S * Sp;

  const int mu1 = maslov_mu_ell(p1, l, rng), mu2 = maslov_mu_ell(p2, l, rng), mu12 = maslov_mu_ell(p12, l, rng);
  const int tau = kashiwara_signature(l, l.transformed(S), l.transformed(SSp));
  rec.exact("mu_ell.product", mu12, mu1 + mu2 + tau);

  rec.exact("mu_ell.identity", maslov_mu_ell(SymplecticPathLift::constant(n), l, rng), 0);
  rec.exact("mu_ell.inverse", maslov_mu_ell(p1.inverse(), l, rng), -mu1);

  const int r = nonzero_r(rng);
  const int mu_a = maslov_mu_ell(SymplecticPathLift::prepend_alpha(p1, r), l, rng);
  rec.exact("mu_ell.alpha_shift", mu_a, mu1 + 4 * r);

  const LagrangianFrame Sl = l.transformed(S), Slp = lp.transformed(S);
  const int mu1p = maslov_mu_ell(p1, lp, rng);
  rec.exact("mu_ell.change_of_plane", mu1 - mu1p,
            kashiwara_signature(Sl, l, lp) - kashiwara_signature(Sl, Slp, lp));
  rec.exact("mu_ell.change_of_plane", mu1 - mu1p,
            kashiwara_signature(Sl, l, Slp) - kashiwara_signature(l, Slp, lp));

  const int d1 = intersection_dim(Sl, l);
  const int d2 = intersection_dim(l.transformed(Sp), l);
  const int d12 = intersection_dim(l.transformed(SSp), l);
  rec.exact("mu_ell.parity", mod4(mu1 + n + d1) % 2, 0);

  const int m1 = reduced_from(mu1, n, d1), m2 = reduced_from(mu2, n, d2), m12 = reduced_from(mu12, n, d12);
  const int twice = tau - n + d12 - d1 - d2;
  if (twice % 2) rec.error("m_ell.product", "tau - n + dims is odd");
  else rec.exact("m_ell.product", m12, m1 + m2 + twice / 2);
  rec.exact("m_ell.reduced_route", reduced_m_ell(p1, l, rng), m1);
  rec.exact("m_ell.alpha_shift", reduced_from(mu_a, n, d1), m1 + 2 * r);

  const int rl = idx % 10 == 0 ? 1 : rng.integer(-2, 2);
  rec.exact("loop.alpha_degree", loop_maslov_index(SymplecticPathLift::alpha_loop(n, rl)), rl);
}

// ---------------------------------------------------------------------------

void cayley_instance(long idx, Rng& rng, Recorder& rec) {
  const int n = 1 + static_cast<int>(idx % 4);
  const double tol = 1e-8;
  SymplecticMatrix S = random_symplectic_nondegenerate(n, rng, 0.1);
  const Mat I = Mat::Identity(2 * n, 2 * n), J = standard_j(n);
  Mat M = cayley_transform(S);
  rec.check("cayley.symmetric", sym_defect(M) / std::max(1.0, M.norm()), tol);
  Mat bis = 0.5 * J + J * (S.mat() - I).inverse();
  rec.check("cayley.alternative_form", rel_err(M, bis), tol);
  rec.check("cayley.roundtrip", rel_err(cayley_inverse(M).mat(), S.mat()), tol);
  Mat Mi = cayley_transform(S.inverse());
  rec.check("cayley.inverse_negates", (Mi + M).norm() / std::max(1.0, M.norm()), tol);

  // product formula on an admissible pair
  for (int tries = 0;; ++tries) {
    if (tries == 64) {
      rec.error("cayley.product", "no admissible partner after 64 draws");
      break;
    }
    SymplecticMatrix Sp = random_symplectic_nondegenerate(n, rng, 0.1);
    if (std::abs((S * Sp).det_minus_identity()) < 0.1) continue;
    try {
      CayleyProductCheck c = cayley_of_product(S, Sp);
      rec.check("cayley.product", c.direct_err, tol);
      rec.check("cayley.product_inverse_sum", c.inverse_sum_err, tol);
      rec.check("cayley.product_matches_direct", rel_err(c.M, cayley_transform(S * Sp)), tol);
      break;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::validation) {
        rec.error("cayley.product", e.what());
        break;
      }
    }
  }

  // det(S - I) = (-1)^n det B det W_S for free S
  for (int tries = 0; tries < 64; ++tries) {
    SymplecticMatrix F = random_symplectic_nondegenerate(n, rng, 0.1);
    if (!is_free(F) || std::abs(F.B().determinant()) < 1e-3) continue;
    double lhs = F.det_minus_identity();
    double rhs = (n % 2 ? -1.0 : 1.0) * F.B().determinant() * hessian_WS(F).determinant();
    rec.check("cayley.free_determinant", std::abs(lhs - rhs) / std::abs(lhs), tol);
    break;
  }
}

// ---------------------------------------------------------------------------

bool admissible(const SymplecticMatrix& S) { return is_free(S) && std::abs(S.det_minus_identity()) >= 1e-3; }

SymplecticPathLift admissible_path(int n, Rng& rng) {
  for (int tries = 0; tries < 256; ++tries) {
    SymplecticPathLift p = random_path(n, rng, 1.5);
    if (admissible(p.end_matrix())) return p;
  }
  fail(ErrorKind::search, "no admissible path after 256 draws");
}

void nu_instance(long idx, Rng& rng, Recorder& rec) {
  const int n = 1 + static_cast<int>(idx % 3);
  SymplecticPathLift p = admissible_path(n, rng);
  SymplecticMatrix S = p.end_matrix();
  const int nu = nu_via_doubled(p, rng).value;
  rec.exact("nu.route_agreement", nu_via_free(p, rng).value, nu);
  rec.exact("nu.inverse", nu_via_doubled(p.inverse(), rng).value, -nu);

  const int r = nonzero_r(rng);
  rec.exact("nu.alpha_shift", nu_via_doubled(SymplecticPathLift::prepend_alpha(p, r), rng).value, nu + 2 * r);

  // product formula
  for (int tries = 0;; ++tries) {
    if (tries == 64) {
      rec.error("nu.product", "no admissible partner after 64 draws");
      break;
    }
    SymplecticPathLift q = admissible_path(n, rng);
    SymplecticMatrix Sq = q.end_matrix();
    if (std::abs((S * Sq).det_minus_identity()) < 1e-3) continue;
    int expect;
    try {
      expect = nu_of_product(nu, nu_via_doubled(q, rng).value, S, Sq);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::degenerate) continue;
      throw;
    }
    rec.exact("nu.product", nu_via_doubled(SymplecticPathLift::concat(p, q), rng).value, expect);
    break;
  }

  // constant on components of det(S - I) != 0
  for (int tries = 0;; ++tries) {
    if (tries == 64) {
      rec.error("nu.locally_constant", "no nearby endpoint in the same component");
      break;
    }
    SymplecticMatrix Sp(S.mat() * hamiltonian_exp(random_symmetric(2 * n, rng, 0.01)));
    if (Sp.det_minus_identity() * S.det_minus_identity() <= 0) continue;
    try {
      rec.truth("nu.locally_constant", nu_locally_constant_check(p, Sp, rng));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::search) throw;
      continue;
    }
    break;
  }

  double arg = std::arg(cd(S.det_minus_identity(), 0.0));
  rec.check("nu.phase_congruence", std::abs(std::remainder(arg - (nu - n) * pi, 2 * pi)), 1e-6);
}

// ---------------------------------------------------------------------------

double rel_norm_change(const GridFunctionX& g, const GridFunctionX& f) {
  return std::abs(g.norm() - f.norm()) / f.norm();
}

// generator whose R_nu kernel and quadratic phases resolve on the grid
QuadraticFourierTransform resolved_generator(Rng& rng, const Axis& ax, double max_scale = 0.5) {
  for (int tries = 0; tries < 64; ++tries) {
    QuadraticFourierTransform q = random_generator(1, rng, max_scale > 0.5 ? rng.uniform(0.5, max_scale) : 0.5);
    SymplecticMatrix S = q.projection();
    if (std::abs(S.det_minus_identity()) < 1e-2) continue;
    try {
      RNuKernel K(twisted_symbol(S, nu_of_generator(q)));
      if (K.max_gradient(ax) > pi / ax.step()) continue;
    } catch (const Error&) {
      continue;
    }
    if (swm_gradient(q.W, ax) > pi / ax.step()) continue;
    return q;
  }
  fail(ErrorKind::search, "no generator resolvable on the grid after 64 draws");
}

void metaplectic_instance(long idx, Rng& rng, Recorder& rec, const Config& cfg) {
  const Axis ax{0.0, cfg.grid.halfwidth, cfg.grid.N};
  const GridFunctionX f = gaussian_superposition(1, ax, rng, 3, 1.0);
  const double ut = 1e-6;

  QuadraticFourierTransform q = resolved_generator(rng, ax);
  Mat P = random_symmetric(1, rng, 1.0);
  Mat L = Mat::Constant(1, 1, rng.uniform(0.7, 1.4) * (rng.uniform() < 0.5 ? -1 : 1));
  rec.check("unitarity.V", rel_norm_change(apply_v(P, f), f), ut);
  rec.check("unitarity.M", rel_norm_change(apply_m(L, default_m(L), f), f), ut);
  rec.check("unitarity.J", rel_norm_change(apply_j(f, 1), f), ut);
  rec.check("unitarity.Jinv", rel_norm_change(apply_j(f, -1), f), ut);
  const GridFunctionX sw = apply_swm(q, f);
  rec.check("unitarity.SWM", rel_norm_change(sw, f), ut);
  rec.check("swm.factorized_route", rel_l2(apply_word(factor_swm(q), f), sw), ut);
  rec.check("swm.dense_route", rel_l2(apply_swm_dense(q, f), sw), ut);
  rec.check("swm.inverse", rel_l2(apply_word(MetaplecticWord::single(q).inverse(), sw), f), ut);

  const int nu = nu_of_generator(q);
  rec.exact("nu.generator_vs_path", nu, nu_mod4(MetaplecticWord::single(q), rng));
  const SymplecticMatrix S = q.projection();
  const GaussianTwistedSymbol a = twisted_symbol(S, nu);
  const GridFunctionX ra = r_nu_apply(a, f);
  rec.check("unitarity.R_nu", rel_norm_change(ra, f), ut);
  rec.check("r_nu.equals_generator", rel_l2(ra, sw), ut);

  // inversion
  rec.check("r_nu.inverse", rel_l2(r_nu_apply(twisted_symbol(S.inverse(), -nu), ra), f), ut);

  // composition
  for (int tries = 0;; ++tries) {
    if (tries == 32) {
      rec.error("r_nu.composition", "no admissible second factor");
      break;
    }
    // products of two near-J generators sit near -I, where no grid resolves the kernel
    QuadraticFourierTransform q2 = resolved_generator(rng, ax, 2.5);
    SymplecticMatrix S2 = q2.projection();
    if (std::abs((S * S2).det_minus_identity()) < 1e-2) continue;
    GaussianTwistedSymbol b = twisted_symbol(S2, nu_of_generator(q2));
    GaussianTwistedSymbol c;
    GridFunctionX rb = r_nu_apply(b, f);
    try {
      c = compose_twisted(a, b);
      if (RNuKernel(c).max_gradient(ax) > pi / ax.step()) continue;
      // the chain truncates the intermediate state; keep only instances where that loss is invisible
      if (edge_mass(rb) > 1e-14) continue;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::validation) throw;
      continue;
    }
    GridFunctionX two = r_nu_apply(a, rb);
    rec.check("r_nu.composition", rel_l2(r_nu_apply(c, f), two), ut);

    // lambda shift leaves the operator unchanged
    MetaplecticWord w = MetaplecticWord::pair(q, q2);
    const GridFunctionX ref = apply_word(w.expanded(), f);
    FreePair fp = shifted_pair(q, q2, rng.uniform(-1.0, 1.0));
    rec.check("lambda_shift.action",
              rel_l2(apply_word(MetaplecticWord::pair(fp.first, fp.second).expanded(), f), ref), 1e-7);
    FreePair best = free_pair_factorization(w);
    rec.check("lambda_shift.action",
              rel_l2(apply_word(MetaplecticWord::pair(best.first, best.second).expanded(), f), ref), 1e-7);
    break;
  }

  // Maslov index on words, n = 1..3
  const int n = 1 + static_cast<int>(idx % 3);
  for (int tries = 0;; ++tries) {
    if (tries == 64) {
      rec.error("m_hat.product", "no transversal pair");
      break;
    }
    QuadraticFourierTransform g1 = random_generator(n, rng), g2 = random_generator(n, rng);
    MetaplecticWord w = MetaplecticWord::pair(g1, g2);
    const LagrangianFrame Xs = LagrangianFrame::p_plane(n);
    const SymplecticMatrix S1 = g1.projection(), S12 = w.projection();
    if (intersection_dim(Xs, Xs.transformed(S12)) != 0) continue;
    if (std::abs(S12.det_minus_identity()) < 1e-3) continue;
    const int mh = maslov_hat_m(w);
    rec.exact("m_hat.path", mh, mod4(reduced_m_ell(w.path(), Xs, rng)));
    const int inert = leray_inertia(Xs, Xs.transformed(S1), Xs.transformed(S12));
    rec.exact("m_hat.product", mh, mod4(g1.m + g2.m + inert - n));
    try {
      rec.exact("nu.word_vs_path", nu_of_word(w), nu_mod4(w, rng));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate && e.kind() != ErrorKind::search) throw;
      continue;
    }
    break;
  }
}

// ---------------------------------------------------------------------------

GridFunctionX times_x(const GridFunctionX& f) {
  GridFunctionX g = f;
  for (int j = 0; j < f.axis.N; ++j) g.values[j] *= f.axis.x(j);
  return g;
}

GridFunctionX minus_i_deriv(const GridFunctionX& f) {
  GridFunctionX g = f;
  g.values = spectral_derivative(f.values, f.axis);
  for (cd& v : g.values) v *= -I_unit;
  return g;
}

Vec lattice_point(Rng& rng, double h, int reach) {
  Vec z(2);
  z << rng.integer(-reach, reach) * h, rng.integer(-reach, reach) * h;
  return z;
}

void phase_space_instance(long, Rng& rng, Recorder& rec, const Config& cfg) {
  const Axis ax = self_dual_axis(cfg.phase_space_N);
  const Axis ap = ax.reciprocal();
  const double h = ax.step();
  const WindowState win = WindowState::gaussian(ax);
  std::vector<GridFunctionX> bat;
  for (int i = 0; i < 16; ++i) bat.push_back(gaussian_superposition(1, ax, rng, 3, 1.0));
  std::vector<GridFunctionZ> U;
  for (const auto& f : bat) U.push_back(u_phi(f, win));

  for (std::size_t i = 0; i < bat.size(); ++i) {
    const auto& f = bat[i];
    const auto& g = bat[(i + 1) % bat.size()];
    rec.check("parseval", std::abs(inner(U[i], U[(i + 1) % bat.size()]) - inner(f, g)) / (f.norm() * g.norm()), 1e-6);
    rec.check("parseval.norm", std::abs(U[i].norm() - f.norm()) / f.norm(), 1e-6);
    rec.check("u_phi.adjoint_inverts", rel_l2(u_phi_adjoint(U[i], win), f), 1e-6);
  }

  {
    const auto &f = bat[0], &g = bat[1], &f2 = bat[2], &g2 = bat[3];
    cd lhs = inner(wigner_moyal(f, g), wigner_moyal(f2, g2));
    cd rhs = inner(f, f2) * std::conj(inner(g, g2)) / (2 * pi);
    rec.check("wigner.moyal", std::abs(lhs - rhs) / (f.norm() * g.norm() * f2.norm() * g2.norm()), 1e-6);

    std::vector<Vec> pts, half;
    for (int i = 0; i < 16; ++i) {
      Vec z(2);
      z << rng.uniform(-3, 3), rng.uniform(-3, 3);
      pts.push_back(z);
      half.push_back(z / 2);
    }
    GridFunctionX cphi = win.phi;
    for (cd& v : cphi.values) v = std::conj(v);
    auto W = wigner_at(f, cphi, half);
    auto Uz = u_phi_at(f, win.phi, pts);
    double e = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) e = std::max(e, std::abs(Uz[i] - std::sqrt(pi / 2) * W[i]));
    rec.check("u_phi.wigner_relation", e / f.norm(), 1e-6);
  }

  // Heisenberg-Weyl operators
  for (std::size_t i = 0; i < bat.size(); ++i) {
    const auto& f = bat[i];
    Vec z0 = lattice_point(rng, h, 8), z1 = lattice_point(rng, h, 8);
    double t0 = rng.uniform(-2, 2), t1 = rng.uniform(-2, 2);
    rec.check("heisenberg.intertwining", rel_l2(u_phi(heisenberg_weyl(z0, t0, f), win), t_ph_heisenberg(z0, t0, U[i])),
              1e-8);
    const double t01 = t0 + t1 + 0.5 * sigma(z0, z1);
    rec.check("heisenberg.group_law",
              rel_l2(heisenberg_weyl(z0, t0, heisenberg_weyl(z1, t1, f)), heisenberg_weyl(z0 + z1, t01, f)), 1e-10);
    rec.check("heisenberg.group_law_phase_space",
              rel_l2(t_ph_heisenberg(z0, t0, t_ph_heisenberg(z1, t1, U[i])), t_ph_heisenberg(z0 + z1, t01, U[i])),
              1e-10);
  }

  // A_ph intertwining and the symplectic Fourier transform
  const GaussianSymbol s = random_gaussian_symbol(rng);
  const GridFunctionZ as = sample_twisted(s, ax, ap);
  for (std::size_t i = 0; i < 2; ++i)
    rec.check("a_ph.intertwining", rel_l2(a_ph_apply(as, U[i]), u_phi(weyl_apply_x(s, bat[i]), win)), 1e-5);
  {
    GridFunctionZ aw = GridFunctionZ::sample(ax, ap, [&](double x, double p) {
      Vec z(2);
      z << x, p;
      return s.weyl(z);
    });
    rec.check("symplectic_fourier.gaussian", rel_l2(symplectic_fourier(aw), as), 1e-6);
    rec.check("symplectic_fourier.involution", rel_l2(symplectic_fourier(symplectic_fourier(aw)), aw), 1e-10);
  }

  // covariance under metaplectic operators
  std::vector<GridFunctionX> few(bat.begin(), bat.begin() + 2);
  QuadraticFourierTransform q = random_generator(1, rng);
  MetaplecticWord wq = MetaplecticWord::single(q), wj(1, {Factor::Jhat()});
  rec.check("metaplectic_covariance", metaplectic_covariance_check(wq, s, few, win), 1e-5);
  const GaussianSymbol ho{cd(1.0, 0.0), Mat::Identity(2, 2) * rng.uniform(0.5, 1.5), Vec::Zero(2)};
  rec.check("metaplectic_covariance", metaplectic_covariance_check(wj, ho, few, win), 1e-5);
  rec.check("metaplectic_covariance.identity", metaplectic_covariance_check(MetaplecticWord::identity(1), s, few, win),
            1e-10);
  rec.check("metaplectic_covariance.translation", conjugation_form_check(wj, lattice_point(rng, h, 8), few, win), 1e-5);
  rec.check("window_transform_rule", window_transform_rule_check(wq, win, few, rng, 100), 1e-5);
  rec.check("window_transform_rule", window_transform_rule_check(wj, win, few, rng, 100), 1e-5);

  // ladder operators and the harmonic oscillator
  for (std::size_t i = 0; i < 4; ++i) {
    rec.check("ladder.x", rel_l2(zhat_ph_apply(ZComponent::x, U[i]), u_phi(times_x(bat[i]), win)), 1e-5);
    rec.check("ladder.p", rel_l2(zhat_ph_apply(ZComponent::p, U[i]), u_phi(minus_i_deriv(bat[i]), win)), 1e-5);
    rec.check("oscillator.intertwining", rel_l2(harmonic_oscillator_ph(U[i]), u_phi(harmonic_oscillator_x(bat[i]), win)),
              1e-5);
    rec.check("oscillator.ladder_route", rel_l2(harmonic_oscillator_ph_ladder(U[i]), harmonic_oscillator_ph(U[i])), 1e-5);
  }
  {
    GridFunctionZ G0 = u_phi(win.phi, win);
    rec.check("oscillator.ground_state", rel_l2(harmonic_oscillator_ph(G0), scaled(G0, 0.5)), 1e-5);
  }

  // Cauchy-Riemann membership
  double member = 0;
  for (const auto& F : U) member = std::max(member, cr_condition_residual(F));
  const GaussianSymbol gs = random_gaussian_symbol(rng);
  GridFunctionZ generic = GridFunctionZ::sample(ax, ap, [&](double x, double p) {
    Vec z(2);
    z << x, p;
    return gs.weyl(z) * std::cos(x * p);
  });
  double gen = cr_condition_residual(generic);
  rec.check("cr.member", member, 1e-6);
  rec.check("cr.separation", member / gen, 1e-3);
}

// ---------------------------------------------------------------------------

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

VerificationReport run_instances(const std::string& suite, long count, const Config& cfg, int workers,
                                 const InstanceFn& fn) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<Recorder> recs(static_cast<std::size_t>(count));
  std::atomic<long> next{0};
  auto work = [&] {
    for (long i = next++; i < count; i = next++) {
      Rng rng(instance_seed(cfg.seed, suite, i));
      Recorder& rec = recs[static_cast<std::size_t>(i)];
      try {
        fn(i, rng, rec);
      } catch (const std::exception& e) {
        rec.error("unexpected-error", "instance " + std::to_string(i) + ": " + e.what());
      }
    }
  };
  workers = static_cast<int>(std::clamp<long>(workers, 1, std::max<long>(count, 1)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  VerificationReport r;
  r.suite = suite;
  r.seed = cfg.seed;
  r.config = cfg.snapshot();
  for (const auto& rec : recs) r.absorb(rec);
  r.wall_time_s = seconds_since(t0);
  return r;
}

bool is_suite(const std::string& name) {
  return name == "all" || std::find(suite_names().begin(), suite_names().end(), name) != suite_names().end();
}

VerificationReport run_suite(const std::string& name, const Config& cfg, int workers) {
  if (!is_suite(name)) fail(ErrorKind::validation, "unknown suite '", name, "'");
  cfg.validate();
  set_default_tol(cfg.tol);
  if (name == "all") {
    auto t0 = std::chrono::steady_clock::now();
    VerificationReport all;
    all.suite = "all";
    all.seed = cfg.seed;
    all.config = cfg.snapshot();
    for (const auto& s : suite_names()) {
      VerificationReport p = run_suite(s, cfg, workers);
      all.instances += p.instances;
      all.passed += p.passed;
      all.failed += p.failed;
      for (const auto& [k, v] : p.identities) all.identities[s + "/" + k].merge(v);
      for (const auto& m : p.messages)
        if (all.messages.size() < 20) all.messages.push_back(s + ": " + m);
      all.parts.push_back(std::move(p));
    }
    all.wall_time_s = seconds_since(t0);
    return all;
  }
  const long count = cfg.count(name);
  InstanceFn fn;
  if (name == "kashiwara") fn = kashiwara_instance;
  else if (name == "alm") fn = alm_instance;
  else if (name == "maslov") fn = maslov_instance;
  else if (name == "cayley") fn = cayley_instance;
  else if (name == "nu") fn = nu_instance;
  else if (name == "metaplectic") {
    if (cfg.grid.n != 1) fail(ErrorKind::validation, "the metaplectic suite runs on n = 1 grids (grid.n = ", cfg.grid.n, ")");
    fn = [&cfg](long i, Rng& rng, Recorder& rec) { metaplectic_instance(i, rng, rec, cfg); };
  } else {
    fn = [&cfg](long i, Rng& rng, Recorder& rec) { phase_space_instance(i, rng, rec, cfg); };
  }
  return run_instances(name, count, cfg, workers, fn);
}

// ---------------------------------------------------------------------------
// corpus

void CorpusSpec::validate() const {
  if (n_min < 1) fail(ErrorKind::validation, "corpus: n_min must be >= 1, got ", n_min);
  if (n_max < n_min) fail(ErrorKind::validation, "corpus: n_max (", n_max, ") < n_min (", n_min, ")");
  if (n_max > 8) fail(ErrorKind::validation, "corpus: n_max must be <= 8, got ", n_max);
  if (count < 0) fail(ErrorKind::validation, "corpus: count must be >= 0");
  for (double d : det_floors)
    if (!(d > 0 && d < 1)) fail(ErrorKind::validation, "corpus: det floors must lie in (0, 1), got ", d);
}

json CorpusSpec::to_json() const {
  return {{"n_min", n_min}, {"n_max", n_max}, {"count", count}, {"det_floors", det_floors}};
}

CorpusSpec CorpusSpec::from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::validation, "corpus spec must be a JSON object");
  CorpusSpec s;
  for (const auto& [k, v] : j.items()) {
    if (k == "n_min") s.n_min = v.get<int>();
    else if (k == "n_max") s.n_max = v.get<int>();
    else if (k == "count") s.count = v.get<int>();
    else if (k == "det_floors") s.det_floors = v.get<std::vector<double>>();
    else fail(ErrorKind::validation, "corpus spec: unknown key '", k, "'");
  }
  s.validate();
  return s;
}

namespace {
json mat_json(const Mat& M, int n) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) r.push_back(M(i, k));
    rows.push_back(r);
  }
  return {{"n", n}, {"rows", rows}};
}

json frame_json(const LagrangianFrame& l) {
  json j = mat_json(l.basis().transpose(), l.n());
  return {{"n", l.n()}, {"columns", j["rows"]}};
}

// hyperbolic block with det(S - I) = -target in the first plane, doubling in the others
Mat near_degenerate(int n, double target, Rng& rng) {
  const double c = target * std::pow(2.0, n - 1);
  const double eps = 0.5 * (c + std::sqrt(c * c + 4 * c));
  Mat S = Mat::Identity(2 * n, 2 * n);
  S(0, 0) = 1 + eps;
  S(n, n) = 1 / (1 + eps);
  for (int k = 1; k < n; ++k) {
    S(k, k) = 2;
    S(n + k, n + k) = 0.5;
  }
  SymplecticMatrix T = random_symplectic(n, rng, 0.5);
  return T.mat() * S * T.inverse().mat();
}
}  // namespace

json gen_corpus(const CorpusSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(splitmix64(seed));
  json out;
  out["seed"] = seed;
  out["spec"] = spec.to_json();
  json sym = json::array(), pairs = json::array(), degen = json::array();
  for (int n = spec.n_min; n <= spec.n_max; ++n) {
    for (int i = 0; i < spec.count; ++i) sym.push_back(mat_json(random_symplectic(n, rng).mat(), n));
    for (int k = 0; k <= n; ++k) {
      auto [a, b] = stratified_pair(n, k, rng);
      pairs.push_back({{"n", n}, {"k", intersection_dim(a, b)}, {"first", frame_json(a)}, {"second", frame_json(b)}});
    }
    for (double floor : spec.det_floors) {
      Mat S = near_degenerate(n, floor, rng);
      double d = (S - Mat::Identity(2 * n, 2 * n)).determinant();
      degen.push_back({{"n", n}, {"det_floor", floor}, {"det_minus_identity", d}, {"matrix", mat_json(S, n)}});
    }
  }
  out["symplectic"] = sym;
  out["lagrangian_pairs"] = pairs;
  out["near_degenerate"] = degen;
  return out;
}

}  // namespace sympl::harness
