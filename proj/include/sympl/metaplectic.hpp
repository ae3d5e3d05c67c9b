#pragma once

#include "cz_index.hpp"
#include "grid.hpp"

namespace sympl {

// ---------------------------------------------------------------------------
// resolution checks

// largest |coordinate| on the grid
inline double box_radius(const Axis& a) {
  return std::max(std::abs(a.origin()), std::abs(a.x(a.N - 1)));
}

inline double row_norm(const Mat& A) { return A.size() ? A.cwiseAbs().rowwise().sum().maxCoeff() : 0.0; }

inline void require_resolved(double grad, const Axis& a, const char* what) {
  double lim = pi / a.step();
  if (grad > lim * (1 + 1e-9))
    fail(ErrorKind::resolution, what, ": phase gradient ", grad, " exceeds the grid Nyquist limit ", lim);
}

// max phase gradient of the kernel e^{iW(x,x')} over the box
inline double swm_gradient(const GeneratingFunction& W, const Axis& a) {
  double R = box_radius(a);
  double gx = R * (row_norm(W.P) + row_norm(W.L.transpose()));
  double gy = R * (row_norm(W.Q) + row_norm(W.L));
  return std::max(gx, gy);
}

// fraction of the squared norm within `frac` of the box edge
inline double edge_mass(const GridFunctionX& f, double frac = 1.0 / 16) {
  double lo = f.axis.origin() + frac * 2 * f.axis.halfwidth;
  double hi = f.axis.origin() + (1 - frac) * 2 * f.axis.halfwidth;
  double tot = 0, edge = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double v = std::norm(f.values[i]);
    tot += v;
    Vec x = f.point(i);
    if ((x.array() < lo).any() || (x.array() > hi).any()) edge += v;
  }
  return tot > 0 ? edge / tot : 0.0;
}

inline void require_contained(const GridFunctionX& f, double limit = 1e-8) {
  double m = edge_mass(f);
  if (m > limit) fail(ErrorKind::domain, "function has relative mass ", m, " near the box edge; enlarge the grid");
}

// ---------------------------------------------------------------------------
// n-dimensional helpers

namespace detail {

inline void ft_all_axes(GridFunctionX& g, bool inverse) {
  GridShape sh = g.shape();
  for (int ax = 0; ax < g.n; ++ax)
    for_each_line(g.values, sh, ax, [&](std::vector<cd>& line) {
      if (inverse) axis_ift(line, g.axis);
      else axis_ft(line, g.axis);
    });
}

// trigonometric interpolant at arbitrary points; points outside the box give 0
inline std::vector<cd> interpolate_nd(const GridFunctionX& f, const std::vector<Vec>& pts) {
  const double lo = f.axis.origin(), hi = f.axis.origin() + 2 * f.axis.halfwidth;
  std::vector<cd> out(pts.size(), 0.0);
  if (f.n == 1) {
    std::vector<double> xs;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (pts[i][0] >= lo && pts[i][0] <= hi) {
        xs.push_back(pts[i][0]);
        keep.push_back(i);
      }
    auto v = interpolate(f.values, f.axis, xs);
    for (std::size_t k = 0; k < keep.size(); ++k) out[keep[k]] = v[k];
    return out;
  }
  GridFunctionX F = f;
  ft_all_axes(F, false);
  const Axis r = f.axis.reciprocal();
  const int N = f.axis.N;
  // per-axis phase tables, then a flat sum
  std::vector<cd> tab(static_cast<std::size_t>(f.n) * N);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec& x = pts[i];
    if ((x.array() < lo).any() || (x.array() > hi).any()) continue;
    for (int d = 0; d < f.n; ++d)
      for (int m = 0; m < N; ++m) {
        double xi = r.x(m);
        tab[d * N + m] = m == 0 ? cd(std::cos(xi * x[d])) : std::exp(I_unit * xi * x[d]);
      }
    cd s = 0;
    for (std::size_t k = 0; k < F.size(); ++k) {
      std::size_t idx = k;
      cd ph = 1.0;
      for (int d = f.n - 1; d >= 0; --d) {
        ph *= tab[d * N + idx % N];
        idx /= N;
      }
      s += F.values[k] * ph;
    }
    out[i] = s / static_cast<double>(F.size());
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// grid action of the generators

inline GridFunctionX apply_v(const Mat& P, const GridFunctionX& f) {
  require_resolved(box_radius(f.axis) * row_norm(P), f.axis, "V_P chirp");
  GridFunctionX g = f;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec x = g.point(i);
    g.values[i] *= std::exp(-0.5 * I_unit * x.dot(P * x));
  }
  return g;
}

// i^m sqrt|det L| f(Lx)
inline GridFunctionX apply_m(const Mat& L, int m, const GridFunctionX& f) {
  std::vector<Vec> pts(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) pts[i] = L * f.point(i);
  GridFunctionX g = f;
  g.values = detail::interpolate_nd(f, pts);
  cd c = i_pow(m) * std::sqrt(std::abs(L.determinant()));
  for (cd& v : g.values) v *= c;
  return g;
}

// J (sign = +1) and its inverse (sign = -1), separable
inline GridFunctionX apply_j(const GridFunctionX& f, int sign = 1) {
  require_resolved(box_radius(f.axis), f.axis, "J kernel");
  GridFunctionX g = f;
  const double h = f.axis.step();
  // (2 pi i)^{-1/2} per axis, or its conjugate for the inverse
  cd c = std::exp(-I_unit * (sign * pi / 4)) / std::sqrt(2 * pi) * h;
  GridShape sh = g.shape();
  for (int ax = 0; ax < g.n; ++ax)
    for_each_line(g.values, sh, ax, [&](std::vector<cd>& line) {
      line = scaled_ft(line, f.axis, f.axis, static_cast<double>(sign));
      for (cd& v : line) v *= c;
    });
  return g;
}

inline cd swm_prefactor(const QuadraticFourierTransform& q) {
  const int n = q.n();
  return std::pow(2 * pi, -0.5 * n) * std::exp(-I_unit * (pi / 4 * n)) * i_pow(q.m) *
         std::sqrt(std::abs(q.W.L.determinant()));
}

// direct quadrature of the kernel, O(N^{2n})
inline GridFunctionX apply_swm_dense(const QuadraticFourierTransform& q, const GridFunctionX& f) {
  q.validate();
  if (q.n() != f.n) fail(ErrorKind::dimension, "operator n = ", q.n(), ", function n = ", f.n);
  require_resolved(swm_gradient(q.W, f.axis), f.axis, "S_W kernel");
  GridFunctionX g(f.n, f.axis);
  cd c = swm_prefactor(q) * f.cell();
  std::vector<Vec> pts(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) pts[i] = f.point(i);
  for (std::size_t i = 0; i < f.size(); ++i) {
    cd s = 0;
    for (std::size_t k = 0; k < f.size(); ++k) s += std::exp(I_unit * q.W(pts[i], pts[k])) * f.values[k];
    g.values[i] = c * s;
  }
  return g;
}

// chirp - scaled FFT - chirp for n = 1; dense kernel otherwise
inline GridFunctionX apply_swm(const QuadraticFourierTransform& q, const GridFunctionX& f) {
  q.validate();
  if (q.n() != f.n) fail(ErrorKind::dimension, "operator n = ", q.n(), ", function n = ", f.n);
  if (f.n != 1) return apply_swm_dense(q, f);
  require_resolved(swm_gradient(q.W, f.axis), f.axis, "S_W kernel");
  const Axis& a = f.axis;
  const double P = q.W.P(0, 0), L = q.W.L(0, 0), Q = q.W.Q(0, 0);
  std::vector<cd> v(a.N);
  for (int k = 0; k < a.N; ++k) v[k] = f.values[k] * std::exp(0.5 * I_unit * Q * a.x(k) * a.x(k));
  v = scaled_ft(v, a, a, L);
  GridFunctionX g = f;
  cd c = swm_prefactor(q) * a.step();
  for (int j = 0; j < a.N; ++j) g.values[j] = c * v[j] * std::exp(0.5 * I_unit * P * a.x(j) * a.x(j));
  return g;
}

inline GridFunctionX apply_factor(const Factor& fac, const GridFunctionX& f) {
  switch (fac.kind) {
    case FactorKind::V: return apply_v(fac.P, f);
    case FactorKind::M: return apply_m(fac.L, fac.m, f);
    case FactorKind::J: return apply_j(f, 1);
    case FactorKind::Jinv: return apply_j(f, -1);
    case FactorKind::SWM: return apply_swm(fac.swm(), f);
  }
  return f;
}

// rightmost factor acts first
inline GridFunctionX apply_word(const MetaplecticWord& w, const GridFunctionX& f) {
  if (w.n() != f.n) fail(ErrorKind::dimension, "word n = ", w.n(), ", function n = ", f.n);
  GridFunctionX g = f;
  for (auto it = w.factors().rbegin(); it != w.factors().rend(); ++it) g = apply_factor(*it, g);
  return g;
}

inline MetaplecticWord factor_swm(const QuadraticFourierTransform& q) {
  q.validate();
  return {q.n(), expand_swm(q)};
}

// ---------------------------------------------------------------------------
// Gaussian symbols

/** @brief a_sigma(z) = i^nu |det(S - I)|^{-1/2} e^{(i/2)<Mz, z>}, M the Cayley transform of S. */
struct GaussianTwistedSymbol {
  int nu = 0;
  double amplitude = 1.0;
  Mat M;

  int n() const { return static_cast<int>(M.rows() / 2); }
  SymplecticMatrix S() const { return cayley_inverse(M); }
  cd operator()(const Vec& z) const { return i_pow(nu) * amplitude * std::exp(0.5 * I_unit * z.dot(M * z)); }
};

inline GaussianTwistedSymbol twisted_symbol(const SymplecticMatrix& S, int nu) {
  require_nondegenerate(S, default_tol(), "S");
  return {mod4(nu), 1.0 / std::sqrt(std::abs(S.det_minus_identity())), cayley_transform(S)};
}

/** @brief a(z) = c e^{(i/2)<Qz, z>}. */
struct GaussianWeylSymbol {
  cd c;
  Mat Q;
  cd operator()(const Vec& z) const { return c * std::exp(0.5 * I_unit * z.dot(Q * z)); }
};

// a = F_sigma a_sigma = 2^n i^{nu + sign M/2} |det(S + I)|^{-1/2} e^{(i/2)<J M^{-1} J z, z>}
inline GaussianWeylSymbol plain_weyl_symbol(const SymplecticMatrix& S, int nu) {
  const int n = S.n();
  require_nondegenerate(S, default_tol(), "S");
  double dp = (S.mat() + Mat::Identity(2 * n, 2 * n)).determinant();
  if (std::abs(dp) <= default_tol().eps_det)
    fail(ErrorKind::domain, "S has -1 as an eigenvalue (det(S + I) = ", dp, "); the plain symbol is not a Gaussian");
  Mat M = cayley_transform(S);
  int sm = inertia(M).signature();
  if (sm % 2) fail(ErrorKind::integrality, "sign M_S = ", sm, " is odd");
  Mat J = standard_j(n);
  Mat Q = J * M.inverse() * J;
  Q = 0.5 * (Q + Q.transpose());
  return {i_pow(nu + sm / 2) * std::pow(2.0, n) / std::sqrt(std::abs(dp)), Q};
}

// the same value straight from the Fresnel formula
inline cd plain_symbol_fresnel(const GaussianTwistedSymbol& a, const Vec& z) {
  Mat J = standard_j(a.n());
  return i_pow(a.nu) * a.amplitude * fresnel_gaussian_ft(a.M, J * z);
}

struct ComposeCheck {
  double m_err = 0;    // product formula vs Cayley transform of SS'
  double amp_err = 0;  // |det((M + M')(S - I)(S' - I))| vs |det(SS' - I)|
};

inline GaussianTwistedSymbol compose_twisted(const GaussianTwistedSymbol& a, const GaussianTwistedSymbol& b,
                                             ComposeCheck* chk = nullptr) {
  if (a.n() != b.n()) fail(ErrorKind::dimension, "composing symbols of different n");
  SymplecticMatrix S = a.S(), Sp = b.S();
  CayleyProductCheck c = cayley_of_product(S, Sp);
  SymplecticMatrix SSp = S * Sp;
  const int m = 2 * a.n();
  Mat I = Mat::Identity(m, m);
  double lhs = std::abs(((a.M + b.M) * (S.mat() - I) * (Sp.mat() - I)).determinant());
  double rhs = std::abs(SSp.det_minus_identity());
  double amp_err = std::abs(lhs - rhs) / std::max(rhs, 1e-300);
  if (amp_err > 1e-8) fail(ErrorKind::validation, "amplitude identity fails (rel ", amp_err, ")");
  GaussianTwistedSymbol r = twisted_symbol(SSp, a.nu + b.nu + half_sign_sum(S, Sp));
  if (chk) *chk = {rel_err(c.M, r.M), amp_err};
  return r;
}

// ---------------------------------------------------------------------------
// R_nu(S) on grids: the p0-integral is Fresnel, the x0-integral is quadrature
//   K(x, y) = (2 pi)^{-n/2} i^nu a e^{(i/2)<Mxx u, u>} fres(Mpp, Mpx u + (x + y)/2),  u = x - y

struct RNuKernel {
  int n;
  cd c;
  Mat Mxx, Mpx, A;  // A = Mpp^{-1}
  cd fres_c;

  explicit RNuKernel(const GaussianTwistedSymbol& s) : n(s.n()) {
    Mat Mpp = s.M.bottomRightCorner(n, n);
    Mxx = s.M.topLeftCorner(n, n);
    Mpx = s.M.bottomLeftCorner(n, n);
    Inertia in = inertia(Mpp);
    if (in.n_zero)
      fail(ErrorKind::singular, "p-block of the Cayley transform is singular; the kernel has no Fresnel form");
    A = Mpp.inverse();
    A = 0.5 * (A + A.transpose());
    fres_c = std::pow(std::abs(Mpp.determinant()), -0.5) * std::exp(I_unit * (pi / 4 * in.signature()));
    c = std::pow(2 * pi, -0.5 * n) * i_pow(s.nu) * s.amplitude * fres_c;
  }

  Vec v(const Vec& x, const Vec& y) const { return Mpx * (x - y) + 0.5 * (x + y); }
  double phase(const Vec& x, const Vec& y) const {
    Vec u = x - y, w = v(x, y);
    return 0.5 * u.dot(Mxx * u) - 0.5 * w.dot(A * w);
  }
  cd operator()(const Vec& x, const Vec& y) const { return c * std::exp(I_unit * phase(x, y)); }

  // gradient bound over the corners of the box (the phase is quadratic)
  double max_gradient(const Axis& a) const {
    double R = box_radius(a);
    Mat dv = 0.5 * Mat::Identity(n, n) - Mpx;
    double best = 0;
    const int corners = 1 << (2 * n);
    for (int c = 0; c < corners; ++c) {
      Vec x(n), y(n);
      for (int d = 0; d < n; ++d) {
        x[d] = (c >> d) & 1 ? R : -R;
        y[d] = (c >> (n + d)) & 1 ? R : -R;
      }
      Vec u = x - y, w = v(x, y);
      Vec gy = -Mxx * u - dv.transpose() * A * w;
      Vec gx = Mxx * u + (0.5 * Mat::Identity(n, n) + Mpx).transpose() * (-A * w);
      best = std::max({best, gy.cwiseAbs().maxCoeff(), gx.cwiseAbs().maxCoeff()});
    }
    return best;
  }
};

inline GridFunctionX r_nu_apply(const GaussianTwistedSymbol& s, const GridFunctionX& f) {
  if (s.n() != f.n) fail(ErrorKind::dimension, "symbol n = ", s.n(), ", function n = ", f.n);
  require_contained(f);
  RNuKernel K(s);
  require_resolved(K.max_gradient(f.axis), f.axis, "R_nu kernel");
  std::vector<Vec> pts(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) pts[i] = f.point(i);
  GridFunctionX g(f.n, f.axis);
  const double w = f.cell();
  for (std::size_t i = 0; i < f.size(); ++i) {
    cd acc = 0;
    for (std::size_t k = 0; k < f.size(); ++k) acc += K(pts[i], pts[k]) * f.values[k];
    g.values[i] = acc * w;
  }
  return g;
}

// ---------------------------------------------------------------------------
// indices of words

// nu = m - n/2 + sign(W_S)/2 for a single S_{W,m}
inline int nu_of_generator(const QuadraticFourierTransform& q) {
  SymplecticMatrix S = q.projection();
  require_nondegenerate(S, default_tol(), "S_W");
  Inertia in = inertia(hessian_WS(S));
  if (in.n_zero) fail(ErrorKind::degenerate, "W_S is singular");
  int twice = 2 * q.m - q.n() + in.signature();
  if (twice % 2) fail(ErrorKind::integrality, "2 nu = ", twice, " is odd");
  return mod4(twice / 2);
}

// single generators as quadratic Fourier transforms
inline bool as_generator(const MetaplecticWord& w, QuadraticFourierTransform& q) {
  const int n = w.n();
  if (w.factors().size() != 1) return false;
  const Factor& f = w.factors().front();
  Mat I = Mat::Identity(n, n), Z = Mat::Zero(n, n);
  switch (f.kind) {
    case FactorKind::SWM: q = f.swm(); return true;
    case FactorKind::J: q = {{Z, I, Z}, 0}; return true;
    case FactorKind::Jinv: q = {{Z, -I, Z}, n}; return true;
    default: return false;
  }
}

struct FreePair {
  QuadraticFourierTransform first, second;
  double lambda = 0.0;
  double det_first = 0.0, det_second = 0.0;
};

// shift Q -> Q - lambda, P' -> P' + lambda; V_{-Q} V_{-P'} is unchanged
inline FreePair shifted_pair(const QuadraticFourierTransform& a, const QuadraticFourierTransform& b, double lam) {
  const int n = a.n();
  Mat I = Mat::Identity(n, n);
  FreePair r{{{a.W.P, a.W.L, a.W.Q - lam * I}, a.m}, {{b.W.P + lam * I, b.W.L, b.W.Q}, b.m}, lam};
  r.det_first = free_from_generating(r.first.W).det_minus_identity();
  r.det_second = free_from_generating(r.second.W).det_minus_identity();
  return r;
}

inline FreePair free_pair_factorization(const MetaplecticWord& w, double det_floor = 1e-6) {
  QuadraticFourierTransform a, b;
  if (!w.reduced_pair(a, b)) fail(ErrorKind::precondition, "word is not a product of two quadratic Fourier transforms");
  FreePair best = shifted_pair(a, b, 0.0);
  auto score = [](const FreePair& p) { return std::min(std::abs(p.det_first), std::abs(p.det_second)); };
  if (score(best) >= det_floor) return best;
  // lambda must avoid the spectra of W_S (first factor) and -W_S' (second); keep the best margin
  const int n = a.n();
  Mat WS1 = a.W.P + a.W.Q - a.W.L - a.W.L.transpose();
  Mat WS2 = b.W.P + b.W.Q - b.W.L - b.W.L.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> e1(0.5 * (WS1 + WS1.transpose())), e2(0.5 * (WS2 + WS2.transpose()));
  double best_margin = -1;
  const int count = 32;
  for (int k = 0; k < count; ++k) {
    double lam = -2.0 + 4.0 * k / (count - 1);
    double margin = 1e300;
    for (int i = 0; i < n; ++i) {
      margin = std::min(margin, std::abs(e1.eigenvalues()[i] - lam));
      margin = std::min(margin, std::abs(-e2.eigenvalues()[i] - lam));
    }
    FreePair p = shifted_pair(a, b, lam);
    if (score(p) < det_floor) continue;
    if (margin > best_margin) {
      best_margin = margin;
      best = p;
    }
  }
  if (best_margin < 0.01) fail(ErrorKind::search, "no shift lambda in [-2, 2] with both det(S - I) away from 0");
  return best;
}

// nu(S) mod 4 of a generator or a reduced pair, checked against arg det(S - I) = (nu - n) pi
inline int nu_of_word(const MetaplecticWord& w) {
  const int n = w.n();
  SymplecticMatrix S = w.projection();
  require_nondegenerate(S, default_tol(), "S");
  int nu;
  QuadraticFourierTransform q;
  if (as_generator(w, q)) {
    nu = nu_of_generator(q);
  } else {
    FreePair fp = free_pair_factorization(w);
    SymplecticMatrix S1 = fp.first.projection(), S2 = fp.second.projection();
    nu = mod4(nu_of_generator(fp.first) + nu_of_generator(fp.second) + half_sign_sum(S1, S2));
  }
  double d = S.det_minus_identity();
  bool neg = d < 0;
  if (neg != ((nu - n) % 2 != 0))
    fail(ErrorKind::validation, "arg det(S - I) inconsistent with nu = ", nu, " (det ", d, ")");
  return nu;
}

// m-hat = m + m' - Inert(P' + Q) mod 4
inline int maslov_hat_m(const MetaplecticWord& w) {
  QuadraticFourierTransform q, a, b;
  if (as_generator(w, q)) return mod4(q.m);
  if (!w.reduced_pair(a, b)) fail(ErrorKind::precondition, "word is not in reduced form");
  Mat s = b.W.P + a.W.Q;
  Inertia in = inertia(0.5 * (s + s.transpose()));
  return mod4(a.m + b.m - in.n_minus);
}

inline int rank_p_plus_q(const MetaplecticWord& w) {
  QuadraticFourierTransform a, b;
  if (!w.reduced_pair(a, b)) fail(ErrorKind::precondition, "word is not in reduced form");
  Mat s = b.W.P + a.W.Q;
  Inertia in = inertia(0.5 * (s + s.transpose()));
  return in.n_plus + in.n_minus;
}

// random generators for tests and suites
inline QuadraticFourierTransform random_generator(int n, Rng& rng, double scale = 0.5) {
  GeneratingFunction W{random_symmetric(n, rng, scale), Mat(), random_symmetric(n, rng, scale)};
  do {
    W.L = Mat::Identity(n, n) + random_matrix(n, n, rng, 0.4);
  } while (std::abs(W.L.determinant()) < 0.3);
  if (rng.uniform() < 0.3) W.L.row(0) *= -1;
  int m = default_m(W.L) + 2 * rng.integer(0, 1);
  return {W, m};
}

}  // namespace sympl
