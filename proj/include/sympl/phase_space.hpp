#pragma once

#include "metaplectic.hpp"

namespace sympl {

// Phase-space grids are n = 1. The default is self-dual: x and p steps both sqrt(2 pi / N).

inline Axis self_dual_axis(int N) {
  return Axis{0.0, std::sqrt(pi * N / 2.0), N};
}

inline bool is_self_dual(const Axis& a) {
  return std::abs(a.center) < 1e-14 && axes_close(a, a.reciprocal());
}

/** @brief F(x_j, p_m) on a product grid, row-major with x slowest. */
struct GridFunctionZ {
  Axis ax, ap;
  std::vector<cd> values;

  GridFunctionZ() = default;
  GridFunctionZ(Axis x, Axis p) : ax(x), ap(p), values(static_cast<std::size_t>(x.N) * p.N, 0.0) {
    require_axis(x);
    require_axis(p);
  }

  int nx() const { return ax.N; }
  int np() const { return ap.N; }
  std::size_t size() const { return values.size(); }
  cd& at(int j, int m) { return values[static_cast<std::size_t>(j) * ap.N + m]; }
  const cd& at(int j, int m) const { return values[static_cast<std::size_t>(j) * ap.N + m]; }
  double x(int j) const { return ax.x(j); }
  double p(int m) const { return ap.x(m); }
  double cell() const { return ax.step() * ap.step(); }
  GridShape shape() const { return GridShape{{ax.N, ap.N}}; }

  double norm() const {
    double s = 0;
    for (const cd& v : values) s += std::norm(v);
    return std::sqrt(s * cell());
  }

  template <typename F>
  static GridFunctionZ sample(Axis x, Axis p, F&& f) {
    GridFunctionZ g(x, p);
    for (int j = 0; j < x.N; ++j)
      for (int m = 0; m < p.N; ++m) g.at(j, m) = f(g.x(j), g.p(m));
    return g;
  }
};

inline void require_same_grid(const GridFunctionZ& a, const GridFunctionZ& b) {
  if (!axes_close(a.ax, b.ax) || !axes_close(a.ap, b.ap))
    fail(ErrorKind::dimension, "phase-space functions live on different grids");
}

inline cd inner(const GridFunctionZ& a, const GridFunctionZ& b) {
  require_same_grid(a, b);
  cd s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.values[i]) * b.values[i];
  return s * a.cell();
}

inline double l2_distance(const GridFunctionZ& a, const GridFunctionZ& b) {
  require_same_grid(a, b);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(s * a.cell());
}

inline double rel_l2(const GridFunctionZ& a, const GridFunctionZ& ref) {
  double r = ref.norm();
  return r > 0 ? l2_distance(a, ref) / r : l2_distance(a, ref);
}

inline GridFunctionZ operator-(GridFunctionZ a, const GridFunctionZ& b) {
  require_same_grid(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) a.values[i] -= b.values[i];
  return a;
}

inline GridFunctionZ scaled(GridFunctionZ a, cd c) {
  for (cd& v : a.values) v *= c;
  return a;
}

namespace detail {
inline void require_1d(const GridFunctionX& f) {
  if (f.n != 1) fail(ErrorKind::dimension, "phase-space operations are implemented for n = 1 (got n = ", f.n, ")");
}

// band-limited 2x upsampling: values at x_0 + j h/2
inline std::vector<cd> upsample2(const std::vector<cd>& f, const Axis& a) {
  const int N = a.N;
  std::vector<cd> F = f;
  fft_inplace(F);
  std::vector<cd> G(2 * N, 0.0);
  for (int k = 0; k < N / 2; ++k) G[k] = F[k];
  for (int k = N / 2 + 1; k < N; ++k) G[k + N] = F[k];
  // split the Nyquist bin so real data stays real
  G[N / 2] = 0.5 * F[N / 2];
  G[N + N / 2] = 0.5 * F[N / 2];
  fft_inplace(G, true);
  for (cd& v : G) v /= static_cast<double>(N);
  return G;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// symplectic Fourier transform  F_sigma a(z) = (2 pi)^{-1} int e^{-i sigma(z, z')} a(z') dz'

inline GridFunctionZ symplectic_fourier(const GridFunctionZ& a) {
  if (!is_self_dual(a.ax) || !axes_close(a.ap, a.ax))
    fail(ErrorKind::commensurability, "symplectic_fourier needs the self-dual grid");
  const int N = a.nx();
  // sigma(z, z') = p x' - p' x: forward in x' (gives p), backward in p' (gives x)
  std::vector<cd> t = a.values;
  GridShape sh = a.shape();
  for_each_line(t, sh, 0, [&](std::vector<cd>& line) { axis_ft(line, a.ax); });
  for_each_line(t, sh, 1, [&](std::vector<cd>& line) {
    axis_ift(line, a.ax);
    for (cd& v : line) v *= static_cast<double>(N);
  });
  GridFunctionZ out(a.ax, a.ap);
  const double c = a.cell() / (2 * pi);
  for (int m = 0; m < N; ++m)
    for (int j = 0; j < N; ++j) out.at(j, m) = c * t[static_cast<std::size_t>(m) * N + j];
  return out;
}

// ---------------------------------------------------------------------------
// Wigner-Moyal transform W(f, g)(x, p) = (2 pi)^{-1} int e^{-i p y} f(x + y/2) conj g(x - y/2) dy
// x on the doubled grid (step h/2), p on the reciprocal grid; y = k h

inline GridFunctionZ wigner_moyal(const GridFunctionX& f, const GridFunctionX& g) {
  detail::require_1d(f);
  require_same_grid(f, g);
  const Axis& a = f.axis;
  const int N = a.N;
  std::vector<cd> f2 = detail::upsample2(f.values, a), g2 = detail::upsample2(g.values, a);
  Axis fine{a.center, a.halfwidth, 2 * N};  // x_0 + j h/2, same box
  Axis pax = a.reciprocal();
  GridFunctionZ W(fine, pax);
  const double h = a.step();
  // lag axis y_k = (k - N/2) h: use axis_ft on an axis of step h centered at 0
  Axis lag{0.0, N * h / 2, N};
  std::vector<cd> row(N);
  for (int j = 0; j < 2 * N; ++j) {
    for (int k = 0; k < N; ++k) {
      int d = k - N / 2;
      int ip = ((j + d) % (2 * N) + 2 * N) % (2 * N);
      int im = ((j - d) % (2 * N) + 2 * N) % (2 * N);
      row[k] = f2[ip] * std::conj(g2[im]);
    }
    axis_ft(row, lag);
    for (int m = 0; m < N; ++m) W.at(j, m) = row[m] * (h / (2 * pi));
  }
  return W;
}

// W(f, g) at arbitrary points, via the trigonometric interpolants
inline std::vector<cd> wigner_at(const GridFunctionX& f, const GridFunctionX& g, const std::vector<Vec>& pts) {
  detail::require_1d(f);
  require_same_grid(f, g);
  const Axis& a = f.axis;
  const int N = a.N;
  const double h = a.step();
  std::vector<cd> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double x = pts[i][0], p = pts[i][1];
    std::vector<double> xp(N), xm(N);
    for (int k = 0; k < N; ++k) {
      double y = (k - N / 2) * h;
      xp[k] = x + y / 2;
      xm[k] = x - y / 2;
    }
    // wrap onto the periodic box
    auto wrap = [&](double t) {
      double L = 2 * a.halfwidth, o = a.origin();
      return o + std::fmod(std::fmod(t - o, L) + L, L);
    };
    for (int k = 0; k < N; ++k) {
      xp[k] = wrap(xp[k]);
      xm[k] = wrap(xm[k]);
    }
    auto F = interpolate(f.values, a, xp), G = interpolate(g.values, a, xm);
    cd s = 0;
    for (int k = 0; k < N; ++k) s += std::exp(-I_unit * p * ((k - N / 2) * h)) * F[k] * std::conj(G[k]);
    out[i] = s * (h / (2 * pi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// U_phi f(x, p) = (2 pi)^{-1/2} e^{ipx/2} int e^{-ipu} phi(x - u) f(u) du  on the discrete torus

/** @brief Unit-norm window. */
struct WindowState {
  GridFunctionX phi;

  explicit WindowState(GridFunctionX p) : phi(std::move(p)) {
    detail::require_1d(phi);
    if (std::abs(phi.norm() - 1.0) > 1e-8)
      fail(ErrorKind::validation, "window norm ", phi.norm(), " differs from 1");
  }
  static WindowState gaussian(const Axis& a) {
    GridFunctionX g = gaussian_phi0(1, a);
    double nn = g.norm();
    for (cd& v : g.values) v /= nn;
    return WindowState(g);
  }
  // phi((j - k) h), periodic
  cd offset(int d) const {
    const int N = phi.axis.N;
    if (std::abs(phi.axis.center) > 1e-14) fail(ErrorKind::validation, "window axis must be centered at 0");
    return phi.values[((d + N / 2) % N + N) % N];
  }
};

inline GridFunctionZ u_phi(const GridFunctionX& f, const WindowState& w) {
  detail::require_1d(f);
  require_same_grid(f, w.phi);
  const Axis& a = f.axis;
  const int N = a.N;
  const double h = a.step();
  GridFunctionZ F(a, a.reciprocal());
  std::vector<cd> row(N);
  const double c = h / std::sqrt(2 * pi);
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) row[k] = w.offset(j - k) * f.values[k];
    axis_ft(row, a);
    double x = a.x(j);
    for (int m = 0; m < N; ++m) F.at(j, m) = c * std::exp(0.5 * I_unit * F.p(m) * x) * row[m];
  }
  return F;
}

// exact discrete adjoint of u_phi
inline GridFunctionX u_phi_adjoint(const GridFunctionZ& F, const WindowState& w) {
  const Axis& a = w.phi.axis;
  if (!axes_close(F.ax, a) || !axes_close(F.ap, a.reciprocal()))
    fail(ErrorKind::dimension, "phase-space grid does not match the window grid");
  const int N = a.N;
  const double h = a.step(), dp = F.ap.step();
  GridFunctionX f(1, a);
  std::vector<cd> row(N);
  const double c = dp * h / std::sqrt(2 * pi) * N;
  for (int j = 0; j < N; ++j) {
    double x = a.x(j);
    for (int m = 0; m < N; ++m) row[m] = std::exp(-0.5 * I_unit * F.p(m) * x) * F.at(j, m);
    axis_ift(row, a);
    for (int k = 0; k < N; ++k) f.values[k] += c * std::conj(w.offset(j - k)) * row[k];
  }
  return f;
}

// U_phi f at arbitrary points (x off the grid uses a shifted window)
inline std::vector<cd> u_phi_at(const GridFunctionX& f, const GridFunctionX& phi, const std::vector<Vec>& pts) {
  detail::require_1d(f);
  require_same_grid(f, phi);
  const Axis& a = f.axis;
  const int N = a.N;
  const double h = a.step();
  std::vector<cd> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double x = pts[i][0], p = pts[i][1];
    // phi(x - u_k) = phi(x_0 + s - u_k) with x = x_{j0} + s
    int j0 = static_cast<int>(std::floor((x - a.origin()) / h));
    double s = x - a.x(j0);
    std::vector<cd> ps = fractional_shift(phi.values, a, s);  // ps[d] = phi(x_d + s)
    cd acc = 0;
    for (int k = 0; k < N; ++k) {
      int d = ((j0 - k + N / 2) % N + N) % N;
      acc += std::exp(-I_unit * p * a.x(k)) * ps[d] * f.values[k];
    }
    out[i] = acc * h / std::sqrt(2 * pi) * std::exp(0.5 * I_unit * p * x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// translations

struct Snap {
  int dx = 0, dp = 0;
  double error = 0.0;
};

inline Snap snap_to_grid(const Vec& z0, double hx, double hp, double tol = 1e-9) {
  Snap s;
  s.dx = static_cast<int>(std::lround(z0[0] / hx));
  s.dp = static_cast<int>(std::lround(z0[1] / hp));
  s.error = std::max(std::abs(s.dx * hx - z0[0]) / hx, std::abs(s.dp * hp - z0[1]) / hp);
  if (s.error > tol)
    fail(ErrorKind::commensurability, "z0 = (", z0[0], ", ", z0[1], ") is off the lattice by ", s.error, " steps");
  return s;
}

// e^{-(i/2) sigma(z, z0)} F(z - z0), sigma(z, z0) = p x0 - p0 x
inline GridFunctionZ t_ph(const Vec& z0, const GridFunctionZ& F) {
  Snap s = snap_to_grid(z0, F.ax.step(), F.ap.step());
  const int Nx = F.nx(), Np = F.np();
  GridFunctionZ G(F.ax, F.ap);
  const double x0 = s.dx * F.ax.step(), p0 = s.dp * F.ap.step();
  for (int j = 0; j < Nx; ++j) {
    int js = ((j - s.dx) % Nx + Nx) % Nx;
    for (int m = 0; m < Np; ++m) {
      int ms = ((m - s.dp) % Np + Np) % Np;
      double sg = F.p(m) * x0 - p0 * F.x(j);
      G.at(j, m) = std::exp(-0.5 * I_unit * sg) * F.at(js, ms);
    }
  }
  return G;
}

inline GridFunctionZ t_ph_heisenberg(const Vec& z0, double t0, const GridFunctionZ& F) {
  return scaled(t_ph(z0, F), std::exp(I_unit * t0));
}

// e^{i(t0 + p0 x - p0 x0 / 2)} f(x - x0)
inline GridFunctionX heisenberg_weyl(const Vec& z0, double t0, const GridFunctionX& f) {
  detail::require_1d(f);
  const Axis& a = f.axis;
  Snap s = snap_to_grid(z0, a.step(), a.reciprocal().step());
  const int N = a.N;
  const double x0 = s.dx * a.step(), p0 = z0[1];
  GridFunctionX g(1, a);
  for (int j = 0; j < N; ++j) {
    int js = ((j - s.dx) % N + N) % N;
    double x = a.x(j);
    g.values[j] = std::exp(I_unit * (t0 + p0 * x - 0.5 * p0 * x0)) * f.values[js];
  }
  return g;
}

// ---------------------------------------------------------------------------
// differential operators

namespace detail {
inline GridFunctionZ deriv(const GridFunctionZ& F, int axis) {
  GridFunctionZ G = F;
  const Axis& a = axis == 0 ? F.ax : F.ap;
  for_each_line(G.values, G.shape(), axis, [&](std::vector<cd>& line) { line = spectral_derivative(line, a); });
  return G;
}
}  // namespace detail

enum class ZComponent { x, p };

// x_ph = x/2 + i d/dp,  p_ph = p/2 - i d/dx
inline GridFunctionZ zhat_ph_apply(ZComponent c, const GridFunctionZ& F) {
  GridFunctionZ G = detail::deriv(F, c == ZComponent::x ? 1 : 0);
  for (int j = 0; j < F.nx(); ++j)
    for (int m = 0; m < F.np(); ++m) {
      if (c == ZComponent::x) G.at(j, m) = 0.5 * F.x(j) * F.at(j, m) + I_unit * G.at(j, m);
      else G.at(j, m) = 0.5 * F.p(m) * F.at(j, m) - I_unit * G.at(j, m);
    }
  return G;
}

// -1/2 Lap F - (i/2) sigma(z, d_z) F + |z|^2/8 F,  sigma(z, d_z) = p d_x - x d_p
inline GridFunctionZ harmonic_oscillator_ph(const GridFunctionZ& F) {
  GridFunctionZ Fx = detail::deriv(F, 0), Fp = detail::deriv(F, 1);
  GridFunctionZ Fxx = detail::deriv(Fx, 0), Fpp = detail::deriv(Fp, 1);
  GridFunctionZ G(F.ax, F.ap);
  for (int j = 0; j < F.nx(); ++j)
    for (int m = 0; m < F.np(); ++m) {
      double x = F.x(j), p = F.p(m);
      G.at(j, m) = -0.5 * (Fxx.at(j, m) + Fpp.at(j, m)) - 0.5 * I_unit * (p * Fx.at(j, m) - x * Fp.at(j, m)) +
                   0.125 * (x * x + p * p) * F.at(j, m);
    }
  return G;
}

// 1/2 (x_ph^2 + p_ph^2) through the ladder operators
inline GridFunctionZ harmonic_oscillator_ph_ladder(const GridFunctionZ& F) {
  GridFunctionZ X = zhat_ph_apply(ZComponent::x, zhat_ph_apply(ZComponent::x, F));
  GridFunctionZ P = zhat_ph_apply(ZComponent::p, zhat_ph_apply(ZComponent::p, F));
  for (std::size_t i = 0; i < X.size(); ++i) X.values[i] = 0.5 * (X.values[i] + P.values[i]);
  return X;
}

// X side: -1/2 f'' + 1/2 x^2 f
inline GridFunctionX harmonic_oscillator_x(const GridFunctionX& f) {
  detail::require_1d(f);
  auto d2 = spectral_derivative(spectral_derivative(f.values, f.axis), f.axis);
  GridFunctionX g = f;
  for (int j = 0; j < f.axis.N; ++j) {
    double x = f.axis.x(j);
    g.values[j] = -0.5 * d2[j] + 0.5 * x * x * f.values[j];
  }
  return g;
}

// ---------------------------------------------------------------------------
// symbols and A_ph

/** @brief Weyl symbol a(z) = c e^{-<G(z - z_c), (z - z_c)>/2}, G positive definite. */
struct GaussianSymbol {
  cd c = 1.0;
  Mat G = Mat::Identity(2, 2);
  Vec zc = Vec::Zero(2);

  cd weyl(const Vec& z) const {
    Vec d = z - zc;
    return c * std::exp(-0.5 * d.dot(G * d));
  }
  // a_sigma = F_sigma a = c det(G)^{-1/2} e^{-i sigma(z, z_c)} e^{-<J^T G^{-1} J z, z>/2}
  cd twisted(const Vec& z) const {
    Mat J = standard_j(1);
    Mat H = J.transpose() * G.inverse() * J;
    double sg = z[1] * zc[0] - zc[1] * z[0];
    return c / std::sqrt(G.determinant()) * std::exp(-I_unit * sg) * std::exp(-0.5 * z.dot(H * z));
  }
  // symbol of a o S
  GaussianSymbol composed(const SymplecticMatrix& S) const {
    Mat Si = S.inverse().mat();
    return {c, S.mat().transpose() * G * S.mat(), Si * zc};
  }
};

inline GaussianSymbol random_gaussian_symbol(Rng& rng) {
  Mat A = random_matrix(2, 2, rng, 0.5);
  Mat G = A * A.transpose() + Mat::Identity(2, 2) * rng.uniform(0.4, 1.0);
  Vec zc(2);
  zc << rng.uniform(-1, 1), rng.uniform(-1, 1);
  return {cd(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)), G, zc};
}

inline GridFunctionZ sample_twisted(const GaussianSymbol& s, const Axis& ax, const Axis& ap) {
  return GridFunctionZ::sample(ax, ap, [&](double x, double p) {
    Vec z(2);
    z << x, p;
    return s.twisted(z);
  });
}

// fraction of |a|^2 outside the inner box
inline double edge_mass(const GridFunctionZ& a, double frac = 1.0 / 16) {
  double tot = 0, edge = 0;
  const int Nx = a.nx(), Np = a.np();
  int ex = std::max(1, static_cast<int>(Nx * frac)), ep = std::max(1, static_cast<int>(Np * frac));
  for (int j = 0; j < Nx; ++j)
    for (int m = 0; m < Np; ++m) {
      double v = std::norm(a.at(j, m));
      tot += v;
      if (j < ex || j >= Nx - ex || m < ep || m >= Np - ep) edge += v;
    }
  return tot > 0 ? edge / tot : 0.0;
}

// (2 pi)^{-1} sum_{z0} a_sigma(z0) T_ph(z0) F  by direct summation, O(N^4)
inline GridFunctionZ a_ph_apply_dense(const GridFunctionZ& a_sigma, const GridFunctionZ& F) {
  require_same_grid(a_sigma, F);
  const int Nx = F.nx(), Np = F.np();
  GridFunctionZ G(F.ax, F.ap);
  const double c = F.cell() / (2 * pi);
  for (int j = 0; j < Nx; ++j)
    for (int m = 0; m < Np; ++m) {
      cd acc = 0;
      double x = F.x(j), p = F.p(m);
      for (int k = 0; k < Nx; ++k) {
        int js = ((j - k + Nx / 2) % Nx + Nx) % Nx;  // x - x0 with x0 = (k - N/2) h
        double x0 = (k - Nx / 2) * F.ax.step();
        for (int l = 0; l < Np; ++l) {
          int ms = ((m - l + Np / 2) % Np + Np) % Np;
          double p0 = (l - Np / 2) * F.ap.step();
          cd av = a_sigma.at(k, l);
          if (av == cd(0)) continue;
          acc += av * std::exp(-0.5 * I_unit * (p * x0 - p0 * x)) * F.at(js, ms);
        }
      }
      G.at(j, m) = c * acc;
    }
  return G;
}

// same operator; per p0 row the x0-sum is an FFT convolution with the symbol row frequency-shifted by p/2
inline GridFunctionZ a_ph_apply(const GridFunctionZ& a_sigma, const GridFunctionZ& F, double tail_limit = 1e-8) {
  require_same_grid(a_sigma, F);
  if (!is_self_dual(F.ax) || !axes_close(F.ap, F.ax))
    fail(ErrorKind::commensurability, "a_ph_apply needs the self-dual grid");
  double tail = edge_mass(a_sigma);
  if (tail > tail_limit) fail(ErrorKind::domain, "twisted symbol has relative tail mass ", tail, " at the box edge");
  const int N = F.nx();
  // grid centered at 0 with x_j = (j - N/2) h; offsets z0 = z_k - 0 are themselves grid points
  // FFT in x of every column F(., p_m)
  std::vector<std::vector<cd>> Fhat(N, std::vector<cd>(N));
  for (int m = 0; m < N; ++m) {
    std::vector<cd> col(N);
    for (int j = 0; j < N; ++j) col[j] = F.at(j, m);
    fft_inplace(col);
    Fhat[m] = col;
  }
  // rows of a and columns of F below 1e-18 of their peak contribute below round-off; skip them
  auto col_max = [N](auto&& at) {
    std::vector<double> mx(N, 0.0);
    for (int j = 0; j < N; ++j)
      for (int m = 0; m < N; ++m) mx[m] = std::max(mx[m], std::abs(at(j, m)));
    return mx;
  };
  std::vector<double> amax = col_max([&](int j, int m) { return a_sigma.at(j, m); });
  std::vector<double> fmax = col_max([&](int j, int m) { return F.at(j, m); });
  const double acut = 1e-18 * *std::max_element(amax.begin(), amax.end());
  const double fcut = 1e-18 * *std::max_element(fmax.begin(), fmax.end());
  GridFunctionZ G(F.ax, F.ap);
  std::vector<cd> buf(N), pad(2 * N), phase(N);
  for (int l = 0; l < N; ++l) {
    double p0 = F.p(l);
    if (amax[l] <= acut) continue;
    // a(x0, p0) with x0 index k; shift so x0 = 0 sits at index 0 for the circular convolution
    std::fill(pad.begin(), pad.end(), cd(0));
    for (int k = 0; k < N; ++k) {
      int d = k - N / 2;                  // x0 = d h
      pad[((d % (2 * N)) + 2 * N) % (2 * N)] = a_sigma.at(k, l);  // zero padded to 2N, circular index
    }
    // A(zeta_q) = sum_d a_d e^{-i zeta_q d h}, zeta_q = q * pi/(N h)
    fft_inplace(pad);
    for (int j = 0; j < N; ++j) phase[j] = std::exp(0.5 * I_unit * p0 * F.x(j)) / static_cast<double>(N);
    for (int m = 0; m < N; ++m) {
      int src = ((m - l + N / 2) % N + N) % N;  // p - p0
      if (fmax[src] <= fcut) continue;
      // p/2 = (m - N/2) h/2 = (m - N/2) * (pi/(N h)) since h^2 = 2 pi / N
      int shift = m - N / 2;
      for (int q = 0; q < N; ++q) {
        // DFT index q of x0 <-> frequency 2 pi q/(N h); e^{-i p x0/2} adds `shift` half-steps
        int idx = ((2 * q + shift) % (2 * N) + 2 * N) % (2 * N);
        buf[q] = pad[idx] * Fhat[src][q];
      }
      fft_inplace(buf, true);
      // circular convolution result at x_j; x0 index was relative, F index absolute
      for (int j = 0; j < N; ++j) G.at(j, m) += buf[j] * phase[j];
    }
  }
  const double c = F.cell() / (2 * pi);
  for (cd& v : G.values) v *= c;
  return G;
}

// X side: A f(x) = int K(x, y) f(y) dy,  K(x, y) = (2 pi)^{-1} int a((x + y)/2, p) e^{i p (x - y)} dp
template <typename Sym>
GridFunctionX weyl_apply_x(const Sym& a, const GridFunctionX& f) {
  detail::require_1d(f);
  const Axis& ax = f.axis;
  const Axis pr = ax.reciprocal();
  const int N = ax.N;
  const double h = ax.step();
  // finer p quadrature than the reciprocal grid is not needed for decaying symbols.
  // The kernel only sees j + k (midpoint) and j - k (offset), so both factors are tabulated once.
  const int M = 2 * N - 1;
  std::vector<cd> sym(static_cast<std::size_t>(M) * N), wave(static_cast<std::size_t>(M) * N);
  Vec z(2);
  for (int s = 0; s < M; ++s) {
    z[0] = ax.origin() + 0.5 * s * h;  // (x_j + x_k) / 2 with s = j + k
    for (int m = 0; m < N; ++m) {
      z[1] = pr.x(m);
      sym[static_cast<std::size_t>(s) * N + m] = a.weyl(z);
      wave[static_cast<std::size_t>(s) * N + m] = std::exp(I_unit * pr.x(m) * ((s - (N - 1)) * h));
    }
  }
  GridFunctionX g(1, ax);
  const double c = h * pr.step() / (2 * pi);
  for (int j = 0; j < N; ++j) {
    cd acc = 0;
    for (int k = 0; k < N; ++k) {
      if (f.values[k] == cd(0)) continue;
      const cd* a_row = &sym[static_cast<std::size_t>(j + k) * N];
      const cd* e_row = &wave[static_cast<std::size_t>(j - k + N - 1) * N];
      cd kk = 0;
      for (int m = 0; m < N; ++m) kk += a_row[m] * e_row[m];
      acc += kk * f.values[k];
    }
    g.values[j] = acc * c;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Cauchy-Riemann residual: members of the range of U_{phi0} satisfy (d_x - i d_p)(e^{|z|^2/4} F) = 0

inline double cr_condition_residual(const GridFunctionZ& F, double radius = 4.0) {
  GridFunctionZ Fx = detail::deriv(F, 0), Fp = detail::deriv(F, 1);
  double num = 0, den = 0;
  for (int j = 0; j < F.nx(); ++j)
    for (int m = 0; m < F.np(); ++m) {
      double x = F.x(j), p = F.p(m);
      double r2 = x * x + p * p;
      if (r2 > radius * radius) continue;
      double w = std::exp(r2 / 4);
      // e^{-|z|^2/4} (d_x - i d_p)(e^{|z|^2/4} F)
      cd D = 0.5 * cd(x, -p) * F.at(j, m) + Fx.at(j, m) - I_unit * Fp.at(j, m);
      num += std::norm(w * D);
      den += std::norm(w * F.at(j, m));
    }
  if (den == 0) fail(ErrorKind::domain, "function vanishes on the evaluation disk");
  return std::sqrt(num / den);
}

// ---------------------------------------------------------------------------
// covariance checks

// S_ph = U S U^*
inline GridFunctionZ s_ph_apply(const MetaplecticWord& w, const GridFunctionZ& F, const WindowState& win) {
  return u_phi(apply_word(w.expanded(), u_phi_adjoint(F, win)), win);
}

// || (a o S)_ph U f - S_ph^{-1} A_ph S_ph U f || / || (a o S)_ph U f ||, worst over the battery
inline double metaplectic_covariance_check(const MetaplecticWord& w, const GaussianSymbol& a,
                                           const std::vector<GridFunctionX>& battery, const WindowState& win) {
  if (w.n() != 1) fail(ErrorKind::dimension, "covariance check is implemented for n = 1");
  const Axis& ax = win.phi.axis;
  GaussianSymbol aS = a.composed(w.projection());
  GridFunctionZ as = sample_twisted(a, ax, ax.reciprocal());
  GridFunctionZ aSs = sample_twisted(aS, ax, ax.reciprocal());
  MetaplecticWord wi = w.inverse();
  double worst = 0;
  for (const auto& f : battery) {
    GridFunctionZ F = u_phi(f, win);
    GridFunctionZ lhs = a_ph_apply(aSs, F);
    GridFunctionZ rhs = s_ph_apply(wi, a_ph_apply(as, s_ph_apply(w, F, win)), win);
    worst = std::max(worst, rel_l2(rhs, lhs));
  }
  return worst;
}

// T_ph(S z0) = S_ph T_ph(z0) S_ph^{-1} on U f, needs S z0 on the lattice
inline double conjugation_form_check(const MetaplecticWord& w, const Vec& z0,
                                     const std::vector<GridFunctionX>& battery, const WindowState& win) {
  Vec Sz0 = w.projection().mat() * z0;
  MetaplecticWord wi = w.inverse();
  double worst = 0;
  for (const auto& f : battery) {
    GridFunctionZ F = u_phi(f, win);
    GridFunctionZ lhs = t_ph(Sz0, F);
    GridFunctionZ rhs = s_ph_apply(w, t_ph(z0, s_ph_apply(wi, F, win)), win);
    worst = std::max(worst, rel_l2(rhs, lhs));
  }
  return worst;
}

// U_phi(S f)(z) vs U_{phi_S} f (S^{-1} z), phi_S = conj(S^{-1} conj phi), on points of the disk
inline double window_transform_rule_check(const MetaplecticWord& w, const WindowState& win,
                                          const std::vector<GridFunctionX>& battery, Rng& rng, int points = 200,
                                          double radius = 4.0) {
  const Axis& ax = win.phi.axis;
  GridFunctionX cphi = win.phi;
  for (cd& v : cphi.values) v = std::conj(v);
  GridFunctionX phiS = apply_word(w.inverse().expanded(), cphi);
  for (cd& v : phiS.values) v = std::conj(v);
  Mat Si = w.projection().inverse().mat();
  std::vector<Vec> zs, zsi;
  for (int i = 0; i < points; ++i) {
    double r = radius * std::sqrt(rng.uniform()), t = 2 * pi * rng.uniform();
    Vec z(2);
    z << r * std::cos(t), r * std::sin(t);
    zs.push_back(z);
    zsi.push_back(Si * z);
  }
  double worst = 0;
  for (const auto& f : battery) {
    auto lhs = u_phi_at(apply_word(w.expanded(), f), win.phi, zs);
    auto rhs = u_phi_at(f, phiS, zsi);
    double num = 0, den = 0;
    for (int i = 0; i < points; ++i) {
      num += std::norm(lhs[i] - rhs[i]);
      den += std::norm(lhs[i]);
    }
    worst = std::max(worst, std::sqrt(num / std::max(den, 1e-300)));
  }
  (void)ax;
  return worst;
}

}  // namespace sympl
