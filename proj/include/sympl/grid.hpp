#pragma once

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <functional>
#include <vector>

#include "numkit.hpp"

namespace sympl {

// Uniform periodic axis: x_j = center - halfwidth + j*h, h = 2*halfwidth/N.
struct Axis {
  double center = 0.0;
  double halfwidth = 8.0;
  int N = 256;

  double step() const { return 2.0 * halfwidth / N; }
  double origin() const { return center - halfwidth; }
  double x(int j) const { return origin() + j * step(); }
  // the FFT dual axis, centered at 0, step 2pi/(N h)
  Axis reciprocal() const { return Axis{0.0, pi / step(), N}; }
  bool operator==(const Axis&) const = default;
};

inline bool is_pow2(int N) { return N > 0 && (N & (N - 1)) == 0; }

inline void require_axis(const Axis& a) {
  if (!is_pow2(a.N)) fail(ErrorKind::validation, "grid size ", a.N, " is not a power of two");
  if (!(a.halfwidth > 0)) fail(ErrorKind::validation, "grid halfwidth must be positive");
}

inline bool axes_close(const Axis& a, const Axis& b) {
  return a.N == b.N && std::abs(a.center - b.center) < 1e-12 * (1 + std::abs(a.center)) &&
         std::abs(a.halfwidth - b.halfwidth) < 1e-12 * a.halfwidth;
}

// ---------------------------------------------------------------------------
// raw 1d transforms (unscaled, e^{-2 pi i jk/N} forward)

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> eng = [] {
    Eigen::FFT<double> e;
    e.SetFlag(Eigen::FFT<double>::Unscaled);
    return e;
  }();
  return eng;
}
}  // namespace detail

inline void fft_inplace(std::vector<cd>& v, bool inverse = false) {
  std::vector<cd> out;
  if (inverse) detail::fft_engine().inv(out, v);
  else detail::fft_engine().fwd(out, v);
  v.swap(out);
}

// Centered continuous-style transform on an axis:
//   F(xi_m) = sum_j f_j e^{-i xi_m x_j},  xi_m = (m - N/2) dk
inline void axis_ft(std::vector<cd>& v, const Axis& a) {
  const int N = a.N;
  for (int j = 1; j < N; j += 2) v[j] = -v[j];  // (-1)^j recentres the spectrum
  fft_inplace(v);
  const Axis r = a.reciprocal();
  const double o = a.origin();
  for (int m = 0; m < N; ++m) v[m] *= std::exp(-I_unit * r.x(m) * o);
}

// exact inverse of axis_ft: f_j = (1/N) sum_m F_m e^{i xi_m x_j}
inline void axis_ift(std::vector<cd>& v, const Axis& a) {
  const int N = a.N;
  const Axis r = a.reciprocal();
  const double o = a.origin();
  for (int m = 0; m < N; ++m) v[m] *= std::exp(I_unit * r.x(m) * o);
  fft_inplace(v, true);
  for (int j = 0; j < N; ++j) v[j] *= (j % 2 ? -1.0 : 1.0) / N;
}

// chirp-z: G_j = sum_k g_k e^{-i alpha j k}, Bluestein with a 2N circular convolution
inline std::vector<cd> czt(const std::vector<cd>& g, double alpha) {
  const int N = static_cast<int>(g.size());
  int M = 1;
  while (M < 2 * N) M <<= 1;
  std::vector<cd> chirp(N);
  for (int k = 0; k < N; ++k) {
    double kk = static_cast<double>(k) * k;
    chirp[k] = std::exp(-I_unit * (0.5 * alpha * kk));
  }
  std::vector<cd> a(M, 0.0), b(M, 0.0);
  for (int k = 0; k < N; ++k) a[k] = g[k] * chirp[k];
  for (int d = 0; d < N; ++d) {
    cd c = std::conj(chirp[d]);
    b[d] = c;
    if (d) b[M - d] = c;
  }
  fft_inplace(a);
  fft_inplace(b);
  for (int i = 0; i < M; ++i) a[i] *= b[i];
  fft_inplace(a, true);
  std::vector<cd> out(N);
  for (int j = 0; j < N; ++j) out[j] = chirp[j] * a[j] / static_cast<double>(M);
  return out;
}

// G_j = sum_k e^{-i L xo_j xi_k} g_k on arbitrary axes (no quadrature weight)
inline std::vector<cd> scaled_ft(const std::vector<cd>& g, const Axis& in, const Axis& out, double L) {
  const int N = in.N;
  if (out.N != N) fail(ErrorKind::dimension, "scaled_ft needs equal axis sizes");
  const double oi = in.origin(), oo = out.origin(), hi = in.step(), ho = out.step();
  std::vector<cd> pre(N);
  for (int k = 0; k < N; ++k) pre[k] = g[k] * std::exp(-I_unit * (L * oo * hi * k));
  std::vector<cd> G = czt(pre, L * hi * ho);
  for (int j = 0; j < N; ++j) G[j] *= std::exp(-I_unit * (L * (oi * ho * j + oi * oo)));
  return G;
}

// band-limited shift: returns f(x_j + s) for all j, periodic interpolant
inline std::vector<cd> fractional_shift(const std::vector<cd>& f, const Axis& a, double s) {
  std::vector<cd> v = f;
  axis_ft(v, a);
  const Axis r = a.reciprocal();
  for (int m = 0; m < a.N; ++m) {
    double xi = r.x(m);
    if (m == 0) v[m] *= std::cos(xi * s);  // Nyquist bin, keeps real data real
    else v[m] *= std::exp(I_unit * xi * s);
  }
  axis_ift(v, a);
  return v;
}

// periodic trigonometric interpolant at arbitrary points, O(N) per point
inline std::vector<cd> interpolate(const std::vector<cd>& f, const Axis& a, const std::vector<double>& xs) {
  std::vector<cd> F = f;
  axis_ft(F, a);
  const Axis r = a.reciprocal();
  std::vector<cd> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cd s = 0.0;
    for (int m = 0; m < a.N; ++m) {
      double xi = r.x(m);
      if (m == 0) s += F[m] * std::cos(xi * xs[i]);
      else s += F[m] * std::exp(I_unit * xi * xs[i]);
    }
    out[i] = s / static_cast<double>(a.N);
  }
  return out;
}

// spectral derivative d/dx
inline std::vector<cd> spectral_derivative(const std::vector<cd>& f, const Axis& a) {
  std::vector<cd> v = f;
  axis_ft(v, a);
  const Axis r = a.reciprocal();
  for (int m = 0; m < a.N; ++m) v[m] *= (m == 0) ? cd(0.0) : I_unit * r.x(m);
  axis_ift(v, a);
  return v;
}

// ---------------------------------------------------------------------------
// multi-axis arrays, row-major with axis 0 slowest

struct GridShape {
  std::vector<int> dims;
  std::size_t size() const {
    std::size_t s = 1;
    for (int d : dims) s *= static_cast<std::size_t>(d);
    return s;
  }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (std::size_t k = axis + 1; k < dims.size(); ++k) s *= dims[k];
    return s;
  }
};

// apply fn to every 1d line along `axis`
inline void for_each_line(std::vector<cd>& data, const GridShape& sh, int axis,
                          const std::function<void(std::vector<cd>&)>& fn) {
  const std::size_t L = sh.dims[axis];
  const std::size_t st = sh.stride(axis);
  const std::size_t total = sh.size();
  const std::size_t block = st * L;
  std::vector<cd> line(L);
  for (std::size_t outer = 0; outer < total; outer += block)
    for (std::size_t inner = 0; inner < st; ++inner) {
      std::size_t base = outer + inner;
      for (std::size_t k = 0; k < L; ++k) line[k] = data[base + k * st];
      fn(line);
      for (std::size_t k = 0; k < L; ++k) data[base + k * st] = line[k];
    }
}

// ---------------------------------------------------------------------------
// functions on X = R^n sampled on the same axis in every coordinate

struct GridFunctionX {
  int n = 1;
  Axis axis;
  std::vector<cd> values;

  GridFunctionX() = default;
  GridFunctionX(int n_, Axis a) : n(n_), axis(a), values(count(n_, a.N), 0.0) {
    if (n_ < 1) fail(ErrorKind::validation, "dimension n must be >= 1");
    require_axis(a);
  }

  static std::size_t count(int n, int N) {
    std::size_t s = 1;
    for (int k = 0; k < n; ++k) s *= static_cast<std::size_t>(N);
    return s;
  }
  GridShape shape() const { return GridShape{std::vector<int>(n, axis.N)}; }
  std::size_t size() const { return values.size(); }
  double cell() const { return std::pow(axis.step(), n); }

  // coordinates of flat index
  Vec point(std::size_t idx) const {
    Vec x(n);
    for (int k = n - 1; k >= 0; --k) {
      x[k] = axis.x(static_cast<int>(idx % axis.N));
      idx /= axis.N;
    }
    return x;
  }

  double norm() const {
    double s = 0;
    for (const cd& v : values) s += std::norm(v);
    return std::sqrt(s * cell());
  }

  template <typename F>
  static GridFunctionX sample(int n, Axis a, F&& f) {
    GridFunctionX g(n, a);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = f(g.point(i));
    return g;
  }
};

inline void require_same_grid(const GridFunctionX& a, const GridFunctionX& b) {
  if (a.n != b.n || !axes_close(a.axis, b.axis)) fail(ErrorKind::dimension, "grid functions live on different grids");
}

inline cd inner(const GridFunctionX& a, const GridFunctionX& b) {
  require_same_grid(a, b);
  cd s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.values[i]) * b.values[i];
  return s * a.cell();
}

inline double l2_distance(const GridFunctionX& a, const GridFunctionX& b) {
  require_same_grid(a, b);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(s * a.cell());
}

inline double rel_l2(const GridFunctionX& a, const GridFunctionX& ref) {
  double r = ref.norm();
  return r > 0 ? l2_distance(a, ref) / r : l2_distance(a, ref);
}

// phi0 = pi^{-n/4} exp(-|x|^2/2)
inline GridFunctionX gaussian_phi0(int n, Axis a) {
  return GridFunctionX::sample(n, a, [n](const Vec& x) {
    return cd(std::pow(pi, -0.25 * n) * std::exp(-0.5 * x.squaredNorm()), 0.0);
  });
}

// seeded superposition of shifted, chirped, squeezed Gaussians
inline GridFunctionX gaussian_superposition(int n, Axis a, Rng& rng, int terms = 3, double spread = 1.5) {
  GridFunctionX g(n, a);
  for (int t = 0; t < terms; ++t) {
    Vec c(n), k(n);
    for (int d = 0; d < n; ++d) {
      c[d] = rng.uniform(-spread, spread);
      k[d] = rng.uniform(-spread, spread);
    }
    double w = rng.uniform(0.6, 1.4);
    double chirp = rng.uniform(-0.5, 0.5);
    cd amp(rng.normal(), rng.normal());
    for (std::size_t i = 0; i < g.size(); ++i) {
      Vec x = g.point(i);
      Vec y = x - c;
      double r2 = y.squaredNorm();
      g.values[i] += amp * std::exp(-0.5 * r2 / (w * w) + I_unit * (k.dot(x) + 0.5 * chirp * r2));
    }
  }
  double nn = g.norm();
  for (cd& v : g.values) v /= nn;
  return g;
}

}  // namespace sympl
