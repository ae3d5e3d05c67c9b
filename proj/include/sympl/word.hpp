#pragma once

#include "path.hpp"

namespace sympl {

/** @brief Quadratic Fourier transform S_{W,m}; m*pi = arg det L mod 2pi. */
struct QuadraticFourierTransform {
  GeneratingFunction W;
  int m = 0;

  int n() const { return W.n(); }
  void validate(const Tolerances& tol = default_tol()) const {
    W.validate(tol);
    bool even = mod4(m) % 2 == 0;
    if (even != (W.L.determinant() > 0)) fail(ErrorKind::validation, "m = ", m, " has the wrong parity for sign det L");
  }
  SymplecticMatrix projection() const { return free_from_generating(W); }
};

// m index for L: 0 if det L > 0, 1 otherwise (the other choice is +2)
inline int default_m(const Mat& L) { return L.determinant() > 0 ? 0 : 1; }

enum class FactorKind { V, M, J, Jinv, SWM };

inline const char* to_string(FactorKind k) {
  switch (k) {
    case FactorKind::V: return "V";
    case FactorKind::M: return "M";
    case FactorKind::J: return "J";
    case FactorKind::Jinv: return "Jinv";
    case FactorKind::SWM: return "SWM";
  }
  return "?";
}

struct Factor {
  FactorKind kind = FactorKind::J;
  Mat P;                // V_P
  Mat L;                // M_{L,m}
  int m = 0;            // M_{L,m}, S_{W,m}
  GeneratingFunction W; // S_{W,m}

  static Factor V(const Mat& P) { return {FactorKind::V, P, {}, 0, {}}; }
  static Factor Mult(const Mat& L, int m) { return {FactorKind::M, {}, L, mod4(m), {}}; }
  static Factor Jhat() { return {FactorKind::J, {}, {}, 0, {}}; }
  static Factor JhatInv() { return {FactorKind::Jinv, {}, {}, 0, {}}; }
  static Factor Swm(const QuadraticFourierTransform& q) { return {FactorKind::SWM, {}, {}, mod4(q.m), q.W}; }

  QuadraticFourierTransform swm() const { return {W, m}; }
};

inline int factor_dim(const Factor& f, int fallback) {
  switch (f.kind) {
    case FactorKind::V: return static_cast<int>(f.P.rows());
    case FactorKind::M: return static_cast<int>(f.L.rows());
    case FactorKind::SWM: return f.W.n();
    default: return fallback;
  }
}

// projections: V_P -> [[I,0],[-P,I]], M_L -> diag(L^{-1}, L^T), J -> J
inline Mat factor_projection(const Factor& f, int n) {
  Mat I = Mat::Identity(n, n);
  Mat S = Mat::Identity(2 * n, 2 * n);
  switch (f.kind) {
    case FactorKind::V: S.bottomLeftCorner(n, n) = -f.P; break;
    case FactorKind::M:
      S.topLeftCorner(n, n) = f.L.inverse();
      S.bottomRightCorner(n, n) = f.L.transpose();
      break;
    case FactorKind::J: S = standard_j(n); break;
    case FactorKind::Jinv: S = -standard_j(n); break;
    case FactorKind::SWM: S = free_from_generating(f.W).mat(); break;
  }
  return S;
}

// S_{W,m} = V_{-P} M_{L,m} J V_{-Q}
inline std::vector<Factor> expand_swm(const QuadraticFourierTransform& q) {
  return {Factor::V(-q.W.P), Factor::Mult(q.W.L, q.m), Factor::Jhat(), Factor::V(-q.W.Q)};
}

namespace detail {

// real generator A with exp(A) = O for O in SO(n)
inline Mat rotation_log(const Mat& O) {
  const int n = static_cast<int>(O.rows());
  Eigen::RealSchur<Mat> rs(O);
  Mat T = rs.matrixT(), U = rs.matrixU();
  Mat G = Mat::Zero(n, n);
  std::vector<int> minus;
  for (int i = 0; i < n;) {
    if (i + 1 < n && std::abs(T(i + 1, i)) > 1e-12) {
      double a = std::atan2(T(i + 1, i), T(i, i));
      G(i + 1, i) = a;
      G(i, i + 1) = -a;
      i += 2;
    } else {
      if (T(i, i) < 0) minus.push_back(i);
      ++i;
    }
  }
  if (minus.size() % 2) fail(ErrorKind::precondition, "rotation_log needs det O = +1");
  // pairs of -1 eigenvalues are half turns; Schur vectors of a symmetric block are orthogonal
  for (std::size_t k = 0; k + 1 < minus.size(); k += 2) {
    int a = minus[k], b = minus[k + 1];
    G(b, a) = pi;
    G(a, b) = -pi;
  }
  return U * G * U.transpose();
}

// path L_t in GL+(n) from I to L, returned as samples
inline std::vector<Mat> glplus_path(const Mat& L, int count) {
  const int n = static_cast<int>(L.rows());
  Eigen::SelfAdjointEigenSolver<Mat> es(L.transpose() * L);
  Mat logP = es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() *
             es.eigenvectors().transpose() * 0.5;
  Mat P = (logP).exp();
  Mat O = L * P.inverse();
  Mat A = rotation_log(O);
  std::vector<Mat> out;
  for (int k = 0; k < count; ++k) {
    double t = double(k) / (count - 1);
    out.push_back((t * A).exp() * (t * logP).exp());
  }
  out.back() = L;
  out.front() = Mat::Identity(n, n);
  return out;
}

inline Mat mult_projection(const Mat& L) {
  const int n = static_cast<int>(L.rows());
  Mat S = Mat::Zero(2 * n, 2 * n);
  S.topLeftCorner(n, n) = L.inverse();
  S.bottomRightCorner(n, n) = L.transpose();
  return S;
}

// path whose metaplectic lift ends at M_{L,m}
inline SymplecticPathLift mult_path(const Mat& L, int m, int count = 17) {
  const int n = static_cast<int>(L.rows());
  const int mm = mod4(m);
  if (L.determinant() > 0) {
    if (mm % 2) fail(ErrorKind::validation, "M_{L,m}: odd m with det L > 0");
    SymplecticPathLift p{n, {}, 0};
    for (const Mat& Lt : glplus_path(L, count)) p.samples.push_back(mult_projection(Lt));
    return mm == 2 ? SymplecticPathLift::prepend_alpha(p, 1) : p;
  }
  if (mm % 2 == 0) fail(ErrorKind::validation, "M_{L,m}: even m with det L < 0");
  // M_{L,m} = M_{L',0} M_{R,m}, L = R L', R flips x_1; M_{R,3} is the half turn exp(t pi J_1)
  Mat R = Mat::Identity(n, n);
  R(0, 0) = -1;
  Mat Lp = R * L;
  SymplecticPathLift a{n, {}, 0};
  for (const Mat& Lt : glplus_path(Lp, count)) a.samples.push_back(mult_projection(Lt));
  Mat K = Mat::Zero(2 * n, 2 * n);
  K(0, n) = pi;
  K(n, 0) = -pi;
  SymplecticPathLift half = SymplecticPathLift::exponential(K, count);
  if (mm == 1) half = SymplecticPathLift::prepend_alpha(half, 1);
  return SymplecticPathLift::concat(a, half);
}

}  // namespace detail

inline SymplecticPathLift factor_path(const Factor& f, int n) {
  switch (f.kind) {
    case FactorKind::V: {
      SymplecticPathLift p{n, {}, 0};
      const int count = 9;
      for (int k = 0; k < count; ++k) {
        Mat S = Mat::Identity(2 * n, 2 * n);
        S.bottomLeftCorner(n, n) = -f.P * (double(k) / (count - 1));
        p.samples.push_back(S);
      }
      return p;
    }
    case FactorKind::M: return detail::mult_path(f.L, f.m);
    case FactorKind::J: return SymplecticPathLift::quarter_rotation(n);
    case FactorKind::Jinv: return SymplecticPathLift::exponential(standard_j(n) * (-pi / 2), 17);
    case FactorKind::SWM: {
      auto parts = expand_swm(f.swm());
      SymplecticPathLift p = SymplecticPathLift::constant(n, 1);
      for (const auto& g : parts) p = SymplecticPathLift::concat(p, factor_path(g, n));
      return p;
    }
  }
  return SymplecticPathLift::constant(n);
}

/** @brief Ordered product F_1 F_2 ... F_k of metaplectic generators (F_k acts first). */
class MetaplecticWord {
 public:
  MetaplecticWord() = default;
  MetaplecticWord(int n, std::vector<Factor> f) : n_(n), factors_(std::move(f)) {
    if (n_ < 1) fail(ErrorKind::validation, "word dimension must be >= 1");
    for (const auto& g : factors_) {
      if (factor_dim(g, n_) != n_) fail(ErrorKind::dimension, "factor of dimension ", factor_dim(g, n_), " in word of n = ", n_);
      if (g.kind == FactorKind::SWM) QuadraticFourierTransform{g.W, g.m}.validate();
      if (g.kind == FactorKind::V) require_symmetric(g.P, default_tol().eps_sym, "V_P");
      if (g.kind == FactorKind::M) {
        double d = g.L.determinant();
        if (std::abs(d) < 1e-12) fail(ErrorKind::validation, "M_{L,m} with singular L");
        if ((mod4(g.m) % 2 == 0) != (d > 0)) fail(ErrorKind::validation, "M_{L,m}: m parity inconsistent with det L");
      }
    }
    Mat S = Mat::Identity(2 * n_, 2 * n_);
    for (const auto& g : factors_) S = S * factor_projection(g, n_);
    projection_ = SymplecticMatrix(S, 1e-8);
  }

  static MetaplecticWord single(const QuadraticFourierTransform& q) { return {q.n(), {Factor::Swm(q)}}; }
  static MetaplecticWord pair(const QuadraticFourierTransform& a, const QuadraticFourierTransform& b) {
    return {a.n(), {Factor::Swm(a), Factor::Swm(b)}};
  }
  static MetaplecticWord identity(int n) { return {n, {}}; }

  int n() const { return n_; }
  const std::vector<Factor>& factors() const { return factors_; }
  const SymplecticMatrix& projection() const { return projection_; }

  MetaplecticWord operator*(const MetaplecticWord& o) const {
    std::vector<Factor> f = factors_;
    f.insert(f.end(), o.factors_.begin(), o.factors_.end());
    return {n_, f};
  }

  // only primitive factors
  MetaplecticWord expanded() const {
    std::vector<Factor> f;
    for (const auto& g : factors_) {
      if (g.kind == FactorKind::SWM) {
        auto e = expand_swm(g.swm());
        f.insert(f.end(), e.begin(), e.end());
      } else {
        f.push_back(g);
      }
    }
    return {n_, f};
  }

  MetaplecticWord inverse() const {
    std::vector<Factor> f;
    auto prim = expanded().factors_;
    for (auto it = prim.rbegin(); it != prim.rend(); ++it) {
      switch (it->kind) {
        case FactorKind::V: f.push_back(Factor::V(-it->P)); break;
        case FactorKind::M: f.push_back(Factor::Mult(it->L.inverse(), -it->m)); break;
        case FactorKind::J: f.push_back(Factor::JhatInv()); break;
        case FactorKind::Jinv: f.push_back(Factor::Jhat()); break;
        case FactorKind::SWM: break;
      }
    }
    return {n_, f};
  }

  // a path in Sp whose metaplectic lift ends at this word
  SymplecticPathLift path() const {
    SymplecticPathLift p = SymplecticPathLift::constant(n_, 1);
    for (const auto& g : factors_) p = SymplecticPathLift::concat(p, factor_path(g, n_));
    if (p.samples.size() == 1) p.samples.push_back(p.samples.front());
    return p;
  }

  // two quadratic Fourier transforms, if the word is in reduced form
  bool reduced_pair(QuadraticFourierTransform& a, QuadraticFourierTransform& b) const;

 private:
  int n_ = 1;
  std::vector<Factor> factors_;
  SymplecticMatrix projection_;
};

inline bool MetaplecticWord::reduced_pair(QuadraticFourierTransform& a, QuadraticFourierTransform& b) const {
  if (factors_.size() == 2 && factors_[0].kind == FactorKind::SWM && factors_[1].kind == FactorKind::SWM) {
    a = factors_[0].swm();
    b = factors_[1].swm();
    return true;
  }
  // pattern V_{-P} M J V_{-Q} V_{-P'} M' J V_{-Q'}
  if (factors_.size() == 8) {
    const FactorKind pat[8] = {FactorKind::V, FactorKind::M, FactorKind::J, FactorKind::V,
                               FactorKind::V, FactorKind::M, FactorKind::J, FactorKind::V};
    for (int k = 0; k < 8; ++k)
      if (factors_[k].kind != pat[k]) return false;
    a = {{-factors_[0].P, factors_[1].L, -factors_[3].P}, factors_[1].m};
    b = {{-factors_[4].P, factors_[5].L, -factors_[7].P}, factors_[5].m};
    return true;
  }
  return false;
}

}  // namespace sympl
