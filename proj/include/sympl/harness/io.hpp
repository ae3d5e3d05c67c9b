#pragma once

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "../phase_space.hpp"
#include "report.hpp"

namespace sympl::harness {

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open ", path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::io, "cannot parse ", path, ": ", e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write ", path);
  out << text;
  if (!out) fail(ErrorKind::io, "write to ", path, " failed");
}

// ---------------------------------------------------------------------------
// {"n": n, "rows": [[...], ...]}, 2n x 2n or n x n

inline Mat rows_to_mat(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) fail(ErrorKind::validation, what, ": rows must be a non-empty array");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  Mat M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!rows[i].is_array() || static_cast<Eigen::Index>(rows[i].size()) != c)
      fail(ErrorKind::validation, what, ": ragged rows");
    for (Eigen::Index k = 0; k < c; ++k) {
      if (!rows[i][k].is_number()) fail(ErrorKind::validation, what, ": entries must be numbers");
      M(i, k) = rows[i][k].get<double>();
    }
  }
  return M;
}

inline json mat_rows(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) r.push_back(M(i, k));
    rows.push_back(r);
  }
  return rows;
}

// phase-space matrices carry the half dimension; plain n x n matrices carry n
inline Mat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("rows"))
    fail(ErrorKind::validation, "matrix JSON needs \"n\" and \"rows\"");
  int n = j.at("n").get<int>();
  Mat M = rows_to_mat(j.at("rows"), "matrix");
  if (M.rows() != M.cols()) fail(ErrorKind::dimension, "matrix must be square, got ", M.rows(), "x", M.cols());
  if (M.rows() != n && M.rows() != 2 * n)
    fail(ErrorKind::dimension, "matrix of size ", M.rows(), " does not match n = ", n);
  return M;
}

inline json matrix_to_json(const Mat& M, int n) { return {{"n", n}, {"rows", mat_rows(M)}}; }

inline SymplecticMatrix symplectic_from_json(const json& j) {
  Mat M = matrix_from_json(j);
  int n = j.at("n").get<int>();
  if (M.rows() != 2 * n) fail(ErrorKind::dimension, "symplectic matrix must be 2n x 2n");
  return SymplecticMatrix(M);
}

// {"n": n, "columns": [[2n entries], ... n times]}
inline LagrangianFrame frame_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("columns"))
    fail(ErrorKind::validation, "frame JSON needs \"n\" and \"columns\"");
  int n = j.at("n").get<int>();
  Mat C = rows_to_mat(j.at("columns"), "frame");
  if (C.rows() != n || C.cols() != 2 * n)
    fail(ErrorKind::dimension, "frame must list n = ", n, " columns of length ", 2 * n);
  return LagrangianFrame(C.transpose());
}

inline json frame_to_json(const LagrangianFrame& l) {
  return {{"n", l.n()}, {"columns", mat_rows(l.basis().transpose())}};
}

// {"n": n, "samples": [matrix, ...]}; a sample is a rows array or a matrix object
inline SymplecticPathLift path_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("samples"))
    fail(ErrorKind::validation, "path JSON needs \"n\" and \"samples\"");
  SymplecticPathLift p;
  p.n = j.at("n").get<int>();
  for (const auto& s : j.at("samples")) {
    Mat M = s.is_object() ? rows_to_mat(s.at("rows"), "path sample") : rows_to_mat(s, "path sample");
    if (M.rows() != 2 * p.n || M.cols() != 2 * p.n) fail(ErrorKind::dimension, "path sample must be 2n x 2n");
    p.samples.push_back(M);
  }
  p.validate();
  return p;
}

inline json path_to_json(const SymplecticPathLift& p) {
  json s = json::array();
  for (const Mat& M : p.samples) s.push_back(mat_rows(M));
  return {{"n", p.n}, {"samples", s}};
}

// {"n": n, "factors": [{"kind": "V", "P": rows}, {"kind": "M", "L": rows, "m": k}, {"kind": "J"}, {"kind": "Jinv"},
//                       {"kind": "SWM", "P": rows, "L": rows, "Q": rows, "m": k}]}, leftmost factor acts last
inline MetaplecticWord word_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("factors"))
    fail(ErrorKind::validation, "word JSON needs \"n\" and \"factors\"");
  const int n = j.at("n").get<int>();
  std::vector<Factor> fs;
  for (const auto& f : j.at("factors")) {
    const std::string k = f.at("kind").get<std::string>();
    auto block = [&](const char* key) {
      if (!f.contains(key)) fail(ErrorKind::validation, "factor ", k, " needs \"", key, "\"");
      Mat M = rows_to_mat(f.at(key), key);
      if (M.rows() != n || M.cols() != n) fail(ErrorKind::dimension, "factor ", k, ": ", key, " must be n x n");
      return M;
    };
    if (k == "V") fs.push_back(Factor::V(block("P")));
    else if (k == "M") {
      Mat L = block("L");
      fs.push_back(Factor::Mult(L, f.contains("m") ? f.at("m").get<int>() : default_m(L)));
    } else if (k == "J") fs.push_back(Factor::Jhat());
    else if (k == "Jinv") fs.push_back(Factor::JhatInv());
    else if (k == "SWM") {
      Mat L = block("L");
      QuadraticFourierTransform q{{block("P"), L, block("Q")}, f.contains("m") ? f.at("m").get<int>() : default_m(L)};
      q.validate();
      fs.push_back(Factor::Swm(q));
    } else
      fail(ErrorKind::validation, "unknown factor kind '", k, "'");
  }
  return MetaplecticWord(n, fs);
}

inline json word_to_json(const MetaplecticWord& w) {
  json fs = json::array();
  for (const Factor& f : w.factors()) {
    json o = {{"kind", to_string(f.kind)}};
    switch (f.kind) {
      case FactorKind::V: o["P"] = mat_rows(f.P); break;
      case FactorKind::M: o["L"] = mat_rows(f.L); o["m"] = f.m; break;
      case FactorKind::SWM:
        o["P"] = mat_rows(f.W.P);
        o["L"] = mat_rows(f.W.L);
        o["Q"] = mat_rows(f.W.Q);
        o["m"] = f.m;
        break;
      default: break;
    }
    fs.push_back(o);
  }
  return {{"n", w.n()}, {"factors", fs}};
}

// {"c": [re, im], "G": rows (2 x 2, positive definite), "center": [x, p]}
inline GaussianSymbol gaussian_symbol_from_json(const json& j) {
  GaussianSymbol s;
  if (j.contains("c")) {
    const json& c = j.at("c");
    s.c = c.is_array() ? cd(c.at(0).get<double>(), c.at(1).get<double>()) : cd(c.get<double>(), 0.0);
  }
  if (j.contains("G")) s.G = rows_to_mat(j.at("G"), "G");
  if (s.G.rows() != 2 || s.G.cols() != 2) fail(ErrorKind::dimension, "symbol G must be 2 x 2");
  require_symmetric(s.G, default_tol().eps_sym, "G");
  if (inertia(s.G).n_plus != 2) fail(ErrorKind::validation, "symbol G must be positive definite");
  if (j.contains("center")) {
    auto v = j.at("center").get<std::vector<double>>();
    if (v.size() != 2) fail(ErrorKind::dimension, "symbol center must have 2 entries");
    s.zc = Vec::Map(v.data(), 2);
  }
  return s;
}

// ---------------------------------------------------------------------------
// grids: raw little-endian (re, im) f64 pairs, row-major, plus <path>.json

inline json axis_json(const Axis& a) { return {{"center", a.center}, {"halfwidth", a.halfwidth}, {"N", a.N}}; }

inline Axis axis_from_json(const json& j) {
  Axis a{j.at("center").get<double>(), j.at("halfwidth").get<double>(), j.at("N").get<int>()};
  require_axis(a);
  return a;
}

namespace detail {
inline void put_le(std::ostream& out, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  out.write(reinterpret_cast<const char*>(&u), 8);
}
inline double get_le(const char* p) {
  std::uint64_t u;
  std::memcpy(&u, p, 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

inline void write_values(const std::string& path, const std::vector<cd>& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write ", path);
  for (const cd& c : v) {
    put_le(out, c.real());
    put_le(out, c.imag());
  }
  if (!out) fail(ErrorKind::io, "write to ", path, " failed");
}

inline std::vector<cd> read_values(const std::string& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open ", path);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() != count * 16)
    fail(ErrorKind::validation, path, " holds ", buf.size(), " bytes, sidecar says ", count * 16);
  std::vector<cd> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = {get_le(&buf[16 * i]), get_le(&buf[16 * i + 8])};
  return v;
}
}  // namespace detail

inline std::string sidecar_path(const std::string& path) { return path + ".json"; }

inline void write_grid(const std::string& path, const GridFunctionX& f) {
  detail::write_values(path, f.values);
  json side = {{"kind", "X"},         {"n", f.n},
               {"axis", axis_json(f.axis)}, {"dtype", "complex128-le"},
               {"layout", "row-major"}, {"count", f.size()}};
  write_text(sidecar_path(path), side.dump(2) + "\n");
}

inline void write_grid(const std::string& path, const GridFunctionZ& F) {
  detail::write_values(path, F.values);
  json side = {{"kind", "Z"},
               {"n", 1},
               {"axis_x", axis_json(F.ax)},
               {"axis_p", axis_json(F.ap)},
               {"dtype", "complex128-le"},
               {"layout", "row-major, x slowest"},
               {"count", F.size()}};
  write_text(sidecar_path(path), side.dump(2) + "\n");
}

inline GridFunctionX read_grid_x(const std::string& path) {
  json side = read_json_file(sidecar_path(path));
  if (side.value("kind", "") != "X") fail(ErrorKind::validation, sidecar_path(path), " does not describe an X grid");
  GridFunctionX f(side.at("n").get<int>(), axis_from_json(side.at("axis")));
  f.values = detail::read_values(path, f.size());
  return f;
}

inline GridFunctionZ read_grid_z(const std::string& path) {
  json side = read_json_file(sidecar_path(path));
  if (side.value("kind", "") != "Z") fail(ErrorKind::validation, sidecar_path(path), " does not describe a Z grid");
  GridFunctionZ F(axis_from_json(side.at("axis_x")), axis_from_json(side.at("axis_p")));
  F.values = detail::read_values(path, F.size());
  return F;
}

}  // namespace sympl::harness
