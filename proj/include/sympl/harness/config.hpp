#pragma once

#include <toml.hpp>

#include <cstdlib>
#include <map>
#include <string>
#include <thread>

#include "../numkit.hpp"
#include "report.hpp"

namespace sympl::harness {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"kashiwara", "alm", "maslov", "cayley", "nu", "metaplectic", "phase-space"};
  return s;
}

struct GridConfig {
  int n = 1;
  int N = 256;
  double halfwidth = 12.0;
};

struct Config {
  std::uint64_t seed = 20240917;
  GridConfig grid;
  int phase_space_N = 256;  // self-dual grid, halfwidth sqrt(pi N / 2)
  Tolerances tol;
  std::map<std::string, long> instances{{"kashiwara", 500}, {"alm", 200},  {"maslov", 200},     {"cayley", 500},
                                        {"nu", 120},        {"metaplectic", 24}, {"phase-space", 6}};

  long count(const std::string& suite) const {
    auto it = instances.find(suite);
    return it == instances.end() ? 0 : it->second;
  }

  json snapshot() const {
    json j;
    j["seed"] = seed;
    j["grid"] = {{"n", grid.n}, {"N", grid.N}, {"halfwidth", grid.halfwidth}};
    j["phase_space"] = {{"N", phase_space_N}};
    j["tol"] = {{"eps_sym", tol.eps_sym},   {"eps_rank_rel", tol.eps_rank_rel}, {"eps_symp", tol.eps_symp},
                {"eps_det", tol.eps_det},   {"eps_cut", tol.eps_cut},           {"eps_int", tol.eps_int},
                {"eps_unit", tol.eps_unit}, {"aux_margin", tol.aux_margin},     {"aux_draws", tol.aux_draws}};
    json s = json::object();
    for (const auto& [k, v] : instances) s[k] = {{"instances", v}};
    j["suites"] = s;
    return j;
  }

  void validate() const {
    if (grid.n < 1) fail(ErrorKind::validation, "config: grid.n must be >= 1");
    if (grid.N < 8 || (grid.N & (grid.N - 1))) fail(ErrorKind::validation, "config: grid.N must be a power of two >= 8");
    if (!(grid.halfwidth > 0)) fail(ErrorKind::validation, "config: grid.halfwidth must be positive");
    if (phase_space_N < 8 || (phase_space_N & (phase_space_N - 1)))
      fail(ErrorKind::validation, "config: phase_space.N must be a power of two >= 8");
    for (const auto& [k, v] : instances)
      if (v < 1) fail(ErrorKind::validation, "config: suites.", k, ".instances must be >= 1");
  }
};

namespace detail {
template <typename T>
void read_into(const toml::table& t, const char* key, T& out, const std::string& where) {
  const toml::node* node = t.get(key);
  if (!node) return;
  if constexpr (std::is_floating_point_v<T>) {
    auto v = node->value<double>();
    if (!v) fail(ErrorKind::validation, "config: ", where, ".", key, " must be a number");
    out = *v;
  } else {
    auto v = node->value<std::int64_t>();
    if (!v) fail(ErrorKind::validation, "config: ", where, ".", key, " must be an integer");
    out = static_cast<T>(*v);
  }
}

inline void reject_unknown(const toml::table& t, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [k, v] : t) {
    bool ok = false;
    for (const char* s : known) ok = ok || k.str() == s;
    if (!ok) fail(ErrorKind::validation, "config: unknown key '", where.empty() ? "" : where + ".", k.str(), "'");
  }
}
}  // namespace detail

inline Config config_from_toml(const toml::table& root) {
  Config c;
  detail::reject_unknown(root, {"seed", "grid", "phase_space", "tol", "suites"}, "");
  if (auto v = root["seed"].value<std::int64_t>()) c.seed = static_cast<std::uint64_t>(*v);
  if (const auto* g = root["grid"].as_table()) {
    detail::reject_unknown(*g, {"n", "N", "halfwidth"}, "grid");
    detail::read_into(*g, "n", c.grid.n, "grid");
    detail::read_into(*g, "N", c.grid.N, "grid");
    detail::read_into(*g, "halfwidth", c.grid.halfwidth, "grid");
  }
  if (const auto* g = root["phase_space"].as_table()) {
    detail::reject_unknown(*g, {"N"}, "phase_space");
    detail::read_into(*g, "N", c.phase_space_N, "phase_space");
  }
  if (const auto* t = root["tol"].as_table()) {
    detail::reject_unknown(*t, {"eps_sym", "eps_rank_rel", "eps_symp", "eps_det", "eps_cut", "eps_int", "eps_unit",
                                "aux_margin", "aux_draws"},
                           "tol");
    detail::read_into(*t, "eps_sym", c.tol.eps_sym, "tol");
    detail::read_into(*t, "eps_rank_rel", c.tol.eps_rank_rel, "tol");
    detail::read_into(*t, "eps_symp", c.tol.eps_symp, "tol");
    detail::read_into(*t, "eps_det", c.tol.eps_det, "tol");
    detail::read_into(*t, "eps_cut", c.tol.eps_cut, "tol");
    detail::read_into(*t, "eps_int", c.tol.eps_int, "tol");
    detail::read_into(*t, "eps_unit", c.tol.eps_unit, "tol");
    detail::read_into(*t, "aux_margin", c.tol.aux_margin, "tol");
    detail::read_into(*t, "aux_draws", c.tol.aux_draws, "tol");
  }
  if (const auto* s = root["suites"].as_table()) {
    for (const auto& [k, v] : *s) {
      std::string name(k.str());
      if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
        fail(ErrorKind::validation, "config: unknown suite '", name, "'");
      const auto* st = v.as_table();
      if (!st) fail(ErrorKind::validation, "config: suites.", name, " must be a table");
      detail::reject_unknown(*st, {"instances"}, "suites." + name);
      detail::read_into(*st, "instances", c.instances[name], "suites." + name);
    }
  }
  c.validate();
  return c;
}

inline Config load_config(const std::string& path) {
  try {
    return config_from_toml(toml::parse_file(path));
  } catch (const toml::parse_error& e) {
    fail(ErrorKind::io, "cannot read config ", path, ": ", e.description());
  }
}

// SYMPL_WORKERS, else the hardware concurrency
inline int worker_count() {
  if (const char* s = std::getenv("SYMPL_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 1 || v > 1024)
      fail(ErrorKind::validation, "SYMPL_WORKERS must be a positive integer, got '", s, "'");
    return static_cast<int>(v);
  }
  unsigned h = std::thread::hardware_concurrency();
  return h ? static_cast<int>(h) : 1;
}

}  // namespace sympl::harness
