#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sympl::harness {

using json = nlohmann::ordered_json;

struct IdentityStats {
  long checks = 0;
  long failures = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;

  void merge(const IdentityStats& o) {
    checks += o.checks;
    failures += o.failures;
    max_residual = std::max(max_residual, o.max_residual);
    tolerance = std::max(tolerance, o.tolerance);
  }
  bool operator==(const IdentityStats&) const = default;
};

// what one instance saw; merged by max / sum so the order of instances does not matter
class Recorder {
 public:
  void check(const std::string& id, double residual, double tol) {
    IdentityStats& s = stats_[id];
    ++s.checks;
    s.tolerance = std::max(s.tolerance, tol);
    bool ok = std::isfinite(residual) && residual <= tol;
    if (std::isfinite(residual)) s.max_residual = std::max(s.max_residual, residual);
    else s.max_residual = INFINITY;
    if (!ok) {
      ++s.failures;
      note(id + ": residual " + fmt(residual) + " > " + fmt(tol));
    }
  }
  // exact integer identity
  void exact(const std::string& id, long lhs, long rhs) {
    check(id, static_cast<double>(std::labs(lhs - rhs)), 0.0);
  }
  void truth(const std::string& id, bool ok) { check(id, ok ? 0.0 : 1.0, 0.0); }
  void error(const std::string& id, const std::string& what) {
    IdentityStats& s = stats_[id];
    ++s.checks;
    ++s.failures;
    s.max_residual = INFINITY;
    note(id + ": " + what);
  }
  void note(std::string msg) { messages_.push_back(std::move(msg)); }

  const std::map<std::string, IdentityStats>& stats() const { return stats_; }
  const std::vector<std::string>& messages() const { return messages_; }
  bool failed() const {
    return std::any_of(stats_.begin(), stats_.end(), [](const auto& kv) { return kv.second.failures > 0; });
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

 private:
  std::map<std::string, IdentityStats> stats_;
  std::vector<std::string> messages_;
};

struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  long instances = 0;
  long passed = 0;
  long failed = 0;
  std::map<std::string, IdentityStats> identities;
  std::vector<std::string> messages;  // first few failure notes
  json config;
  double wall_time_s = 0.0;
  std::vector<VerificationReport> parts;  // for "all"

  bool pass() const { return failed == 0 && instances > 0; }

  void absorb(const Recorder& r, std::size_t max_messages = 20) {
    ++instances;
    if (r.failed()) ++failed;
    else ++passed;
    for (const auto& [k, v] : r.stats()) identities[k].merge(v);
    for (const auto& m : r.messages())
      if (messages.size() < max_messages) messages.push_back(m);
  }
};

inline json residual_json(double v) {
  if (std::isfinite(v)) return v;
  return "inf";
}

inline double residual_from(const json& j) {
  if (j.is_string()) return INFINITY;
  return j.get<double>();
}

inline json to_json(const VerificationReport& r) {
  json j;
  j["suite"] = r.suite;
  j["pass"] = r.pass();
  j["seed"] = r.seed;
  j["instances"] = r.instances;
  j["passed"] = r.passed;
  j["failed"] = r.failed;
  json ids = json::object();
  for (const auto& [k, v] : r.identities)
    ids[k] = {{"checks", v.checks},
              {"failures", v.failures},
              {"max_residual", residual_json(v.max_residual)},
              {"tolerance", v.tolerance}};
  j["identities"] = ids;
  j["messages"] = r.messages;
  j["config"] = r.config;
  j["wall_time_s"] = r.wall_time_s;
  if (!r.parts.empty()) {
    json parts = json::array();
    for (const auto& p : r.parts) parts.push_back(to_json(p));
    j["suites"] = parts;
  }
  return j;
}

inline VerificationReport report_from_json(const json& j) {
  VerificationReport r;
  r.suite = j.at("suite").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.instances = j.at("instances").get<long>();
  r.passed = j.at("passed").get<long>();
  r.failed = j.at("failed").get<long>();
  for (const auto& [k, v] : j.at("identities").items()) {
    IdentityStats s;
    s.checks = v.at("checks").get<long>();
    s.failures = v.at("failures").get<long>();
    s.max_residual = residual_from(v.at("max_residual"));
    s.tolerance = v.at("tolerance").get<double>();
    r.identities[k] = s;
  }
  r.messages = j.at("messages").get<std::vector<std::string>>();
  r.config = j.at("config");
  r.wall_time_s = j.at("wall_time_s").get<double>();
  if (j.contains("suites"))
    for (const auto& p : j.at("suites")) r.parts.push_back(report_from_json(p));
  return r;
}

// everything except timings
inline json stable_view(json j) {
  j.erase("wall_time_s");
  if (j.contains("suites"))
    for (auto& p : j["suites"]) p.erase("wall_time_s");
  return j;
}

}  // namespace sympl::harness
