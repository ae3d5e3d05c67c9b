#pragma once

#include <functional>

#include "config.hpp"
#include "report.hpp"

namespace sympl::harness {

// per-instance stream: independent of worker count and scheduling
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t instance_seed(std::uint64_t seed, const std::string& suite, long index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : suite) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  return splitmix64(seed ^ splitmix64(h + static_cast<std::uint64_t>(index)));
}

using InstanceFn = std::function<void(long index, Rng& rng, Recorder& rec)>;

VerificationReport run_instances(const std::string& suite, long count, const Config& cfg, int workers,
                                 const InstanceFn& fn);

bool is_suite(const std::string& name);

/** @brief Runs one suite (or "all") and fills the report; unknown names throw a validation error. */
VerificationReport run_suite(const std::string& name, const Config& cfg, int workers);

struct CorpusSpec {
  int n_min = 1;
  int n_max = 3;
  int count = 8;  // random instances per dimension
  std::vector<double> det_floors{1e-2, 1e-4, 1e-6};

  void validate() const;
  json to_json() const;
  static CorpusSpec from_json(const json& j);
};

json gen_corpus(const CorpusSpec& spec, std::uint64_t seed);

}  // namespace sympl::harness
