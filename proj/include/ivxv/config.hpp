#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ivxv/codec.hpp"
#include "ivxv/distribution.hpp"
#include "ivxv/policy.hpp"

namespace ivxv {

// Deliberate deviations from the honest protocol, used to exercise the
// auditor. All off by default.
struct FaultInjection {
  bool forge_signature = false;        // EA records a ballot carrying a forged handle
  bool mix_non_last = false;           // EA mixes a re-voter's second-to-last ballot
  bool tamper_shuffle_output = false;  // EA alters one output after proving
  bool tamper_plaintext = false;       // a second, altered plaintext list is posted

  bool any() const { return forge_signature || mix_non_last || tamper_shuffle_output || tamper_plaintext; }
};

struct ElectionConfig {
  std::string sid = "ivxv-election";
  std::uint32_t voters = 0;      // n
  std::uint32_t trustees = 0;    // k
  std::uint32_t threshold = 0;   // t
  std::uint32_t candidates = 0;  // C
  std::string group = "toy";

  std::string distribution_source = "default";
  BehaviorDistribution distribution = BehaviorDistribution::estonia_aggregate();

  std::vector<std::uint32_t> intents;  // empty: drawn from the seed
  std::map<std::uint32_t, std::string> scripts;  // per-voter overrides of the emulator

  std::vector<std::uint32_t> corrupted;  // voter ids, 1-based
  ManipulationPolicy policy = ManipulationPolicy::always();
  std::uint32_t adversary_shift = 1;

  std::vector<std::uint32_t> tally_trustees;  // empty: all k

  std::uint64_t seed = 0;
  bool threshold_strict = false;
  bool ea_strict_halt = false;
  FaultInjection faults;

  bool record_transcript = true;  // not serialised
  std::map<std::string, std::string> input_digests;  // file name -> sha256 hex

  // Throws Error(Config).
  void validate() const;
};

// n, k, t and C must be given explicitly. Relative file references resolve
// against base_dir.
ElectionConfig parse_config(const json& j, const std::filesystem::path& base_dir = {});
ElectionConfig load_config(const std::filesystem::path& path);

// Fully resolved form: distribution and policy inline, every field explicit.
// parse_config(to_json(c)) reproduces c.
json to_json(const ElectionConfig& config);

}  // namespace ivxv
