#pragma once

#include <cstdint>

#include "ivxv/config.hpp"
#include "ivxv/policy.hpp"

namespace ivxv {

struct AttackReport {
  std::uint64_t k = 0;               // corrupted voting devices
  double p = 0.0;                    // per-voter probability the manipulation goes unnoticed
  double analytic_undetected = 0.0;  // p^k
  double empirical_detected = 0.0;   // fraction of elections ending in a complaint verdict
  double standard_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t detections = 0;
  std::uint64_t surviving_manipulations = 0;  // manipulated final ballots never complained about
};

// Runs `trials` full elections based on `base`, each with k devices chosen
// uniformly at random and corrupted under `policy`. Faults are cleared and
// transcripts are not recorded. Trial i is seeded from (base.seed, i).
AttackReport end_to_end_attack(const ElectionConfig& base, const ManipulationPolicy& policy, std::uint64_t k,
                               std::uint64_t trials);

}  // namespace ivxv
