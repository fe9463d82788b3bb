#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "ivxv/distribution.hpp"
#include "ivxv/policy.hpp"

namespace ivxv {

// success: the final ballot is manipulated and no check saw a manipulated
// ballot. caught: a check saw one. silent_fail: the final ballot is honest.
enum class Outcome { Success, Caught, SilentFail };

std::string_view to_string(Outcome o);

Outcome simulate_policy_on_pattern(const ManipulationPolicy& policy, std::string_view pattern);

struct OutcomeProbabilities {
  double success = 0.0;
  double caught = 0.0;
  double silent_fail = 0.0;

  // Per-voter probability that the manipulation goes unnoticed.
  double undetected() const { return 1.0 - caught; }
};

OutcomeProbabilities outcome_probabilities(const ManipulationPolicy& policy, const BehaviorDistribution& dist);

double analytic_success(const ManipulationPolicy& policy, const BehaviorDistribution& dist);

inline constexpr unsigned kMaxOptimalPolicyLength = 8;
inline constexpr std::size_t kMaxDecisionPoints = 24;

struct OptimalPolicy {
  ManipulationPolicy policy;
  double success = 0.0;
  std::uint64_t policies_examined = 0;
};

// Exhaustive search over every deterministic policy on the decision points
// reachable under the distribution's support. Ties go to the policy that
// manipulates more (earlier in descending mask order). Unreachable histories
// default to honest.
OptimalPolicy optimal_policy(const BehaviorDistribution& dist, unsigned max_len);

// p^k and 1 - p^k.
double undetected_probability(double p, std::uint64_t k);
double detection_probability(double p, std::uint64_t k);

struct Estimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t trials = 0;
};

// Binomial standard error of a frequency.
double binomial_standard_error(double p, std::uint64_t trials);

Estimate monte_carlo_success(const ManipulationPolicy& policy, const BehaviorDistribution& dist,
                             std::uint64_t trials, std::uint64_t seed);

}  // namespace ivxv
