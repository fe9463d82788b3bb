#include "ivxv/analysis.hpp"

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ivxv/error.hpp"
#include "ivxv/rng.hpp"

namespace ivxv {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Caught: return "caught";
    case Outcome::SilentFail: return "silent-fail";
  }
  return "unknown";
}

Outcome simulate_policy_on_pattern(const ManipulationPolicy& policy, std::string_view pattern) {
  auto script = VoterScript::parse(pattern);
  bool latest_manipulated = false;
  for (std::size_t i = 0; i < script.size(); ++i) {
    if (script[i] == Action::Vote) {
      latest_manipulated = policy.decide(pattern.substr(0, i)) == Decision::Manipulate;
    } else if (latest_manipulated) {
      return Outcome::Caught;
    }
  }
  return latest_manipulated ? Outcome::Success : Outcome::SilentFail;
}

OutcomeProbabilities outcome_probabilities(const ManipulationPolicy& policy, const BehaviorDistribution& dist) {
  OutcomeProbabilities out;
  for (const auto& e : dist.entries()) {
    switch (simulate_policy_on_pattern(policy, e.script.pattern())) {
      case Outcome::Success: out.success += e.probability; break;
      case Outcome::Caught: out.caught += e.probability; break;
      case Outcome::SilentFail: out.silent_fail += e.probability; break;
    }
  }
  return out;
}

double analytic_success(const ManipulationPolicy& policy, const BehaviorDistribution& dist) {
  return outcome_probabilities(policy, dist).success;
}

OptimalPolicy optimal_policy(const BehaviorDistribution& dist, unsigned max_len) {
  if (max_len > kMaxOptimalPolicyLength) {
    fail(ErrorCode::MaxLenExceeded, "max-len must not exceed " + std::to_string(kMaxOptimalPolicyLength));
  }
  if (dist.max_pattern_length() > max_len) {
    fail(ErrorCode::MaxLenExceeded, "distribution has patterns longer than max-len " + std::to_string(max_len));
  }

  // Decision points: the history in front of every V of every support pattern.
  std::map<std::string, std::size_t> points;
  for (const auto& e : dist.entries()) {
    const auto& pat = e.script.pattern();
    for (std::size_t i = 0; i < pat.size(); ++i) {
      if (pat[i] == 'V') points.emplace(pat.substr(0, i), 0);
    }
  }
  if (points.size() > kMaxDecisionPoints) {
    fail(ErrorCode::MaxLenExceeded, "too many decision points for exhaustive search: " + std::to_string(points.size()));
  }
  std::size_t next = 0;
  for (auto& [h, idx] : points) idx = next++;

  // Per pattern, the decision index at each position (or -1 for a check).
  struct Compiled {
    std::vector<int> steps;
    double probability;
  };
  std::vector<Compiled> compiled;
  for (const auto& e : dist.entries()) {
    const auto& pat = e.script.pattern();
    Compiled c{{}, e.probability};
    for (std::size_t i = 0; i < pat.size(); ++i) {
      c.steps.push_back(pat[i] == 'V' ? static_cast<int>(points.at(pat.substr(0, i))) : -1);
    }
    compiled.push_back(std::move(c));
  }

  const std::uint64_t count = std::uint64_t{1} << points.size();
  std::uint64_t best_mask = count - 1;
  double best = -1.0;
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t mask = count - 1 - k;
    double success = 0.0;
    for (const auto& c : compiled) {
      bool manipulated = false, caught = false;
      for (int s : c.steps) {
        if (s >= 0) {
          manipulated = (mask >> s) & 1;
        } else if (manipulated) {
          caught = true;
          break;
        }
      }
      if (!caught && manipulated) success += c.probability;
    }
    if (success > best + 1e-12) {
      best = success;
      best_mask = mask;
    }
  }

  std::map<std::string, Decision> table;
  for (const auto& [h, idx] : points) {
    table.emplace(h, ((best_mask >> idx) & 1) ? Decision::Manipulate : Decision::Honest);
  }
  auto policy = ManipulationPolicy::from_table(std::move(table), Decision::Honest);
  const double success = analytic_success(policy, dist);
  return OptimalPolicy{std::move(policy), success, count};
}

double undetected_probability(double p, std::uint64_t k) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "p must lie in [0, 1]");
  return std::pow(p, static_cast<double>(k));
}

double detection_probability(double p, std::uint64_t k) { return 1.0 - undetected_probability(p, k); }

double binomial_standard_error(double p, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

Estimate monte_carlo_success(const ManipulationPolicy& policy, const BehaviorDistribution& dist,
                             std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) fail(ErrorCode::InvalidArgument, "trials must be at least 1");
  // Outcomes only depend on the sampled pattern, so cache them per pattern.
  std::map<std::string, bool> success_of;
  for (const auto& e : dist.entries()) {
    success_of.emplace(e.script.pattern(), simulate_policy_on_pattern(policy, e.script.pattern()) == Outcome::Success);
  }
  const Rng root(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    Rng rng = root.derive("monte-carlo", i);
    if (success_of.at(dist.sample(rng).pattern())) ++hits;
  }
  const double est = static_cast<double>(hits) / static_cast<double>(trials);
  return Estimate{est, binomial_standard_error(est, trials), trials};
}

}  // namespace ivxv
