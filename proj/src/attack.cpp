#include "ivxv/attack.hpp"

#include <numeric>

#include "ivxv/analysis.hpp"
#include "ivxv/ceremony.hpp"
#include "ivxv/error.hpp"

namespace ivxv {

AttackReport end_to_end_attack(const ElectionConfig& base, const ManipulationPolicy& policy, std::uint64_t k,
                               std::uint64_t trials) {
  if (trials == 0) fail(ErrorCode::InvalidArgument, "attack needs at least one trial");
  if (k > base.voters) fail(ErrorCode::InvalidArgument, "cannot corrupt more devices than there are voters");

  AttackReport report;
  report.k = k;
  report.trials = trials;
  report.p = outcome_probabilities(policy, base.distribution).undetected();
  report.analytic_undetected = undetected_probability(report.p, k);

  const Rng root(base.seed);
  std::vector<std::uint32_t> ids(base.voters);
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = root.derive("attack-trial", t);
    ElectionConfig config = base;
    config.seed = rng.next_u64();
    config.record_transcript = false;
    config.faults = FaultInjection{};
    config.policy = policy;
    std::iota(ids.begin(), ids.end(), 1u);
    for (std::uint64_t i = 0; i < k; ++i) {
      std::swap(ids[i], ids[i + rng.uniform(ids.size() - i)]);
    }
    config.corrupted.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));

    const auto result = run_election(config);
    if (!result.verdict.valid && result.verdict.reason == FailureReason::Complaint) ++report.detections;
    for (const auto& v : result.voters) {
      if (v.corrupted && v.final_manipulated && !v.complained) ++report.surviving_manipulations;
    }
  }
  report.empirical_detected = static_cast<double>(report.detections) / static_cast<double>(trials);
  report.standard_error = binomial_standard_error(report.empirical_detected, trials);
  return report;
}

}  // namespace ivxv
