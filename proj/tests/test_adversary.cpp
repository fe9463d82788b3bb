#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "doctest.h"
#include "ivxv/analysis.hpp"
#include "ivxv/attack.hpp"
#include "ivxv/error.hpp"
#include "ivxv/rng.hpp"

using namespace ivxv;

namespace {

using Dist = std::vector<std::pair<std::string, double>>;

// Reference evaluation of a policy given as a set of manipulated histories.
double reference_success(const Dist& d, const std::set<std::string>& manipulate_at) {
  double total = 0.0;
  for (const auto& [pat, p] : d) {
    bool last = false, caught = false;
    for (std::size_t i = 0; i < pat.size() && !caught; ++i) {
      if (pat[i] == 'V') {
        last = manipulate_at.count(pat.substr(0, i)) > 0;
      } else {
        caught = last;
      }
    }
    if (last && !caught) total += p;
  }
  return total;
}

// Reference optimum: recursive enumeration of every subset of decision
// points.
double reference_optimum(const Dist& d) {
  std::set<std::string> points_set;
  for (const auto& [pat, p] : d) {
    for (std::size_t i = 0; i < pat.size(); ++i) {
      if (pat[i] == 'V') points_set.insert(pat.substr(0, i));
    }
  }
  const std::vector<std::string> points(points_set.begin(), points_set.end());
  std::set<std::string> chosen;
  double best = 0.0;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == points.size()) {
      best = std::max(best, reference_success(d, chosen));
      return;
    }
    rec(i + 1);
    chosen.insert(points[i]);
    rec(i + 1);
    chosen.erase(points[i]);
  };
  rec(0);
  return best;
}

bool vote_after_check(const std::string& pat) {
  const auto c = pat.find('C');
  return c != std::string::npos && pat.find('V', c) != std::string::npos;
}

Dist random_distribution(Rng& rng) {
  std::vector<std::string> all;
  for (std::size_t len = 1; len <= 4; ++len) {
    for (std::uint32_t bits = 0; bits < (1u << (len - 1)); ++bits) {
      std::string s = "V";
      for (std::size_t i = 1; i < len; ++i) s += ((bits >> (i - 1)) & 1) ? 'C' : 'V';
      all.push_back(s);
    }
  }
  std::shuffle(all.begin(), all.end(), rng);
  const std::size_t support = 1 + rng.uniform(6);
  Dist d;
  std::vector<double> w;
  double sum = 0.0;
  for (std::size_t i = 0; i < support; ++i) {
    w.push_back(0.05 + rng.uniform_real());
    sum += w.back();
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < support; ++i) {
    const double p = i + 1 == support ? 1.0 - acc : w[i] / sum;
    acc += p;
    d.emplace_back(all[i], p);
  }
  return d;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Protocol;
}

}  // namespace

TEST_CASE("voter scripts") {
  CHECK(VoterScript::parse("VVC").size() == 3);
  CHECK(VoterScript::parse("VC")[1] == Action::Check);
  for (const char* bad : {"", "C", "CV", "VX", "vv"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { VoterScript::parse(bad); }) == ErrorCode::InvalidDistribution);
  }
}

TEST_CASE("distribution loading") {
  const auto d = BehaviorDistribution::estonia_aggregate();
  CHECK(d.entries().size() == 5);
  CHECK(d.probability("VVC") == doctest::Approx(0.010));
  CHECK(d.probability("CCC") == 0.0);
  CHECK(d.max_pattern_length() == 3);
  const auto again = BehaviorDistribution::parse_csv(d.to_csv());
  CHECK(again.to_csv() == d.to_csv());

  const auto file = BehaviorDistribution::load_csv(IVXV_SOURCE_DIR "/data/estonia_aggregate.csv");
  CHECK(file.to_csv() == d.to_csv());

  CHECK(code_of([] { BehaviorDistribution::parse_csv("pattern,probability\nV,0.5\n"); }) ==
        ErrorCode::InvalidDistribution);
  CHECK(code_of([] { BehaviorDistribution::parse_csv("pattern,probability\nV,0.5\nV,0.5\n"); }) ==
        ErrorCode::InvalidDistribution);
  CHECK(code_of([] { BehaviorDistribution::parse_csv("pattern,probability\nV,1.5\nVC,-0.5\n"); }) ==
        ErrorCode::InvalidDistribution);
  CHECK(code_of([] { BehaviorDistribution::parse_csv("pat,prob\nV,1\n"); }) == ErrorCode::InvalidDistribution);
  CHECK(code_of([] { BehaviorDistribution::parse_csv("pattern,probability\nCV,1\n"); }) ==
        ErrorCode::InvalidDistribution);
  CHECK(code_of([] { BehaviorDistribution::load_csv("/nonexistent/d.csv"); }) == ErrorCode::Io);
}

TEST_CASE("sampling never returns a zero-mass pattern") {
  const auto d = BehaviorDistribution::from_entries({{"V", 0.0}, {"VV", 1.0}, {"VC", 0.0}});
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) CHECK(d.sample(rng).pattern() == "VV");
}

TEST_CASE("policies") {
  CHECK(ManipulationPolicy::always().decide("VCV") == Decision::Manipulate);
  CHECK(ManipulationPolicy::never().decide("") == Decision::Honest);

  const auto p = ManipulationPolicy::parse_csv("history,decision\n-,H\nV,M\nVC,H\n*,H\n");
  CHECK(p.decide("") == Decision::Honest);
  CHECK(p.decide("V") == Decision::Manipulate);
  CHECK(p.decide("VVVV") == Decision::Honest);
  CHECK(ManipulationPolicy::parse_csv(p.to_csv()).to_csv() == p.to_csv());

  // Without a fallback the table must be total up to its longest history.
  CHECK(code_of([] { ManipulationPolicy::parse_csv("history,decision\nV,M\n"); }) == ErrorCode::InvalidPolicy);
  const auto total = ManipulationPolicy::parse_csv("history,decision\n-,M\nV,H\n");
  CHECK(total.decide("V") == Decision::Honest);
  CHECK(code_of([&] { total.decide("VV"); }) == ErrorCode::HistoryTooLong);
  CHECK(code_of([] { ManipulationPolicy::parse_csv("history,decision\n-,X\n"); }) == ErrorCode::InvalidPolicy);
  CHECK(code_of([] { ManipulationPolicy::parse_csv("history,decision\n-,M\n-,H\n"); }) == ErrorCode::InvalidPolicy);
  CHECK(code_of([] { ManipulationPolicy::resolve("sometimes"); }) == ErrorCode::Io);
  CHECK(ManipulationPolicy::resolve("never").name() == "never");
}

TEST_CASE("outcomes of single patterns") {
  const auto always = ManipulationPolicy::always();
  CHECK(simulate_policy_on_pattern(always, "V") == Outcome::Success);
  CHECK(simulate_policy_on_pattern(always, "VC") == Outcome::Caught);
  CHECK(simulate_policy_on_pattern(always, "VCV") == Outcome::Caught);
  CHECK(simulate_policy_on_pattern(ManipulationPolicy::never(), "VV") == Outcome::SilentFail);
  const auto late = ManipulationPolicy::from_table({}, Decision::Honest);
  CHECK(simulate_policy_on_pattern(late, "VCV") == Outcome::SilentFail);
  const auto wait = ManipulationPolicy::from_table({{"VC", Decision::Manipulate}}, Decision::Honest);
  CHECK(simulate_policy_on_pattern(wait, "VCV") == Outcome::Success);
  CHECK(simulate_policy_on_pattern(wait, "VCVC") == Outcome::Caught);
}

TEST_CASE("analytic success") {
  const auto d = BehaviorDistribution::estonia_aggregate();
  double vote_only = 0.0;
  for (const auto& e : d.entries()) {
    if (e.script.pattern().find('C') == std::string::npos) vote_only += e.probability;
  }
  CHECK(vote_only == doctest::Approx(0.96).epsilon(1e-12));
  const auto o = outcome_probabilities(ManipulationPolicy::always(), d);
  CHECK(o.success == doctest::Approx(vote_only).epsilon(1e-12));
  CHECK(o.caught == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(o.silent_fail == 0.0);
  CHECK(o.undetected() == doctest::Approx(0.96));
  CHECK(analytic_success(ManipulationPolicy::never(), d) == 0.0);
  CHECK(analytic_success(ManipulationPolicy::always(), BehaviorDistribution::from_entries({{"V", 1.0}})) == 1.0);
}

TEST_CASE("optimal policy examples") {
  const auto d = BehaviorDistribution::estonia_aggregate();
  const auto best = optimal_policy(d, 4);
  CHECK(best.success == doctest::Approx(0.96).epsilon(1e-12));
  CHECK(best.policies_examined == 8);
  CHECK(analytic_success(ManipulationPolicy::always(), d) == doctest::Approx(best.success).epsilon(1e-12));
  for (const char* h : {"", "V", "VV"}) CHECK(best.policy.decide(h) == Decision::Manipulate);

  const auto half = optimal_policy(BehaviorDistribution::from_entries({{"V", 0.5}, {"VC", 0.5}}), 2);
  CHECK(half.success == doctest::Approx(0.5));
  CHECK(half.policy.decide("") == Decision::Manipulate);

  CHECK(optimal_policy(BehaviorDistribution::from_entries({{"VC", 1.0}}), 2).success == 0.0);

  CHECK(code_of([&] { optimal_policy(d, 2); }) == ErrorCode::MaxLenExceeded);
  CHECK(code_of([&] { optimal_policy(d, 9); }) == ErrorCode::MaxLenExceeded);
}

TEST_CASE("waiting out a check can beat always-manipulate") {
  // V outweighs VC, yet the VCV mass is only reachable by staying honest
  // until after the check.
  const Dist raw{{"V", 0.3}, {"VC", 0.1}, {"VCV", 0.6}};
  const auto d = BehaviorDistribution::from_entries(raw);
  const auto best = optimal_policy(d, 3);
  CHECK(best.success == doctest::Approx(0.6));
  CHECK(best.success == doctest::Approx(reference_optimum(raw)));
  CHECK(analytic_success(ManipulationPolicy::always(), d) == doctest::Approx(0.3));
  CHECK(best.policy.decide("") == Decision::Honest);
  CHECK(best.policy.decide("VC") == Decision::Manipulate);
}

TEST_CASE("property: brute-force optimum agrees with the reference oracle") {
  Rng root(77);
  int dominated = 0;
  for (int i = 0; i < 1000; ++i) {
    Rng rng = root.derive("dist", i);
    const auto raw = random_distribution(rng);
    const auto d = BehaviorDistribution::from_entries(raw);
    const auto best = optimal_policy(d, 4);
    CAPTURE(d.to_csv());
    CHECK(best.success == doctest::Approx(reference_optimum(raw)).epsilon(1e-9));
    CHECK(analytic_success(best.policy, d) == doctest::Approx(best.success).epsilon(1e-12));

    // Always-manipulate is optimal whenever no support pattern votes again
    // after a check.
    bool simple = true;
    for (const auto& [pat, p] : raw) simple = simple && !vote_after_check(pat);
    if (simple) {
      ++dominated;
      CHECK(analytic_success(ManipulationPolicy::always(), d) == doctest::Approx(best.success).epsilon(1e-9));
    }
  }
  CHECK(dominated > 50);
}

TEST_CASE("monte carlo agrees with the analytic value") {
  const auto d = BehaviorDistribution::estonia_aggregate();
  const auto always = ManipulationPolicy::always();
  const auto e = monte_carlo_success(always, d, 100000, 5);
  CHECK(e.trials == 100000);
  CHECK(std::abs(e.estimate - analytic_success(always, d)) <= 4 * e.standard_error);
  CHECK(monte_carlo_success(always, d, 100000, 5).estimate == e.estimate);
  CHECK(monte_carlo_success(ManipulationPolicy::never(), d, 1000, 5).estimate == 0.0);
  CHECK(code_of([&] { monte_carlo_success(always, d, 0, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("detection probability") {
  // exp(k log p) as an independent route to p^k.
  CHECK(undetected_probability(0.96, 100) == doctest::Approx(std::exp(100 * std::log(0.96))).epsilon(1e-12));
  CHECK(std::abs(undetected_probability(0.96, 100) - 0.01687) < 0.00001);
  CHECK(std::abs(undetected_probability(0.96, 200) - 0.00028) < 0.00001);
  CHECK(undetected_probability(0.3, 0) == 1.0);
  CHECK(undetected_probability(1.0, 1000) == 1.0);
  CHECK(code_of([] { undetected_probability(1.5, 1); }) == ErrorCode::InvalidArgument);

  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform_real(), q = rng.uniform_real();
    const auto k = rng.uniform(300);
    CHECK(detection_probability(p, k + 1) >= detection_probability(p, k));
    CHECK(detection_probability(std::max(p, q), k) <= detection_probability(std::min(p, q), k));
  }
}

TEST_CASE("end-to-end attack") {
  ElectionConfig base;
  base.voters = 4;
  base.trustees = 2;
  base.threshold = 2;
  base.candidates = 3;
  base.seed = 99;

  const auto none = end_to_end_attack(base, ManipulationPolicy::always(), 0, 50);
  CHECK(none.detections == 0);
  CHECK(none.empirical_detected == 0.0);
  CHECK(none.analytic_undetected == 1.0);

  const auto honest = end_to_end_attack(base, ManipulationPolicy::never(), 2, 50);
  CHECK(honest.detections == 0);
  CHECK(honest.surviving_manipulations == 0);

  const auto one = end_to_end_attack(base, ManipulationPolicy::always(), 1, 400);
  CHECK(one.p == doctest::Approx(0.96));
  CHECK(std::abs(one.empirical_detected - 0.04) <= 4 * std::sqrt(0.04 * 0.96 / 400));
  CHECK(one.detections + one.surviving_manipulations == 400);
  CHECK(end_to_end_attack(base, ManipulationPolicy::always(), 1, 400).detections == one.detections);

  CHECK(code_of([&] { end_to_end_attack(base, ManipulationPolicy::always(), 5, 1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { end_to_end_attack(base, ManipulationPolicy::always(), 1, 0); }) == ErrorCode::InvalidArgument);
}
