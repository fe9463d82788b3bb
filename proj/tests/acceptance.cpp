// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "ivxv/analysis.hpp"
#include "ivxv/attack.hpp"
#include "ivxv/ceremony.hpp"
#include "property_suites.hpp"

using namespace ivxv;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string capture(const std::string& args, int& code) {
  const std::string cmd = std::string(IVXV_CLI) + " " + args;
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  if (p == nullptr) {
    code = -1;
    return out;
  }
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = pclose(p);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Verdict with_budget(Verdict v, double seconds, double budget) {
  if (seconds > budget) {
    v.pass = false;
    v.detail += " [over time budget of " + fmt("%.0f", budget) + " s]";
  }
  return v;
}

// 1. analyze on the default distribution, always-manipulate.
Verdict analyze_success() {
  int code = 0;
  const auto out = capture("analyze " IVXV_SOURCE_DIR "/data/estonia_aggregate.csv --policy always", code);
  const auto at = out.find("analytic_success: ");
  if (code != 0 || at == std::string::npos) return {false, "analyze failed (exit " + std::to_string(code) + ")"};
  const double v = std::stod(out.substr(at + 18));
  const bool ok = std::round(v * 1e4) == 9600.0;
  return {ok, "analytic_success = " + fmt("%.6f", v)};
}

// 2. sweep at k = 100 and k = 200.
Verdict sweep_checkpoints() {
  std::map<int, double> want{{100, 1.687}, {200, 0.028}};
  std::string detail;
  bool ok = true;
  for (const auto& [k, pct] : want) {
    int code = 0;
    const auto out = capture("sweep --p 0.96 --k-min " + std::to_string(k) + " --k-max " + std::to_string(k), code);
    const auto nl = out.find('\n');
    if (code != 0 || nl == std::string::npos) return {false, "sweep failed"};
    std::stringstream row(out.substr(nl + 1));
    std::string kk, undetected;
    std::getline(row, kk, ',');
    std::getline(row, undetected, ',');
    const double got = std::stod(undetected) * 100.0;
    ok = ok && kk == std::to_string(k) && std::abs(got - pct) <= 0.001 + 1e-12;
    detail += "k=" + std::to_string(k) + ": " + fmt("%.4f", got) + "% (target " + fmt("%.3f", pct) + "%) ";
  }
  return {ok, detail};
}

// 3. exhaustive optimum over maxLen 4, attained by always-manipulate.
Verdict optimum_oracle() {
  const auto d = BehaviorDistribution::estonia_aggregate();
  const auto best = optimal_policy(d, 4);
  const double always = analytic_success(ManipulationPolicy::always(), d);
  bool manipulates_everywhere = true;
  for (const auto& [h, decision] : best.policy.table()) manipulates_everywhere &= decision == Decision::Manipulate;
  const bool ok = std::round(best.success * 1e4) == 9600.0 && std::abs(always - best.success) < 1e-12 &&
                  manipulates_everywhere;
  return {ok, "optimum = " + fmt("%.6f", best.success) + ", always = " + fmt("%.6f", always) + ", " +
                  std::to_string(best.policies_examined) + " policies examined"};
}

ElectionConfig toy_config(std::uint32_t n, std::uint32_t k, std::uint32_t t, std::uint32_t c, std::uint64_t seed) {
  ElectionConfig cfg;
  cfg.sid = "acceptance";
  cfg.voters = n;
  cfg.trustees = k;
  cfg.threshold = t;
  cfg.candidates = c;
  cfg.group = "toy";
  cfg.seed = seed;
  return cfg;
}

// 4. 10^4 full ceremonies with one corrupted device.
Verdict ceremony_agreement() {
  const std::uint64_t trials = 10000;
  const auto report = end_to_end_attack(toy_config(10, 3, 2, 4, 2024), ManipulationPolicy::always(), 1, trials);
  const double target = 1.0 - 0.96;
  const double se = std::sqrt(target * (1.0 - target) / static_cast<double>(trials));
  const bool ok = std::abs(report.empirical_detected - target) <= 4 * se;
  return {ok, "detected " + std::to_string(report.detections) + "/" + std::to_string(trials) + " = " +
                  fmt("%.4f", report.empirical_detected) + ", |diff| = " +
                  fmt("%.2f", std::abs(report.empirical_detected - target) / se) + " se (se " + fmt("%.4f", se) + ")"};
}

// 5. 1000 honest elections, n=20, k=3, t=2.
Verdict honest_elections() {
  std::uint64_t failures = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    auto cfg = toy_config(20, 3, 2, 5, 10000 + s);
    cfg.record_transcript = false;
    const auto r = run_election(cfg);
    std::map<std::uint32_t, std::uint64_t> expected;
    for (const auto& v : r.voters) ++expected[v.intent];
    if (!r.verdict.valid || r.tally.counts != expected || r.tally.rejected != 0) ++failures;
  }
  return {failures == 0, std::to_string(1000 - failures) + "/1000 valid with matching tally"};
}

// 6. every tamper scenario flips the verdict with the right reason.
Verdict tamper_suite() {
  struct Scenario {
    const char* name;
    std::function<void(ElectionConfig&)> apply;
    FailureReason expected;
  };
  const std::vector<Scenario> scenarios{
      {"forged-signature", [](ElectionConfig& c) { c.faults.forge_signature = true; }, FailureReason::BadSignature},
      {"non-last-mixed",
       [](ElectionConfig& c) {
         c.faults.mix_non_last = true;
         c.scripts[2] = "VV";
         c.corrupted = {2};
         c.policy = ManipulationPolicy::from_table({{"", Decision::Manipulate}}, Decision::Honest);
       },
       FailureReason::LastBallotMismatch},
      {"shuffle-output", [](ElectionConfig& c) { c.faults.tamper_shuffle_output = true; }, FailureReason::ShuffleProof},
      {"plaintext", [](ElectionConfig& c) { c.faults.tamper_plaintext = true; }, FailureReason::Decryption},
      {"complaint",
       [](ElectionConfig& c) {
         c.corrupted = {4};
         c.scripts[4] = "VC";
       },
       FailureReason::Complaint},
  };
  bool ok = true;
  std::string detail;
  for (const auto& sc : scenarios) {
    int hits = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      auto cfg = toy_config(8, 3, 2, 4, 500 + s);
      cfg.group = "small";
      cfg.record_transcript = false;
      sc.apply(cfg);
      const auto r = run_election(cfg);
      if (!r.verdict.valid && r.verdict.reason == sc.expected) ++hits;
    }
    ok = ok && hits == 100;
    detail += std::string(sc.name) + " " + std::to_string(hits) + "/100 ";
  }
  return {ok, detail};
}

// 7. crypto property suites.
Verdict crypto_properties() {
  const std::vector<testing::SuiteResult> suites{
      testing::rerandomization_suite(1000, 71), testing::trapdoor_suite(1000, 72),
      testing::shamir_subset_suite(1000, 73), testing::shuffle_completeness_suite(1000, 74),
      testing::shuffle_soundness_suite(1000, 75)};
  bool ok = true;
  std::string detail;
  for (const auto& s : suites) {
    ok = ok && s.ok() && s.cases >= 1000;
    detail += s.name + " " + std::to_string(s.cases - s.failures) + "/" + std::to_string(s.cases);
    if (s.false_accepts) detail += " (" + std::to_string(s.false_accepts) + " false accepts)";
    if (!s.notes.empty()) detail += " [" + s.notes.front() + "]";
    detail += "; ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "always-manipulate success on the default distribution", 1, analyze_success},
      {2, "undetected probability at k=100 and k=200", 1, sweep_checkpoints},
      {3, "exhaustive optimum for max-len 4", 10, optimum_oracle},
      {4, "ceremony detection rate with one corrupted device", 300, ceremony_agreement},
      {5, "1000 honest elections", 120, honest_elections},
      {6, "tamper suite", 600, tamper_suite},
      {7, "crypto property suites", 600, crypto_properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v = with_budget(v, secs, c.budget_seconds);
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << c.id << "  " << c.title << ": " << v.detail << " ("
              << fmt("%.2f", secs) << " s)" << std::endl;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
