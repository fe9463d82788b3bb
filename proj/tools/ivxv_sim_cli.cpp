// ivxv-sim: run elections, analyse adversary policies and replay transcripts.
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ivxv_sim.h"

namespace {

constexpr int kExitValid = 0;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;

struct Failure {
  std::string message;
};

void check(ivxv_status s, const std::string& context) {
  if (s != IVXV_OK) throw Failure{context + ": " + ivxv_status_name(s) + ": " + ivxv_last_error()};
}

// Owning wrappers over the C handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Distribution = Handle<ivxv_distribution, ivxv_distribution_free>;
using Policy = Handle<ivxv_policy, ivxv_policy_free>;
using Config = Handle<ivxv_config, ivxv_config_free>;
using Election = Handle<ivxv_election, ivxv_election_free>;

std::string take(char* s) {
  std::string out(s);
  ivxv_string_free(s);
  return out;
}

std::optional<std::uint64_t> effective_seed(const std::optional<std::uint64_t>& flag) {
  if (const char* env = std::getenv("IVXV_SIM_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    errno = 0;
    const auto v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || env[0] == '-') throw Failure{"IVXV_SIM_SEED is not a non-negative integer"};
    return v;
  }
  return flag;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{"cannot write " + path.string()};
  f << text;
  if (!f.flush()) throw Failure{"cannot write " + path.string()};
}

// CSV goes to the file if one was named, otherwise to stdout.
void emit_csv(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_file(out, text);
  }
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed_flag, const std::string& out) {
  Config config;
  check(ivxv_config_load(config_path.c_str(), config.out()), "config");
  if (auto seed = effective_seed(seed_flag)) check(ivxv_config_set_seed(config.get(), *seed), "seed");
  Election election;
  check(ivxv_election_run(config.get(), election.out()), "election");

  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Failure{"cannot create " + out + ": " + ec.message()};
  check(ivxv_election_write_transcript(election.get(), (std::filesystem::path(out) / "transcript.jsonl").c_str()),
        "transcript");
  char* summary = nullptr;
  check(ivxv_election_summary_json(election.get(), &summary), "summary");
  write_file(std::filesystem::path(out) / "summary.json", take(summary));

  int valid = 0;
  const char* reason = nullptr;
  check(ivxv_election_verdict(election.get(), &valid, &reason), "verdict");
  char* tally = nullptr;
  check(ivxv_election_tally_json(election.get(), &tally), "tally");
  std::cout << "tally: " << take(tally) << "\n";
  std::cout << "verdict: " << (valid ? "valid" : "invalid") << " (" << reason << ")\n";
  return valid ? kExitValid : kExitInvalid;
}

int cmd_analyze(const std::string& dist_path, const std::string& policy_name, const std::optional<unsigned>& max_len) {
  Distribution dist;
  check(ivxv_distribution_load(dist_path.c_str(), dist.out()), "distribution");
  Policy policy;
  check(ivxv_policy_resolve(policy_name.c_str(), policy.out()), "policy");
  ivxv_outcomes o{};
  check(ivxv_outcome_probabilities(policy.get(), dist.get(), &o), "analysis");
  char* name = nullptr;
  check(ivxv_policy_name(policy.get(), &name), "policy");
  std::cout << "policy: " << take(name) << "\n";
  std::cout << "analytic_success: " << fixed6(o.success) << "\n";
  std::cout << "caught: " << fixed6(o.caught) << "\n";
  std::cout << "silent_fail: " << fixed6(o.silent_fail) << "\n";
  if (max_len) {
    Policy best;
    double success = 0.0;
    std::uint64_t examined = 0;
    check(ivxv_optimal_policy(dist.get(), *max_len, best.out(), &success, &examined), "optimal policy");
    char* csv = nullptr;
    check(ivxv_policy_csv(best.get(), &csv), "policy");
    std::cout << "optimum: " << fixed6(success) << "\n";
    std::cout << "policies_examined: " << examined << "\n";
    std::cout << "optimal_policy:\n" << take(csv);
  }
  return kExitValid;
}

int cmd_sweep(double p, std::uint64_t k_min, std::uint64_t k_max, const std::string& out) {
  if (k_min > k_max) throw Failure{"--k-min must not exceed --k-max"};
  if (!(p >= 0.0 && p <= 1.0)) throw Failure{"--p must lie in [0, 1]"};
  std::string csv = "k,undetected,detected\n";
  for (std::uint64_t k = k_min;; ++k) {
    double undetected = 0.0, detected = 0.0;
    check(ivxv_undetected_probability(p, k, &undetected), "sweep");
    check(ivxv_detection_probability(p, k, &detected), "sweep");
    csv += std::to_string(k) + "," + fixed6(undetected) + "," + fixed6(detected) + "\n";
    if (k == k_max) break;
  }
  emit_csv(out, csv);
  return kExitValid;
}

int cmd_attack(const std::string& config_path, const std::string& policy_name, std::uint64_t k, std::uint64_t trials,
               const std::optional<std::uint64_t>& seed_flag, const std::string& out) {
  Config config;
  check(ivxv_config_load(config_path.c_str(), config.out()), "config");
  if (auto seed = effective_seed(seed_flag)) check(ivxv_config_set_seed(config.get(), *seed), "seed");
  Policy policy;
  check(ivxv_policy_resolve(policy_name.c_str(), policy.out()), "policy");
  ivxv_attack_report r{};
  check(ivxv_attack(config.get(), policy.get(), k, trials, &r), "attack");
  std::string csv = "k,p,analytic_undetected,empirical_detected,stderr\n";
  csv += std::to_string(r.k) + "," + fixed6(r.p) + "," + fixed6(r.analytic_undetected) + "," +
         fixed6(r.empirical_detected) + "," + fixed6(r.standard_error) + "\n";
  emit_csv(out, csv);
  return kExitValid;
}

int cmd_replay(const std::string& path) {
  ivxv_replay_report r{};
  check(ivxv_replay_file(path.c_str(), &r), "replay");
  std::cout << "recorded: " << (r.recorded_valid ? "valid" : "invalid") << " (" << r.recorded_reason << ")\n";
  std::cout << "recomputed: " << (r.recomputed_valid ? "valid" : "invalid") << " (" << r.recomputed_reason << ")\n";
  return r.matches && r.recomputed_valid ? kExitValid : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IVXV ceremony simulator"};
  app.set_version_flag("--version", std::string(ivxv_version()));
  app.require_subcommand(1);

  std::string config_path, out, dist_path = "default", policy = "always", transcript;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> max_len;
  double p = 0.96;
  std::uint64_t k_min = 1, k_max = 1, corrupted = 0, trials = 0;

  auto* run = app.add_subcommand("run", "run one election and audit it");
  run->add_option("config", config_path, "election config (JSON)")->required();
  run->add_option("--seed", seed, "root seed (IVXV_SIM_SEED overrides)");
  run->add_option("--out", out, "output directory")->required();

  auto* analyze = app.add_subcommand("analyze", "success probability of a manipulation policy");
  analyze->add_option("distribution", dist_path, "behaviour CSV, or 'default'");
  analyze->add_option("--policy", policy, "always, never, or a policy CSV");
  analyze->add_option("--max-len", max_len, "also search all policies up to this pattern length");

  auto* sweep = app.add_subcommand("sweep", "undetected and detected probability over k");
  sweep->add_option("--p", p, "per-vote probability of staying undetected");
  sweep->add_option("--k-min", k_min, "first k");
  sweep->add_option("--k-max", k_max, "last k");
  sweep->add_option("--out", out, "CSV file (stdout if omitted)");

  auto* attack = app.add_subcommand("attack", "repeat full elections with corrupted devices");
  attack->add_option("config", config_path, "election config (JSON)")->required();
  attack->add_option("--policy", policy, "always, never, or a policy CSV");
  attack->add_option("--corrupted", corrupted, "number of corrupted devices")->required();
  attack->add_option("--trials", trials, "number of elections")->required();
  attack->add_option("--seed", seed, "root seed (IVXV_SIM_SEED overrides)");
  attack->add_option("--out", out, "CSV file (stdout if omitted)");

  auto* replay = app.add_subcommand("replay", "re-run the audit over a stored transcript");
  replay->add_option("transcript", transcript, "transcript.jsonl")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*run) return cmd_run(config_path, seed, out);
    if (*analyze) return cmd_analyze(dist_path, policy, max_len);
    if (*sweep) return cmd_sweep(p, k_min, k_max, out);
    if (*attack) return cmd_attack(config_path, policy, corrupted, trials, seed, out);
    if (*replay) return cmd_replay(transcript);
  } catch (const Failure& f) {
    std::cerr << "ivxv-sim: " << f.message << "\n";
    return kExitError;
  }
  return kExitError;
}
