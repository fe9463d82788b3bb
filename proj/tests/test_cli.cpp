// Exercises the shared library through its C header and the ivxv-sim
// binary through its exit-code contract.
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ivxv_sim.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run sh(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " IVXV_CLI " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ivxv-cli-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kConfigs = IVXV_SOURCE_DIR "/configs/";
const std::string kGolden = IVXV_SOURCE_DIR "/tests/golden/";

}  // namespace

TEST_CASE("C API: analysis") {
  ivxv_distribution* d = nullptr;
  ivxv_policy* p = nullptr;
  REQUIRE(ivxv_distribution_default(&d) == IVXV_OK);
  REQUIRE(ivxv_policy_resolve("always", &p) == IVXV_OK);
  double s = 0;
  CHECK(ivxv_analytic_success(p, d, &s) == IVXV_OK);
  CHECK(s == doctest::Approx(0.96));

  ivxv_policy* best = nullptr;
  std::uint64_t examined = 0;
  CHECK(ivxv_optimal_policy(d, 4, &best, &s, &examined) == IVXV_OK);
  CHECK(s == doctest::Approx(0.96));
  CHECK(examined == 8);
  char* csv = nullptr;
  CHECK(ivxv_policy_csv(best, &csv) == IVXV_OK);
  CHECK(std::string(csv) == "history,decision\n-,M\nV,M\nVV,M\n*,H\n");
  ivxv_string_free(csv);

  CHECK(ivxv_optimal_policy(d, 9, nullptr, &s, nullptr) == IVXV_E_MAX_LEN_EXCEEDED);
  CHECK(std::string(ivxv_last_error()).find("max-len") != std::string::npos);
  CHECK(std::string(ivxv_status_name(IVXV_E_MAX_LEN_EXCEEDED)) == "max-len-exceeded");

  ivxv_distribution* bad = nullptr;
  CHECK(ivxv_distribution_parse("pattern,probability\nV,0.3\n", &bad) == IVXV_E_INVALID_DISTRIBUTION);
  CHECK(bad == nullptr);
  CHECK(ivxv_analytic_success(nullptr, d, &s) == IVXV_E_INVALID_ARGUMENT);

  double u = 0;
  CHECK(ivxv_undetected_probability(0.96, 100, &u) == IVXV_OK);
  CHECK(u == doctest::Approx(0.01687).epsilon(1e-3));
  CHECK(ivxv_undetected_probability(-0.1, 1, &u) == IVXV_E_INVALID_ARGUMENT);

  ivxv_policy_free(best);
  ivxv_policy_free(p);
  ivxv_distribution_free(d);
  CHECK(std::string(ivxv_version()).size() > 0);
}

TEST_CASE("C API: election, transcript and replay") {
  ivxv_config* c = nullptr;
  REQUIRE(ivxv_config_load((kConfigs + "honest10.json").c_str(), &c) == IVXV_OK);
  ivxv_election* e = nullptr;
  REQUIRE(ivxv_election_run(c, &e) == IVXV_OK);
  int valid = 0;
  const char* reason = nullptr;
  CHECK(ivxv_election_verdict(e, &valid, &reason) == IVXV_OK);
  CHECK(valid == 1);
  CHECK(std::string(reason) == "none");

  char* jsonl = nullptr;
  REQUIRE(ivxv_election_transcript(e, &jsonl) == IVXV_OK);
  ivxv_replay_report rep{};
  CHECK(ivxv_replay_text(jsonl, &rep) == IVXV_OK);
  CHECK(rep.matches == 1);
  CHECK(rep.recomputed_valid == 1);
  ivxv_string_free(jsonl);

  ivxv_config* bad = nullptr;
  CHECK(ivxv_config_parse("{\"voters\": 3}", nullptr, &bad) == IVXV_E_CONFIG);
  CHECK(ivxv_config_parse("not json", nullptr, &bad) == IVXV_E_CONFIG);
  CHECK(ivxv_config_load("/nonexistent.json", &bad) == IVXV_E_IO);

  ivxv_policy* p = nullptr;
  REQUIRE(ivxv_policy_resolve("always", &p) == IVXV_OK);
  ivxv_attack_report r{};
  CHECK(ivxv_attack(c, p, 0, 20, &r) == IVXV_OK);
  CHECK(r.empirical_detected == 0.0);
  CHECK(ivxv_attack(c, p, 1, 0, &r) == IVXV_E_INVALID_ARGUMENT);
  CHECK(ivxv_attack(c, p, 11, 1, &r) == IVXV_E_INVALID_ARGUMENT);

  ivxv_policy_free(p);
  ivxv_election_free(e);
  ivxv_config_free(c);
}

TEST_CASE("cli run: exit codes and outputs") {
  const auto honest = scratch("honest");
  auto r = sh("run " + kConfigs + "honest10.json --out " + honest.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(honest / "transcript.jsonl"));
  const auto summary = slurp(honest / "summary.json");
  CHECK(summary.find("\"valid\": true") != std::string::npos);

  const auto corrupted = scratch("corrupted");
  r = sh("run " + kConfigs + "corrupted_vc.json --out " + corrupted.string());
  CHECK(r.code == 2);
  CHECK(slurp(corrupted / "summary.json").find("\"reason\": \"complaint\"") != std::string::npos);

  CHECK(sh("run /nonexistent/config.json --out " + scratch("missing").string()).code == 1);
  CHECK(sh("run").code == 1);
  CHECK(sh("frobnicate").code == 1);
}

TEST_CASE("cli run: seeds") {
  const auto a = scratch("seed-a"), b = scratch("seed-b"), c = scratch("seed-c"), d = scratch("seed-d");
  const std::string cfg = kConfigs + "honest10.json";
  REQUIRE(sh("run " + cfg + " --seed 5 --out " + a.string()).code == 0);
  REQUIRE(sh("run " + cfg + " --seed 5 --out " + b.string()).code == 0);
  REQUIRE(sh("run " + cfg + " --seed 6 --out " + c.string()).code == 0);
  REQUIRE(sh("run " + cfg + " --seed 6 --out " + d.string(), "IVXV_SIM_SEED=5").code == 0);
  CHECK(slurp(a / "transcript.jsonl") == slurp(b / "transcript.jsonl"));
  CHECK(slurp(a / "transcript.jsonl") != slurp(c / "transcript.jsonl"));
  CHECK(slurp(a / "transcript.jsonl") == slurp(d / "transcript.jsonl"));
  CHECK(sh("run " + cfg + " --out " + d.string(), "IVXV_SIM_SEED=abc").code == 1);
}

TEST_CASE("cli analyze") {
  auto r = sh("analyze --policy always");
  CHECK(r.code == 0);
  CHECK(r.out.find("analytic_success: 0.960000\n") != std::string::npos);
  r = sh("analyze " IVXV_SOURCE_DIR "/data/estonia_aggregate.csv --max-len 4");
  CHECK(r.code == 0);
  CHECK(r.out == slurp(kGolden + "analyze_default_maxlen4.txt"));

  const auto dir = scratch("analyze");
  std::ofstream(dir / "v.csv") << "pattern,probability\nV,1.0\n";
  r = sh("analyze " + (dir / "v.csv").string() + " --policy always");
  CHECK(r.out.find("analytic_success: 1.000000\n") != std::string::npos);
  std::ofstream(dir / "bad.csv") << "pattern,probability\nV,0.5\n";
  CHECK(sh("analyze " + (dir / "bad.csv").string()).code == 1);
  CHECK(sh("analyze --policy sometimes").code == 1);
}

TEST_CASE("cli sweep") {
  auto r = sh("sweep --p 0.96 --k-min 100 --k-max 102");
  CHECK(r.code == 0);
  CHECK(r.out == slurp(kGolden + "sweep_p096_k100_102.csv"));
  const auto dir = scratch("sweep");
  CHECK(sh("sweep --p 0.96 --k-min 200 --k-max 200 --out " + (dir / "s.csv").string()).code == 0);
  CHECK(slurp(dir / "s.csv") == slurp(kGolden + "sweep_p096_k200.csv"));
  r = sh("sweep --p 1.0 --k-min 0 --k-max 3");
  CHECK(r.out == "k,undetected,detected\n0,1.000000,0.000000\n1,1.000000,0.000000\n2,1.000000,0.000000\n"
                 "3,1.000000,0.000000\n");
  CHECK(sh("sweep --p 0.9 --k-min 5 --k-max 4").code == 1);
  CHECK(sh("sweep --p 1.5").code == 1);
}

TEST_CASE("cli attack") {
  const std::string cfg = kConfigs + "honest10.json";
  auto r = sh("attack " + cfg + " --corrupted 0 --trials 20");
  CHECK(r.code == 0);
  CHECK(r.out == "k,p,analytic_undetected,empirical_detected,stderr\n0,0.960000,1.000000,0.000000,0.000000\n");
  CHECK(sh("attack " + cfg + " --corrupted 1 --trials 0").code == 1);
  CHECK(sh("attack " + cfg + " --corrupted 11 --trials 1").code == 1);
  r = sh("attack " + cfg + " --policy never --corrupted 3 --trials 10");
  CHECK(r.out.find("\n3,1.000000,1.000000,0.000000,0.000000\n") != std::string::npos);
}

TEST_CASE("cli replay") {
  const auto dir = scratch("replay");
  REQUIRE(sh("run " + kConfigs + "honest10.json --out " + dir.string()).code == 0);
  const auto path = dir / "transcript.jsonl";
  CHECK(sh("replay " + path.string()).code == 0);

  const auto text = slurp(path);
  auto flipped = text;
  const auto at = flipped.find("\"c2\":\"", flipped.find("\"kind\":\"ballot\"")) + 6;
  flipped[at] = flipped[at] == '1' ? '2' : '1';
  std::ofstream(dir / "flipped.jsonl", std::ios::binary) << flipped;
  CHECK(sh("replay " + (dir / "flipped.jsonl").string()).code == 2);

  std::ofstream(dir / "truncated.jsonl", std::ios::binary) << text.substr(0, text.size() / 2);
  CHECK(sh("replay " + (dir / "truncated.jsonl").string()).code == 1);
  CHECK(sh("replay " + (dir / "absent.jsonl").string()).code == 1);

  // A recorded invalid verdict replays as a match but still exits 2.
  const auto bad = scratch("replay-invalid");
  REQUIRE(sh("run " + kConfigs + "corrupted_vc.json --out " + bad.string()).code == 2);
  CHECK(sh("replay " + (bad / "transcript.jsonl").string()).code == 2);
}
