#include "ivxv/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ivxv/error.hpp"
#include "ivxv/group.hpp"
#include "ivxv/hash.hpp"

namespace ivxv {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::Config, what); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::uint32_t required_u32(const json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing required field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) bad(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::uint32_t>();
}

std::vector<std::uint32_t> id_list(const json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  std::vector<std::uint32_t> out;
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) bad(std::string(what) + " entries must be non-negative integers");
    out.push_back(v.get<std::uint32_t>());
  }
  return out;
}

void check_ids(const std::vector<std::uint32_t>& ids, std::uint32_t max, const char* what) {
  std::set<std::uint32_t> seen;
  for (auto id : ids) {
    if (id < 1 || id > max) bad(std::string(what) + " id " + std::to_string(id) + " out of range");
    if (!seen.insert(id).second) bad(std::string("duplicate ") + what + " id " + std::to_string(id));
  }
}

ManipulationPolicy parse_policy(const json& j, const std::filesystem::path& base, ElectionConfig& config) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "always" || s == "never") return ManipulationPolicy::resolve(s);
    const auto path = resolve(base, s);
    config.input_digests[path.filename().string()] = to_hex(sha256(read_file(path)));
    return ManipulationPolicy::load_csv(path);
  }
  if (j.is_object() && j.contains("csv")) {
    const auto name = j.value("name", std::string("table"));
    if (name == "always" || name == "never") return ManipulationPolicy::resolve(name);
    return ManipulationPolicy::parse_csv(j.at("csv").get<std::string>());
  }
  bad("corruption.policy must be 'always', 'never', a CSV path or {\"csv\": ...}");
}

}  // namespace

void ElectionConfig::validate() const {
  if (voters < 1) bad("voters must be at least 1");
  if (trustees < 1) bad("trustees must be at least 1");
  if (threshold < 1 || threshold > trustees) bad("threshold must satisfy 1 <= t <= k");
  if (candidates < 1) bad("candidates must be at least 1");
  try {
    const auto params = setup(group, candidates);
    if (mpz_class(trustees) >= params.q) bad("trustees must be smaller than the group order");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    bad(e.what());
  }
  if (!intents.empty()) {
    if (intents.size() != voters) bad("intents must list one candidate per voter");
    for (auto m : intents) {
      if (m >= candidates) bad("intent " + std::to_string(m) + " is not a candidate");
    }
  }
  for (const auto& [voter, script] : scripts) {
    if (voter < 1 || voter > voters) bad("script override for unknown voter " + std::to_string(voter));
    try {
      (void)VoterScript::parse(script);
    } catch (const Error& e) {
      bad(std::string("script override: ") + e.what());
    }
  }
  check_ids(corrupted, voters, "corrupted voter");
  if (!corrupted.empty()) {
    if (candidates < 2) bad("manipulation needs at least two candidates");
    if (adversary_shift < 1 || adversary_shift >= candidates) bad("adversary shift must lie in [1, C)");
  }
  check_ids(tally_trustees, trustees, "tally trustee");
}

ElectionConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("config must be a JSON object");
  ElectionConfig c;
  try {
    c.sid = j.value("sid", c.sid);
    c.voters = required_u32(j, "voters");
    c.trustees = required_u32(j, "trustees");
    c.threshold = required_u32(j, "threshold");
    c.candidates = required_u32(j, "candidates");
    c.group = j.value("group", c.group);

    if (j.contains("distribution")) {
      const auto& d = j.at("distribution");
      if (d.is_string() && d.get<std::string>() == "default") {
        c.distribution_source = "default";
      } else if (d.is_string()) {
        const auto path = resolve(base_dir, d.get<std::string>());
        const auto text = read_file(path);
        c.distribution = BehaviorDistribution::parse_csv(text);
        c.distribution_source = d.get<std::string>();
        c.input_digests[path.filename().string()] = to_hex(sha256(text));
      } else if (d.is_object() && d.contains("entries")) {
        std::vector<std::pair<std::string, double>> rows;
        const auto& e = d.at("entries");
        if (e.is_object()) {
          for (const auto& [pattern, prob] : e.items()) rows.emplace_back(pattern, prob.get<double>());
        } else {
          for (const auto& row : e) rows.emplace_back(row.at(0).get<std::string>(), row.at(1).get<double>());
        }
        c.distribution = BehaviorDistribution::from_entries(rows);
        c.distribution_source = d.value("source", std::string("inline"));
      } else {
        bad("distribution must be \"default\", a CSV path or {\"entries\": ...}");
      }
    }

    if (j.contains("intents")) c.intents = id_list(j.at("intents"), "intents");
    if (j.contains("scripts")) {
      for (const auto& [voter, script] : j.at("scripts").items()) {
        std::size_t used = 0;
        unsigned long id = 0;
        try {
          id = std::stoul(voter, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != voter.size()) bad("script override key '" + voter + "' is not a voter id");
        c.scripts[static_cast<std::uint32_t>(id)] = script.get<std::string>();
      }
    }
    if (j.contains("corruption")) {
      const auto& cor = j.at("corruption");
      if (cor.contains("voters")) c.corrupted = id_list(cor.at("voters"), "corruption.voters");
      if (cor.contains("policy")) c.policy = parse_policy(cor.at("policy"), base_dir, c);
      c.adversary_shift = cor.value("shift", c.adversary_shift);
    }
    if (j.contains("tally_trustees")) c.tally_trustees = id_list(j.at("tally_trustees"), "tally_trustees");
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) bad("seed must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.threshold_strict = j.value("threshold_strict", false);
    c.ea_strict_halt = j.value("ea_strict_halt", false);
    if (j.contains("faults")) {
      const auto& f = j.at("faults");
      c.faults.forge_signature = f.value("forge_signature", false);
      c.faults.mix_non_last = f.value("mix_non_last", false);
      c.faults.tamper_shuffle_output = f.value("tamper_shuffle_output", false);
      c.faults.tamper_plaintext = f.value("tamper_plaintext", false);
    }
    if (j.contains("input_digests")) c.input_digests = j.at("input_digests").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    bad(std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config || e.code() == ErrorCode::Io) throw;
    bad(e.what());
  }
  c.validate();
  return c;
}

ElectionConfig load_config(const std::filesystem::path& path) {
  const auto text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad("cannot parse " + path.string() + ": " + e.what());
  }
  auto c = parse_config(j, path.parent_path());
  c.input_digests[path.filename().string()] = to_hex(sha256(text));
  return c;
}

json to_json(const ElectionConfig& c) {
  json entries = json::array();
  for (const auto& e : c.distribution.entries()) entries.push_back(json::array({e.script.pattern(), e.probability}));
  json scripts = json::object();
  for (const auto& [voter, s] : c.scripts) scripts[std::to_string(voter)] = s;
  return json{
      {"sid", c.sid},
      {"voters", c.voters},
      {"trustees", c.trustees},
      {"threshold", c.threshold},
      {"candidates", c.candidates},
      {"group", c.group},
      {"distribution", {{"source", c.distribution_source}, {"entries", std::move(entries)}}},
      {"intents", c.intents},
      {"scripts", std::move(scripts)},
      {"corruption",
       {{"voters", c.corrupted},
        {"policy", {{"name", c.policy.name()}, {"csv", c.policy.to_csv()}}},
        {"shift", c.adversary_shift}}},
      {"tally_trustees", c.tally_trustees},
      {"seed", c.seed},
      {"threshold_strict", c.threshold_strict},
      {"ea_strict_halt", c.ea_strict_halt},
      {"faults",
       {{"forge_signature", c.faults.forge_signature},
        {"mix_non_last", c.faults.mix_non_last},
        {"tamper_shuffle_output", c.faults.tamper_shuffle_output},
        {"tamper_plaintext", c.faults.tamper_plaintext}}},
      {"input_digests", c.input_digests},
  };
}

}  // namespace ivxv
