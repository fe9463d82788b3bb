#include "ivxv/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ivxv/error.hpp"
#include "ivxv/rng.hpp"

namespace ivxv {

namespace {

constexpr double kSumTolerance = 1e-9;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::InvalidDistribution, what); }

}  // namespace

VoterScript VoterScript::parse(std::string_view pattern) {
  if (pattern.empty()) bad("empty voter pattern");
  if (pattern.front() != 'V') bad("pattern '" + std::string(pattern) + "' does not start with V");
  if (pattern.find_first_not_of("VC") != std::string_view::npos) {
    bad("pattern '" + std::string(pattern) + "' has symbols outside {V, C}");
  }
  return VoterScript(std::string(pattern));
}

BehaviorDistribution BehaviorDistribution::from_entries(const std::vector<std::pair<std::string, double>>& rows) {
  if (rows.empty()) bad("distribution has no rows");
  BehaviorDistribution d;
  std::set<std::string> seen;
  double sum = 0.0;
  for (const auto& [pattern, prob] : rows) {
    auto script = VoterScript::parse(pattern);
    if (!seen.insert(pattern).second) bad("duplicate pattern '" + pattern + "'");
    if (!(prob >= 0.0 && prob <= 1.0)) bad("probability of '" + pattern + "' outside [0, 1]");
    sum += prob;
    d.entries_.push_back(Entry{std::move(script), prob});
    d.cumulative_.push_back(sum);
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os << "probabilities sum to " << sum << ", expected 1";
    bad(os.str());
  }
  return d;
}

BehaviorDistribution BehaviorDistribution::parse_csv(std::string_view text) {
  std::vector<std::pair<std::string, double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (header) {
      header = false;
      if (t != "pattern,probability") bad("expected header 'pattern,probability'");
      continue;
    }
    auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
      bad("line " + std::to_string(lineno) + ": expected 'pattern,probability'");
    }
    auto value = trim(t.substr(comma + 1));
    std::size_t used = 0;
    double prob = 0.0;
    try {
      prob = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) bad("line " + std::to_string(lineno) + ": bad probability '" + value + "'");
    rows.emplace_back(trim(t.substr(0, comma)), prob);
  }
  if (header) bad("missing header 'pattern,probability'");
  return from_entries(rows);
}

BehaviorDistribution BehaviorDistribution::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read distribution file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

BehaviorDistribution BehaviorDistribution::estonia_aggregate() {
  // V and VV are the recorded shares; the other masses are fillers so that
  // vote-only patterns total 0.96 and check-terminated ones 0.04.
  return from_entries({{"V", 0.940}, {"VV", 0.015}, {"VVV", 0.005}, {"VC", 0.030}, {"VVC", 0.010}});
}

double BehaviorDistribution::probability(std::string_view pattern) const {
  for (const auto& e : entries_) {
    if (e.script.pattern() == pattern) return e.probability;
  }
  return 0.0;
}

std::size_t BehaviorDistribution::max_pattern_length() const {
  std::size_t m = 0;
  for (const auto& e : entries_) m = std::max(m, e.script.size());
  return m;
}

const VoterScript& BehaviorDistribution::sample(Rng& rng) const {
  const double u = rng.uniform_real() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  // upper_bound never lands on a zero-mass row, except via this guard.
  if (idx == entries_.size()) {
    --idx;
    while (idx > 0 && entries_[idx].probability == 0.0) --idx;
  }
  return entries_[idx].script;
}

std::string BehaviorDistribution::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "pattern,probability\n";
  for (const auto& e : entries_) os << e.script.pattern() << ',' << e.probability << '\n';
  return os.str();
}

}  // namespace ivxv
