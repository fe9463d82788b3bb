#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ivxv {

class Rng;

enum class Action : char { Vote = 'V', Check = 'C' };

// A voter behaviour pattern such as "VVC": non-empty, over {V, C}, and
// starting with a vote.
class VoterScript {
 public:
  // Throws Error(InvalidDistribution) on a malformed pattern.
  static VoterScript parse(std::string_view pattern);

  const std::string& pattern() const { return pattern_; }
  std::size_t size() const { return pattern_.size(); }
  Action operator[](std::size_t i) const { return static_cast<Action>(pattern_[i]); }

  friend bool operator==(const VoterScript&, const VoterScript&) = default;

 private:
  explicit VoterScript(std::string p) : pattern_(std::move(p)) {}
  std::string pattern_;
};

// Probability mass function over voter patterns.
class BehaviorDistribution {
 public:
  struct Entry {
    VoterScript script;
    double probability;
  };

  // Probabilities must lie in [0, 1] and sum to 1 within 1e-9; patterns
  // must be distinct. Throws Error(InvalidDistribution).
  static BehaviorDistribution from_entries(const std::vector<std::pair<std::string, double>>& rows);
  // CSV with header "pattern,probability".
  static BehaviorDistribution parse_csv(std::string_view text);
  static BehaviorDistribution load_csv(const std::filesystem::path& path);

  // Aggregate of the recorded Estonian voter behaviour: V 0.940, VV 0.015,
  // VVV 0.005, VC 0.030, VVC 0.010.
  static BehaviorDistribution estonia_aggregate();

  const std::vector<Entry>& entries() const { return entries_; }
  double probability(std::string_view pattern) const;
  std::size_t max_pattern_length() const;

  const VoterScript& sample(Rng& rng) const;

  std::string to_csv() const;

 private:
  std::vector<Entry> entries_;
  std::vector<double> cumulative_;
};

}  // namespace ivxv
