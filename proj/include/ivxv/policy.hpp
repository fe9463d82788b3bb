#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace ivxv {

enum class Decision : char { Manipulate = 'M', Honest = 'H' };

// Adversary rule deciding, from the voter's history so far (a string over
// {V, C}), whether to manipulate the vote about to be cast.
//
// Table policies are total over every history up to max_history() that is
// empty or starts with V; a "*" row supplies a fallback for any history.
class ManipulationPolicy {
 public:
  static ManipulationPolicy always();
  static ManipulationPolicy never();
  static ManipulationPolicy from_table(std::map<std::string, Decision> table,
                                       std::optional<Decision> fallback = std::nullopt);
  // CSV "history,decision" with decision in {M, H}; "-" or "" is the empty
  // history and "*" the fallback row.
  static ManipulationPolicy parse_csv(std::string_view text);
  static ManipulationPolicy load_csv(const std::filesystem::path& path);
  // "always", "never", or a path to a policy CSV.
  static ManipulationPolicy resolve(std::string_view name_or_path);

  // Throws HistoryTooLong for histories past the table bound.
  Decision decide(std::string_view history) const;

  const std::string& name() const { return name_; }
  bool is_table() const { return !uniform_.has_value(); }
  const std::map<std::string, Decision>& table() const { return table_; }
  std::optional<Decision> fallback() const { return fallback_; }
  std::size_t max_history() const { return max_history_; }

  std::string to_csv() const;

 private:
  ManipulationPolicy() = default;

  std::string name_;
  std::optional<Decision> uniform_;
  std::map<std::string, Decision> table_;
  std::optional<Decision> fallback_;
  std::size_t max_history_ = 0;
};

}  // namespace ivxv
