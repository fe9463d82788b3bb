#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ivxv/codec.hpp"

namespace ivxv {

struct TranscriptEvent {
  std::uint64_t seq = 0;
  std::string phase;
  std::string actor;
  std::string kind;
  json payload;
};

// Ordered event log of one election, serialised as JSON lines with the
// fields (seq, phase, actor, kind, payload).
class Transcript {
 public:
  void append(std::string_view phase, std::string_view actor, std::string_view kind, json payload);

  const std::vector<TranscriptEvent>& events() const { return events_; }
  bool empty() const { return events_.empty(); }

  std::string to_jsonl() const;
  void write(const std::filesystem::path& path) const;

  // Throws Error(Malformed) on any unparsable line or out-of-order seq.
  static Transcript parse_jsonl(std::string_view text);
  static Transcript read(const std::filesystem::path& path);

 private:
  std::vector<TranscriptEvent> events_;
};

}  // namespace ivxv
