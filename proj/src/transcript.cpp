#include "ivxv/transcript.hpp"

#include <fstream>
#include <sstream>

#include "ivxv/error.hpp"

namespace ivxv {

void Transcript::append(std::string_view phase, std::string_view actor, std::string_view kind, json payload) {
  events_.push_back(TranscriptEvent{events_.size() + 1, std::string(phase), std::string(actor), std::string(kind),
                                    std::move(payload)});
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    json line{{"seq", e.seq}, {"phase", e.phase}, {"actor", e.actor}, {"kind", e.kind}, {"payload", e.payload}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

void Transcript::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << to_jsonl();
  if (!out) fail(ErrorCode::Io, "write to " + path.string() + " failed");
}

Transcript Transcript::parse_jsonl(std::string_view text) {
  Transcript t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      TranscriptEvent e{j.at("seq").get<std::uint64_t>(), j.at("phase").get<std::string>(),
                        j.at("actor").get<std::string>(), j.at("kind").get<std::string>(), j.at("payload")};
      if (e.seq != t.events_.size() + 1) fail(ErrorCode::Malformed, "line " + std::to_string(lineno) + ": seq out of order");
      t.events_.push_back(std::move(e));
    } catch (const json::exception& ex) {
      fail(ErrorCode::Malformed, "line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  if (!text.empty() && text.back() != '\n') fail(ErrorCode::Malformed, "transcript is truncated (no final newline)");
  return t;
}

Transcript Transcript::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_jsonl(ss.str());
}

}  // namespace ivxv
