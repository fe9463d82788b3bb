#include "ivxv/policy.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "ivxv/error.hpp"

namespace ivxv {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_history(std::string_view h) {
  return h.empty() || (h.front() == 'V' && h.find_first_not_of("VC") == std::string_view::npos);
}

// Every history of length <= n that is empty or starts with V.
void check_total(const std::map<std::string, Decision>& table, std::size_t n) {
  std::string h;
  if (!table.contains(h)) fail(ErrorCode::InvalidPolicy, "policy table misses the empty history");
  std::vector<std::string> frontier{"V"};
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (auto& cur : frontier) {
      if (!table.contains(cur)) fail(ErrorCode::InvalidPolicy, "policy table misses history '" + cur + "'");
      if (cur.size() < n) {
        next.push_back(cur + 'V');
        next.push_back(cur + 'C');
      }
    }
    frontier = std::move(next);
  }
}

}  // namespace

ManipulationPolicy ManipulationPolicy::always() {
  ManipulationPolicy p;
  p.name_ = "always";
  p.uniform_ = Decision::Manipulate;
  return p;
}

ManipulationPolicy ManipulationPolicy::never() {
  ManipulationPolicy p;
  p.name_ = "never";
  p.uniform_ = Decision::Honest;
  return p;
}

ManipulationPolicy ManipulationPolicy::from_table(std::map<std::string, Decision> table,
                                                  std::optional<Decision> fallback) {
  ManipulationPolicy p;
  p.name_ = "table";
  for (const auto& [h, d] : table) {
    if (!valid_history(h)) fail(ErrorCode::InvalidPolicy, "invalid history '" + h + "'");
    if (d != Decision::Manipulate && d != Decision::Honest) fail(ErrorCode::InvalidPolicy, "invalid decision");
    p.max_history_ = std::max(p.max_history_, h.size());
  }
  if (!fallback) check_total(table, p.max_history_);
  p.table_ = std::move(table);
  p.fallback_ = fallback;
  return p;
}

ManipulationPolicy ManipulationPolicy::parse_csv(std::string_view text) {
  std::map<std::string, Decision> table;
  std::optional<Decision> fallback;
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
      if (t != "history,decision") fail(ErrorCode::InvalidPolicy, "expected header 'history,decision'");
      continue;
    }
    auto comma = t.find(',');
    if (comma == std::string::npos) fail(ErrorCode::InvalidPolicy, "line " + std::to_string(lineno) + ": missing comma");
    auto history = trim(t.substr(0, comma));
    auto decision = trim(t.substr(comma + 1));
    if (decision != "M" && decision != "H") {
      fail(ErrorCode::InvalidPolicy, "line " + std::to_string(lineno) + ": decision must be M or H");
    }
    const Decision d = decision == "M" ? Decision::Manipulate : Decision::Honest;
    if (history == "*") {
      if (fallback) fail(ErrorCode::InvalidPolicy, "duplicate '*' row");
      fallback = d;
      continue;
    }
    if (history == "-") history.clear();
    if (!table.emplace(history, d).second) fail(ErrorCode::InvalidPolicy, "duplicate history '" + history + "'");
  }
  if (header) fail(ErrorCode::InvalidPolicy, "missing header 'history,decision'");
  return from_table(std::move(table), fallback);
}

ManipulationPolicy ManipulationPolicy::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read policy file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto p = parse_csv(ss.str());
  p.name_ = path.filename().string();
  return p;
}

ManipulationPolicy ManipulationPolicy::resolve(std::string_view name_or_path) {
  if (name_or_path == "always") return always();
  if (name_or_path == "never") return never();
  return load_csv(std::filesystem::path(name_or_path));
}

Decision ManipulationPolicy::decide(std::string_view history) const {
  if (uniform_) return *uniform_;
  if (auto it = table_.find(std::string(history)); it != table_.end()) return it->second;
  if (fallback_) return *fallback_;
  if (history.size() > max_history_) {
    fail(ErrorCode::HistoryTooLong, "history '" + std::string(history) + "' exceeds policy table length " +
                                        std::to_string(max_history_));
  }
  fail(ErrorCode::InvalidPolicy, "policy has no decision for history '" + std::string(history) + "'");
}

std::string ManipulationPolicy::to_csv() const {
  std::ostringstream os;
  os << "history,decision\n";
  if (uniform_) {
    os << "*," << static_cast<char>(*uniform_) << '\n';
    return os.str();
  }
  for (const auto& [h, d] : table_) os << (h.empty() ? "-" : h) << ',' << static_cast<char>(d) << '\n';
  if (fallback_) os << "*," << static_cast<char>(*fallback_) << '\n';
  return os.str();
}

}  // namespace ivxv
