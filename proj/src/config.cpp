#include "kzp/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kzp/error.hpp"

namespace kzp {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end)
    fail(ErrorCode::Parse, "config key `" + key + "`: `" + t + "` is not a number");
  return v;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double("list", item));
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    const auto eq = row.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::Parse, "config line " + std::to_string(line_no) +
                                 ": expected `key = value`");
    const std::string key = trim(row.substr(0, eq));
    if (key.empty())
      fail(ErrorCode::Parse, "config line " + std::to_string(line_no) + ": empty key");
    cfg.entries_[key] = trim(row.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool KeyValueConfig::contains(const std::string& key) const {
  return entries_.count(key) != 0;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return to_double(key, *v);
}

std::optional<long long> KeyValueConfig::get_int(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  long long out = 0;
  const std::string t = trim(*v);
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, out);
  if (ec != std::errc() || ptr != end)
    fail(ErrorCode::Parse, "config key `" + key + "`: `" + t + "` is not an integer");
  return out;
}

std::optional<std::vector<double>> KeyValueConfig::get_doubles(
    const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_double_list(*v);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

}  // namespace kzp
