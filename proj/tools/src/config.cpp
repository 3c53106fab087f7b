#include "forge_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace forge_cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const KeySpec* lookup(const Schema& schema, std::string_view key) {
  for (const auto& k : schema)
    if (k.name == key) return &k;
  return nullptr;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& what)
    : forge::Error((line ? "line " + std::to_string(line) + ": " : std::string()) + "key '" + key + "': " + what),
      key_(std::move(key)),
      line_(line) {}

std::string canonical_value(ValueType type, const std::string& key, std::string_view raw, std::size_t line) {
  switch (type) {
    case ValueType::kInt: {
      std::int64_t v = 0;
      if (!parse_number(raw, v)) throw ConfigError(key, line, "expected an integer, got '" + std::string(raw) + "'");
      return std::to_string(v);
    }
    case ValueType::kUint: {
      std::uint64_t v = 0;
      if (!parse_number(raw, v))
        throw ConfigError(key, line, "expected a non-negative integer, got '" + std::string(raw) + "'");
      return std::to_string(v);
    }
    case ValueType::kRational:
      try {
        return forge::Rational::parse(raw).str();
      } catch (const std::exception&) {
        throw ConfigError(key, line, "expected a number such as 3, -2 or 7/4, got '" + std::string(raw) + "'");
      }
    case ValueType::kBool:
      if (raw == "true" || raw == "1" || raw == "yes") return "true";
      if (raw == "false" || raw == "0" || raw == "no") return "false";
      throw ConfigError(key, line, "expected true or false, got '" + std::string(raw) + "'");
    case ValueType::kString:
      break;
  }
  return std::string(raw);
}

const Schema& level_schema() {
  static const Schema s = [] {
    Schema out;
    for (const char* k : {"a", "b", "c", "ell", "theta", "r", "t", "r0"})
      out.push_back({k, ValueType::kRational, "", "constant override"});
    return out;
  }();
  return s;
}

ConfigFile parse_config(std::string_view text, const Schema& schema) {
  ConfigFile out;
  int level = 0;  // 0: top-level section
  std::set<std::pair<int, std::string>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    // Strip a comment unless the '#' sits inside a quoted value.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(std::string(line), line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name.substr(0, 6) != "level.")
        throw ConfigError(std::string(name), line_no, "unknown section (only [level.N] is allowed)");
      int n = 0;
      if (!parse_number(name.substr(6), n) || n < 1)
        throw ConfigError(std::string(name), line_no, "section needs a level number >= 1");
      level = n;
      if (nl == text.size()) break;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(std::string(line), line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    std::string_view raw = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(key, line_no, "empty key");
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
      raw = raw.substr(1, raw.size() - 2);
    } else if (!raw.empty() && raw.front() == '"') {
      throw ConfigError(key, line_no, "unterminated string");
    }
    if (!seen.insert({level, key}).second) throw ConfigError(key, line_no, "set twice");

    const KeySpec* spec = lookup(level ? level_schema() : schema, key);
    if (!spec) throw ConfigError(key, line_no, level ? "unknown constant in [level." + std::to_string(level) + "]" : "unknown key");
    const std::string value = canonical_value(spec->type, key, raw, line_no);
    if (level)
      out.levels[level][key] = value;
    else
      out.values[key] = value;
    if (nl == text.size()) break;
  }
  return out;
}

bool RunConfig::has(const std::string& key) const {
  auto it = values.find(key);
  return it != values.end() && !it->second.empty();
}

const std::string& RunConfig::str(const std::string& key) const {
  static const std::string empty;
  auto it = values.find(key);
  return it == values.end() ? empty : it->second;
}

std::int64_t RunConfig::integer(const std::string& key) const {
  std::int64_t v = 0;
  if (!parse_number(std::string_view(str(key)), v)) throw ConfigError(key, 0, "missing or not an integer");
  return v;
}

std::uint64_t RunConfig::uinteger(const std::string& key) const {
  std::uint64_t v = 0;
  if (!parse_number(std::string_view(str(key)), v)) throw ConfigError(key, 0, "missing or not a non-negative integer");
  return v;
}

forge::Rational RunConfig::rational(const std::string& key) const {
  if (!has(key)) throw ConfigError(key, 0, "missing value");
  return forge::Rational::parse(str(key));
}

bool RunConfig::flag(const std::string& key) const { return str(key) == "true"; }

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["params"] = nlohmann::json::object();
  for (const auto& [k, v] : values) j["params"][k] = v;
  j["levels"] = nlohmann::json::object();
  for (const auto& [lvl, kv] : levels)
    for (const auto& [k, v] : kv) j["levels"][std::to_string(lvl)][k] = v;
  j["inputs"] = nlohmann::json::object();
  for (const auto& [k, pv] : inputs) j["inputs"][k] = {{"path", pv.first}, {"fnv1a", pv.second}};
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.subcommand = j.at("subcommand").get<std::string>();
    for (const auto& [k, v] : j.at("params").items()) c.values[k] = v.get<std::string>();
    for (const auto& [lvl, kv] : j.at("levels").items())
      for (const auto& [k, v] : kv.items()) c.levels[std::stoi(lvl)][k] = v.get<std::string>();
    for (const auto& [k, v] : j.at("inputs").items())
      c.inputs[k] = {v.at("path").get<std::string>(), v.at("fnv1a").get<std::string>()};
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw forge::ParseError(0, std::string("run_config: ") + e.what());
  }
}

}  // namespace forge_cli
