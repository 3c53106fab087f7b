#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/rational.hpp"

namespace forge_cli {

enum class ValueType { kInt, kUint, kRational, kString, kBool };

struct KeySpec {
  std::string name;
  ValueType type = ValueType::kString;
  std::string fallback;  // canonical default; empty means unset
  std::string help;
  bool input_path = false;  // hashed into the run config when read
  bool required = false;
};

using Schema = std::vector<KeySpec>;

/// Bad key or value in a config file or on the command line. `line` is 0
/// for command-line values.
class ConfigError : public forge::Error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& what);
  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

/// Checks `raw` against `type` and returns its canonical spelling, so equal
/// configs serialize identically.
std::string canonical_value(ValueType type, const std::string& key, std::string_view raw, std::size_t line = 0);

using LevelTable = std::map<int, std::map<std::string, std::string>>;

struct ConfigFile {
  std::map<std::string, std::string> values;
  LevelTable levels;
};

/// Keys accepted inside [level.N] sections.
const Schema& level_schema();

/// `key = value` lines, `#` comments, quoted or bare values, and
/// `[level.N]` sections holding constant overrides. Unknown keys, repeated
/// keys and values of the wrong type raise ConfigError naming key and line.
ConfigFile parse_config(std::string_view text, const Schema& schema);

/// Everything a run depends on. Serialized into every artifact; replaying
/// it reproduces the artifact byte for byte.
struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> values;
  LevelTable levels;
  std::map<std::string, std::pair<std::string, std::string>> inputs;  // key -> (path, fnv1a)

  bool has(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t uinteger(const std::string& key) const;
  forge::Rational rational(const std::string& key) const;
  bool flag(const std::string& key) const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

}  // namespace forge_cli
