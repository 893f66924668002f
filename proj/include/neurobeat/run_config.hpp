#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace neurobeat {

// One accepted configuration key with its documented default.
struct ConfigKeyDef {
  const char* key;
  const char* default_value;
  const char* help;
};

// Every key a config file may set, shared across subcommands. Flags override
// file values; file values override these defaults.
const std::vector<ConfigKeyDef>& config_registry();

bool is_known_config_key(const std::string& key);

// Reads a flat JSON object of dotted keys to scalars (string, number, or
// bool). Unknown keys, nested values, and malformed JSON raise config/parse
// errors.
std::map<std::string, std::string> load_config_file(const std::filesystem::path& path);

// Typed accessors over a raw config value; throw config on a malformed value.
long config_long(const std::string& key, const std::string& value);
double config_real(const std::string& key, const std::string& value);
bool config_bool(const std::string& key, const std::string& value);
unsigned long long config_seed(const std::string& key, const std::string& value);

}  // namespace neurobeat
