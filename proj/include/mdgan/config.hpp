#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mdgan/trainer.hpp"

namespace mdgan {

// Invalid configuration; key() names the offending dotted key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Every addressable dotted key, in echo order.
std::vector<std::string> config_keys();

// Sets one field from its textual value. Unknown keys and unparsable values
// raise ConfigError.
void apply_setting(TrainConfig& cfg, std::string_view key, std::string_view value);

// Parses "key = value" lines on top of base. Blank lines and lines starting
// with '#' are ignored; so is anything after a '#'.
TrainConfig parse_config(std::istream& is, TrainConfig base = {});
TrainConfig load_config_file(const std::filesystem::path& path, TrainConfig base = {});

// Fully resolved configuration in parse_config syntax; parsing it back yields
// an identical TrainConfig.
std::string to_config_text(const TrainConfig& cfg);

}  // namespace mdgan
