// config.hpp - line-oriented `key = value` text used for parameter sets,
// fusion plans and sweep grids.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phasegate {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Ordered list of entries; keys may repeat (plan steps use this).
class KeyValueConfig {
  public:
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::string& path);

    void add(std::string key, std::string value);

    bool contains(std::string_view key) const;
    /// Last value for `key`.
    std::optional<std::string> get(std::string_view key) const;
    std::vector<std::string> get_all(std::string_view key) const;
    std::string require(std::string_view key) const;
    double require_double(std::string_view key) const;
    int require_int(std::string_view key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    std::string to_string() const;

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::vector<std::string> split_list(std::string_view text, char sep = ',');
double parse_double(std::string_view text);
int parse_int(std::string_view text);

}  // namespace phasegate
