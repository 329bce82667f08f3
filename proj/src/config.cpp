#include "phasegate/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phasegate {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig cfg;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected `key = value`");
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        cfg.add(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void KeyValueConfig::add(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
}

bool KeyValueConfig::contains(std::string_view key) const { return get(key).has_value(); }

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
    std::optional<std::string> out;
    for (const auto& [k, v] : entries_)
        if (k == key) out = v;
    return out;
}

std::vector<std::string> KeyValueConfig::get_all(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (k == key) out.push_back(v);
    return out;
}

std::string KeyValueConfig::require(std::string_view key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing config key `" + std::string(key) + "`");
    return *v;
}

double KeyValueConfig::require_double(std::string_view key) const { return parse_double(require(key)); }
int KeyValueConfig::require_int(std::string_view key) const { return parse_int(require(key)); }

std::string KeyValueConfig::to_string() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
}

std::vector<std::string> split_list(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto end = text.find(sep, pos);
        auto item = trim(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
        if (!item.empty()) out.emplace_back(item);
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return out;
}

double parse_double(std::string_view text) {
    text = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ConfigError("not a number: `" + std::string(text) + "`");
    return value;
}

int parse_int(std::string_view text) {
    text = trim(text);
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ConfigError("not an integer: `" + std::string(text) + "`");
    return value;
}

}  // namespace phasegate
