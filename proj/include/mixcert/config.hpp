#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "graph.hpp"

namespace mixcert {

/// Unknown key in a configuration file.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string key) : Error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

inline constexpr const char* kConfigKeys[] = {"threshold", "tolerance", "t_max",    "backend", "threads",
                                              "eig_tolerance", "restarts", "samples", "mode",  "seed"};

/// key=value overrides read from a file. Blank lines and '#' comments are ignored.
struct Config {
    std::map<std::string, std::string> values;

    std::optional<std::string> get(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        return it->second;
    }
};

inline Config parse_config(std::string_view text) {
    Config cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto body = detail::trim(line);
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError(number, "expected key=value");
        std::string key(detail::trim(body.substr(0, eq)));
        std::string value(detail::trim(body.substr(eq + 1)));
        bool known = false;
        for (const char* k : kConfigKeys) known |= key == k;
        if (!known) throw ConfigError("unknown configuration key '" + key + "'", key);
        cfg.values[key] = value;
    }
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open configuration file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace mixcert
