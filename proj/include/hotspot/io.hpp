#pragma once

// Deterministic file output: CSV with LF line endings and 17 significant
// digits (round-trip exact for doubles), flat key=value config files, and the
// JSON run manifest.  Data files carry no timestamps; wall-clock time goes
// into the manifest only, so repeated runs are byte-identical.

#include <cstdio>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotspot/errors.hpp"

namespace hotspot {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (size_t j = 0; j < header.size(); ++j)
        out << header[j] << (j + 1 < header.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
        for (size_t j = 0; j < row.size(); ++j)
            out << fmt17(row[j]) << (j + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

// ---- flat key=value config ----

using Config = std::map<std::string, std::string>;

inline Config parse_config(std::istream& in) {
    Config cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return (a == std::string::npos) ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) cfg[key] = val;
    }
    return cfg;
}

inline Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    return parse_config(in);
}

inline std::string print_config(const Config& cfg) {
    std::ostringstream out;
    for (const auto& [k, v] : cfg) out << k << "=" << v << "\n";
    return out.str();
}

// ---- run manifest ----

struct RunManifest {
    std::string command;
    Config config;                      // fully resolved configuration
    std::vector<std::string> outputs;   // every file the command wrote
    std::map<std::string, bool> checks; // named pass/fail flags
    double wall_seconds = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool"] = "hotspot";
        j["version"] = "0.1.0";
        j["command"] = command;
        j["config"] = config;
        j["outputs"] = outputs;
        j["checks"] = checks;
        j["wall_seconds"] = wall_seconds;
        return j;
    }
};

} // namespace hotspot
