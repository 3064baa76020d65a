#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

// Reference values written by tests/oracles/oracle.py.
inline const std::map<std::string, double>& oracle_values() {
    static const std::map<std::string, double> values = [] {
        std::map<std::string, double> out;
        std::ifstream in(std::string(XDRC_FIXTURE_DIR) + "/oracle_values.txt");
        if (!in) throw std::runtime_error("missing oracle_values.txt");
        std::string line;
        while (std::getline(in, line)) {
            const auto eq = line.find(" = ");
            if (eq == std::string::npos) continue;
            out[line.substr(0, eq)] = std::stod(line.substr(eq + 3));
        }
        return out;
    }();
    return values;
}

inline double oracle(const std::string& name) {
    const auto& v = oracle_values();
    const auto it = v.find(name);
    if (it == v.end()) throw std::runtime_error("no oracle value named " + name);
    return it->second;
}
