#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "xdrc/errors.hpp"

namespace xdrc {

inline constexpr const char* kToolVersion = "1.0.0";

inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

// Strict key=value configuration. Every key must appear in the schema, which
// also supplies defaults; '#' starts a comment.
class Config {
public:
    using Schema = std::map<std::string, std::string>;

    explicit Config(Schema schema) : values_(std::move(schema)) {}

    void parse_text(const std::string& text, const std::string& origin = "config") {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            set(line, origin + ":" + std::to_string(lineno));
        }
    }

    void parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        parse_text(ss.str(), path);
    }

    // One "key=value" assignment.
    void set(const std::string& assignment, const std::string& where = "override") {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + assignment + "'");
        const std::string key = trim(assignment.substr(0, eq)), value = trim(assignment.substr(eq + 1));
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError(where + ": unknown key '" + key + "'");
        if (seen_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        seen_.insert({key, true});
        it->second = value;
    }

    const std::string& str(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("key '" + key + "' is not part of the schema");
        return it->second;
    }

    long long integer(const std::string& key) const {
        const auto& s = str(key);
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (s.empty() || pos != s.size()) throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
        return v;
    }

    std::size_t count(const std::string& key) const {
        const auto v = integer(key);
        if (v < 0) throw ConfigError("key '" + key + "' must be nonnegative");
        return static_cast<std::size_t>(v);
    }

    double real(const std::string& key) const { return parse_real(str(key), key); }

    bool flag(const std::string& key) const {
        const auto& s = str(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw ConfigError("key '" + key + "': expected a boolean, got '" + s + "'");
    }

    std::vector<double> reals(const std::string& key) const {
        std::vector<double> out;
        if (str(key).empty()) return out;
        for (const auto& part : split(str(key), ',')) out.push_back(parse_real(part, key));
        return out;
    }

    std::vector<int> integers(const std::string& key) const {
        std::vector<int> out;
        for (double x : reals(key)) {
            if (x != static_cast<int>(x)) throw ConfigError("key '" + key + "': expected integers");
            out.push_back(static_cast<int>(x));
        }
        return out;
    }

    // Semicolon-separated points "x:y".
    std::vector<std::pair<double, double>> points(const std::string& key) const {
        std::vector<std::pair<double, double>> out;
        if (str(key).empty()) return out;
        for (const auto& part : split(str(key), ';')) {
            const auto xy = split(part, ':');
            if (xy.size() != 2) throw ConfigError("key '" + key + "': expected points as x:y separated by ';'");
            out.emplace_back(parse_real(xy[0], key), parse_real(xy[1], key));
        }
        return out;
    }

    // Canonical text of the resolved configuration: sorted key=value lines.
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
        return out;
    }
    std::uint64_t hash() const { return fnv1a64(canonical()); }
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static double parse_real(const std::string& s, const std::string& key) {
        if (s == "pi") return 3.14159265358979323846;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (s.empty() || pos != s.size()) throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> values_;
    std::map<std::string, bool> seen_;
};

// Runs task(i) for i in [0, n) on a pool of workers. Results are stored by
// index, so the outcome does not depend on the number of workers. The first
// exception (by index) is rethrown.
template <class Result>
std::vector<Result> parallel_map(std::size_t n, std::size_t workers, const std::function<Result(std::size_t)>& task) {
    std::vector<Result> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::size_t next = 0;
    std::mutex m;
    auto run = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(m);
                if (next >= n) return;
                i = next++;
            }
            try {
                out[i] = task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t k = std::max<std::size_t>(1, std::min(workers, n));
    if (k == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < k; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

inline std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// CSV table with a fixed header.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size()) throw ContractViolation("CsvTable: row width differs from header");
        rows_.push_back(cells);
    }
    std::string text() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
            out += "\n";
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }
    const std::vector<std::string>& header() const { return header_; }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Artifacts are staged in memory and written only on commit: first to a
// staging directory, then moved into the output directory.
class ArtifactSet {
public:
    ArtifactSet(std::filesystem::path out_dir, std::string command, const Config& config)
        : out_dir_(std::move(out_dir)), command_(std::move(command)), config_(config) {}

    void add_text(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }
    void add_csv(const std::string& name, const CsvTable& table, int schema_version = 1) {
        files_.emplace_back(name, table.text());
        schemas_[name] = {{"version", schema_version}, {"columns", table.header()}};
    }
    void add_json(const std::string& name, const nlohmann::json& j) { files_.emplace_back(name, j.dump(2) + "\n"); }
    void add_seed(std::uint64_t seed) { seeds_.push_back(seed); }

    nlohmann::json manifest(int exit_status) const {
        nlohmann::json m;
        m["command"] = command_;
        m["tool_version"] = kToolVersion;
        m["config_hash"] = "fnv1a64:" + hex64(config_.hash());
        m["config"] = config_.values();
        m["seeds"] = seeds_;
        m["csv_schemas"] = schemas_;
        std::vector<std::string> names;
        for (const auto& f : files_) names.push_back(f.first);
        m["artifacts"] = names;
        m["exit_status"] = exit_status;
        return m;
    }

    void commit(int exit_status) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir_);
        const char* scratch = std::getenv("XDRC_SCRATCH_DIR");
        const fs::path staging = (scratch && *scratch ? fs::path(scratch) : out_dir_) / (".staging-" + hex64(config_.hash()));
        fs::remove_all(staging);
        fs::create_directories(staging);
        auto files = files_;
        files.emplace_back("manifest.json", manifest(exit_status).dump(2) + "\n");
        try {
            for (const auto& [name, content] : files) {
                std::ofstream o(staging / name, std::ios::binary);
                o << content;
                if (!o) throw std::runtime_error("cannot write " + name);
            }
            for (const auto& [name, content] : files) {
                std::error_code ec;
                fs::rename(staging / name, out_dir_ / name, ec);
                if (ec) {
                    fs::copy_file(staging / name, out_dir_ / name, fs::copy_options::overwrite_existing);
                    fs::remove(staging / name);
                }
            }
        } catch (...) {
            fs::remove_all(staging);
            throw;
        }
        fs::remove_all(staging);
    }

private:
    std::filesystem::path out_dir_;
    std::string command_;
    const Config& config_;
    std::vector<std::pair<std::string, std::string>> files_;
    std::vector<std::uint64_t> seeds_;
    nlohmann::json schemas_ = nlohmann::json::object();
};

}  // namespace xdrc
