#include "igslam/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "igslam/errors.hpp"

namespace igs {

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key, value;
        if (!(ls >> key)) continue;  // blank line
        if (!(ls >> value)) throw MalformedLine(line_no, "config key without value");
        std::string extra;
        if (ls >> extra) throw MalformedLine(line_no, "trailing tokens after value");
        cfg.values_[key] = value;
    }
    return cfg;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw Error("config key " + key + ": not a number: " + it->second);
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw Error("config key " + key + ": not an integer: " + it->second);
    }
}

uint64_t Config::get_u64(const std::string& key, uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw Error("config key " + key + ": not an unsigned integer: " + it->second);
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw Error("config key " + key + ": not a boolean: " + it->second);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

void Config::set_double(const std::string& key, double value) {
    std::ostringstream ss;
    ss.precision(std::numeric_limits<double>::max_digits10);
    ss << value;
    values_[key] = ss.str();
}

void Config::set_int(const std::string& key, long long value) {
    values_[key] = std::to_string(value);
}

std::string Config::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += ' ';
        out += v;
        out += '\n';
    }
    return out;
}

void Config::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write config " + path);
    out << serialize();
}

uint64_t Config::hash() const {
    const std::string text = serialize();
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace igs
