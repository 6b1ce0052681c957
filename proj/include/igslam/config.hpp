#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace igs {

// Flat typed key-value config. One "key value" pair per line, '#' comments.
// Unknown keys are kept so a resolved config can be round-tripped.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    uint64_t get_u64(const std::string& key, uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, long long value);

    // Canonical text form: keys sorted, one pair per line.
    std::string serialize() const;
    void save(const std::string& path) const;

    // FNV-1a over the canonical form; stable across runs.
    uint64_t hash() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace igs
