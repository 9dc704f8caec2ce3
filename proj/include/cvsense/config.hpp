#ifndef CVSENSE_CONFIG_HPP
#define CVSENSE_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvsense {

struct Diagnostic {
    int line = 0;  // 0 when the problem is not tied to a line
    std::string field;
    std::string message;
};

std::string format_diagnostics(const std::vector<Diagnostic>& ds);

// Parse or validation failure; carries every collected diagnostic.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<Diagnostic> ds)
        : std::runtime_error(format_diagnostics(ds)), diagnostics(std::move(ds)) {}
    std::vector<Diagnostic> diagnostics;
};

// Flat key = value experiment description. '#' starts a comment; keys are
// dotted lowercase words; duplicate keys are a parse error.
class Config {
public:
    static Config parse(std::istream& in, const std::string& source = "<config>");
    static Config parse_file(const std::string& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;

    std::string get_string_or(const std::string& key, const std::string& def) const;
    double get_double_or(const std::string& key, double def) const;
    long get_long_or(const std::string& key, long def) const;

    int line_of(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

    // canonical "key = value" lines, sorted; input to the config hash
    std::string canonical_text() const;

private:
    std::map<std::string, std::string> entries_;
    std::map<std::string, int> lines_;
};

// Schema check for the experiment kinds; returns every violation found.
std::vector<Diagnostic> validate_experiment(const Config& cfg);

}  // namespace cvsense

#endif
