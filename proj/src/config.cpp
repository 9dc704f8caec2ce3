#include "cvsense/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cvsense {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

const char* kKinds[] = {"threshold", "code-noise", "sensing-sweep", "complex-sensing",
                        "channel-check"};

}  // namespace

std::string format_diagnostics(const std::vector<Diagnostic>& ds) {
    std::ostringstream out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i) out << "\n";
        if (ds[i].line > 0) out << "line " << ds[i].line << ": ";
        if (!ds[i].field.empty()) out << ds[i].field << ": ";
        out << ds[i].message;
    }
    return out.str();
}

Config Config::parse(std::istream& in, const std::string& source) {
    Config cfg;
    std::vector<Diagnostic> errors;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = line;
        std::size_t hash = body.find('#');
        if (hash != std::string::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            errors.push_back({lineno, "", "expected 'key = value' in " + source});
            continue;
        }
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));  // may be empty; schema checks catch it
        if (key.empty()) {
            errors.push_back({lineno, key, "empty key"});
            continue;
        }
        if (cfg.entries_.count(key)) {
            errors.push_back({lineno, key, "duplicate key"});
            continue;
        }
        cfg.entries_[key] = value;
        cfg.lines_[key] = lineno;
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{0, path, "cannot open config file"}});
    return parse(in, path);
}

std::string Config::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError({{0, key, "missing required key"}});
    return it->second;
}

double Config::get_double(const std::string& key) const {
    double v = 0.0;
    if (!parse_double(get_string(key), v))
        throw ConfigError({{line_of(key), key, "expected a number"}});
    return v;
}

long Config::get_long(const std::string& key) const {
    double v = get_double(key);
    long l = static_cast<long>(v);
    if (static_cast<double>(l) != v)
        throw ConfigError({{line_of(key), key, "expected an integer"}});
    return l;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return static_cast<std::uint64_t>(v);
    } catch (...) {
        throw ConfigError({{line_of(key), key, "expected an unsigned integer"}});
    }
}

std::vector<double> Config::get_list(const std::string& key) const {
    std::string s = get_string(key);
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        double v = 0.0;
        if (!parse_double(item, v))
            throw ConfigError({{line_of(key), key, "expected a comma-separated number list"}});
        out.push_back(v);
    }
    return out;
}

std::string Config::get_string_or(const std::string& key, const std::string& def) const {
    return has(key) ? get_string(key) : def;
}

double Config::get_double_or(const std::string& key, double def) const {
    return has(key) ? get_double(key) : def;
}

long Config::get_long_or(const std::string& key, long def) const {
    return has(key) ? get_long(key) : def;
}

int Config::line_of(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
}

std::string Config::canonical_text() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    return out.str();
}

namespace {

struct Checker {
    const Config& cfg;
    std::vector<Diagnostic>& out;

    void fail(const std::string& key, const std::string& msg) {
        out.push_back({cfg.line_of(key), key, msg});
    }

    bool require(const std::string& key) {
        if (!cfg.has(key)) {
            fail(key, "missing required key");
            return false;
        }
        return true;
    }

    void number(const std::string& key, double lo, double hi, bool required = true) {
        if (!cfg.has(key)) {
            if (required) fail(key, "missing required key");
            return;
        }
        try {
            double v = cfg.get_double(key);
            if (v < lo || v > hi) {
                std::ostringstream m;
                m << "value out of range [" << lo << ", " << hi << "]";
                fail(key, m.str());
            }
        } catch (const ConfigError& e) {
            out.insert(out.end(), e.diagnostics.begin(), e.diagnostics.end());
        }
    }

    void grid(const std::string& prefix, double lo, double hi) {
        number(prefix + ".min", lo, hi);
        number(prefix + ".max", lo, hi);
        number(prefix + ".step", 1e-12, hi);
        if (cfg.has(prefix + ".min") && cfg.has(prefix + ".max")) {
            try {
                if (cfg.get_double(prefix + ".min") > cfg.get_double(prefix + ".max"))
                    fail(prefix + ".min", "range is empty: min exceeds max");
            } catch (const ConfigError&) {
            }
        }
    }

    void list(const std::string& key, double lo, double hi, bool required = true) {
        if (!cfg.has(key)) {
            if (required) fail(key, "missing required key");
            return;
        }
        try {
            auto vals = cfg.get_list(key);
            if (vals.empty()) {
                fail(key, "nonempty range required");
                return;
            }
            for (double v : vals)
                if (v < lo || v > hi) {
                    std::ostringstream m;
                    m << "entry " << v << " out of range [" << lo << ", " << hi << "]";
                    fail(key, m.str());
                }
        } catch (const ConfigError& e) {
            out.insert(out.end(), e.diagnostics.begin(), e.diagnostics.end());
        }
    }

    void shots(const std::string& key = "shots") {
        if (!require(key)) return;
        try {
            if (cfg.get_long(key) < 10000) fail(key, "monte carlo experiments need shots >= 10000");
        } catch (const ConfigError& e) {
            out.insert(out.end(), e.diagnostics.begin(), e.diagnostics.end());
        }
    }

    void seed() {
        if (!cfg.has("seed")) {
            fail("seed", "randomized experiments require an explicit seed");
            return;
        }
        try {
            cfg.get_u64("seed");
        } catch (const ConfigError& e) {
            out.insert(out.end(), e.diagnostics.begin(), e.diagnostics.end());
        }
    }
};

}  // namespace

std::vector<Diagnostic> validate_experiment(const Config& cfg) {
    std::vector<Diagnostic> out;
    Checker c{cfg, out};
    if (!cfg.has("experiment")) {
        c.fail("experiment", "missing required key");
        return out;
    }
    std::string kind = cfg.get_string("experiment");
    if (std::find_if(std::begin(kKinds), std::end(kKinds),
                     [&](const char* k) { return kind == k; }) == std::end(kKinds)) {
        c.fail("experiment", "unknown experiment kind: " + kind);
        return out;
    }

    if (kind == "threshold") {
        c.grid("sigma", 1e-6, 2.0);
        c.grid("gain", 1.0, 64.0);
        c.shots();
        c.seed();
    } else if (kind == "code-noise") {
        std::string code = cfg.get_string_or("code", "");
        if (code != "tms" && code != "stabilizer")
            c.fail("code", "code must be 'tms' or 'stabilizer'");
        c.grid("sigma", 1e-6, 2.0);
        if (code == "stabilizer") {
            c.list("lambda.list", 1.0 + 1e-9, 16.0);
            c.number("levels", 2, 8);
            c.number("ancilla.delta", 0.0, 4.0, false);
        } else if (code == "tms") {
            c.grid("gain", 1.0, 64.0);
            c.shots();
            c.seed();
        }
    } else if (kind == "sensing-sweep") {
        c.list("eta.list", 1e-9, 1.0);
        c.list("m.list", 1, 1e6);
        c.number("n_s", 1e-9, 1e9, false);
        c.number("levels", 2, 8, false);
        c.list("lambda.list", 1.0 + 1e-9, 16.0);
        c.grid("gain", 1.0, 64.0);
    } else if (kind == "complex-sensing") {
        c.list("m.list", 1, 1e6);
        if (cfg.has("m.list")) {
            try {
                for (double v : cfg.get_list("m.list")) {
                    auto j = static_cast<long>(std::lround(std::sqrt(v)));
                    if (v != std::floor(v) || j * j != static_cast<long>(v))
                        c.fail("m.list", "perfect square required");
                }
            } catch (const ConfigError&) {
            }
        }
        c.number("n_s", 1e-9, 1e9);
        c.list("k_prior.list", 1e-12, 1e9);
    } else if (kind == "channel-check") {
        c.list("eta.list", 1e-9, 1.0);
        c.list("k.list", 1e-9, 1e3);
        c.shots("samples");
        c.seed();
    }
    return out;
}

}  // namespace cvsense
