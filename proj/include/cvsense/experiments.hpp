#ifndef CVSENSE_EXPERIMENTS_HPP
#define CVSENSE_EXPERIMENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "cvsense/config.hpp"
#include "cvsense/exec.hpp"

namespace cvsense {

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    ExecPolicy policy = ExecPolicy::parallel;
};

// Validates, runs the configured experiment, and writes its CSV artifacts.
// Returns the file paths written. Throws ConfigError on validation failure
// and std::runtime_error on execution failure.
std::vector<std::string> run_experiment(const Config& cfg, const RunOptions& opts);

// Header row (column names) for each CSV artifact an experiment kind emits.
std::vector<std::string> csv_columns(const std::string& experiment, const std::string& file_tag);

}  // namespace cvsense

#endif
