#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "gentensor/association.hpp"

namespace gentensor {

using Json = nlohmann::json;

class ConfigError : public Error {
public:
    using Error::Error;
};

struct RunOptions {
    std::string out_dir;   // empty: no files written
    int threads = 0;       // 0: take from config
    long long seed = -1;   // -1: take from config
    double eps_min = 0.0;  // 0: take from config
    double eps_max = 0.0;
    bool verbose = false;
};

struct RunResult {
    int exit_code = 1;  // 0 pass, 2 fail, 1 error
    std::string verdict;
    Json report;            // full run report (config echo, verdicts, slopes)
    std::string rates_csv;  // "eps,sup_value,test_id" body
};

/// Parse, validate and execute one experiment; writes report.json and
/// rates.csv under opts.out_dir when set.
RunResult run_experiment(const Json& config, const RunOptions& opts = {});
RunResult run_experiment_file(const std::string& path, const RunOptions& opts = {});

/// Canonical built-in experiments.
std::vector<std::string> registry_names();
Json registry_config(const std::string& name);

/// Canonical normal form used by the config round-trip guarantee.
std::string normalize_config(const Json& config);

/// Compatibility of the embedding with tensor products at the level of
/// association: the configured (smooth x distributional) and
/// (continuous x continuous) matrix.
AssociationReport product_association_suite(Json* detail = nullptr, int threads = 1);

}  // namespace gentensor
