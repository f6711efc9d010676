#pragma once

// Experiment runner behind the CLI: validated configs in, deterministic
// result tables out. Each experiment emits CSV rows behind a '#'-prefixed
// JSON header that echoes every resolved parameter.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronon/serialize.hpp"

namespace chronon {

struct ResultRow {
    std::string experiment;
    std::string params;  // "k=v;k=v"
    std::string metric;
    double value = 0.0;
    std::optional<double> error;
};

struct ResultTable {
    nlohmann::json header;
    std::vector<ResultRow> rows;

    std::string to_csv() const;
};

struct ExperimentResult {
    ResultTable table;
    bool gates_passed = true;        // false -> exit code 3
    std::optional<nlohmann::json> estimates;  // written when estimates_out set
};

/// Parse, validate and run. Throws ConfigError on any malformed field, with
/// the field path in the message, before any computation starts.
ExperimentResult run_experiment(const nlohmann::json& config);

/// Individual experiments; config must already contain the experiment name.
ExperimentResult run_compare(const nlohmann::json& config);
ExperimentResult run_dyson_converge(const nlohmann::json& config);
ExperimentResult run_mc_sweep(const nlohmann::json& config);
ExperimentResult run_bvp_equivalence(const nlohmann::json& config);
ExperimentResult run_invariants(const nlohmann::json& config);

}  // namespace chronon
