#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relayq/channel_models.hpp"
#include "relayq/loss_eval.hpp"

namespace relayq {

enum class Scenario {
    AdaptiveVsFixed,
    LossRatioVsSnr,
    DecayVsN,
    BitAllocationSweep,
    CentralNodeComparison,
    Custom
};

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct DistributionSpec {
    enum class Kind { Uniform, Rayleigh, Csv } kind = Kind::Rayleigh;
    std::string csv_path;

    ChannelDistribution make() const;
    std::string name() const;
};

struct NetworkSpec {
    int n_sources = 0;
    std::vector<double> gamma_sr_db;
    std::optional<double> gamma_rd_db;

    NetworkConfig to_config() const;  // dB -> linear, applied once at ingestion
};

// Mirrors the JSON experiment file one to one; unknown keys are rejected.
struct ExperimentSpec {
    Scenario scenario = Scenario::Custom;
    std::optional<NetworkSpec> network;
    std::vector<DistributionSpec> dist_sr;  // one entry broadcasts to all sources
    DistributionSpec dist_rd;
    std::vector<double> snr_grid_db;
    std::vector<int> n_grid;
    std::vector<int> k_max_grid;
    std::int64_t n_trials = 50000;
    std::uint64_t master_seed = 1;
    double fixed_design_snr_db = 10.0;   // AdaptiveVsFixed reference point
    std::optional<double> r1_override;   // bit-allocation sensitivity knob

    static ExperimentSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    ChannelDistribution source_dist(int i) const;
};

struct SpecWarning {
    std::string code;
    std::string message;
};

// Non-fatal advisories; fatal problems throw SpecValidationError with the
// offending field path.
std::vector<SpecWarning> validate_spec(const ExperimentSpec& spec);

struct RunSummary {
    std::string csv_path;
    std::string manifest_path;
    int n_rows = 0;
    std::string spec_hash;
    std::vector<SpecWarning> warnings;
};

// Runs the scenario and writes <scenario>.csv plus manifest.json under
// out_dir. Reruns with an identical spec are byte-identical for any thread
// count.
RunSummary run(const ExperimentSpec& spec, const std::string& out_dir, int n_threads = 1);

}  // namespace relayq
