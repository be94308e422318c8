#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ridepool/flow.hpp"
#include "ridepool/granularity.hpp"
#include "ridepool/pooling.hpp"

namespace ridepool {

struct ExperimentConfig {
    // Network source
    std::string format = "tntp";  // "tntp" | "edge-list"
    std::string net_path;
    std::string trips_path;       // tntp only
    std::string node_path;        // optional coordinates
    double time_scale = 1.0;      // file time units -> minutes

    // Model knobs
    int K = 2;
    double delta_bar = 10.0;                  // minutes
    std::vector<double> t_bar_values = {5.0}; // minutes
    std::vector<double> demand_scales = {1.0};
    double rho = 1.0;

    std::uint64_t seed = 0;
    int workers = 1;
    std::uint64_t max_bags = 50'000'000;
    std::string cache_path;       // pool-option cache, empty = no cache
    std::string output_dir;       // empty = no files written

    void validate() const;  // throws ValidationError
};

struct SweepPoint {
    double demand_scale = 0.0;
    double t_bar = 0.0;
    MetricsReport metrics;
    int iterations = 0;
    double precompute_seconds = 0.0;
    double solve_seconds = 0.0;
};

struct ExperimentResult {
    std::vector<SweepPoint> points;
    std::string csv;  // aggregate table, one row per sweep point
};

/// Full pipeline per sweep point: ingest -> precompute pool options ->
/// greedy assignment -> flow solves on D and D^rp -> metrics. Writes
/// per-point metrics JSON and the aggregate CSV when output_dir is set.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Pipeline on an already ingested instance (shared by run_experiment and
/// the granularity sweep).
std::vector<SweepPoint> run_pipeline(const RoadNetwork& net,
                                     const std::vector<Request>& requests,
                                     const ExperimentConfig& config);

struct GranularitySweepResult {
    std::vector<GranularityRow> rows;
    std::string csv;
};

/// Granularity study: run the pipeline on k-means-pruned networks for each
/// k and tabulate the improvement against the full-network value.
GranularitySweepResult granularity_sweep(const RoadNetwork& net,
                                         const std::vector<Request>& requests,
                                         const std::vector<int>& k_values,
                                         const ExperimentConfig& config);

GranularitySweepResult run_granularity(const ExperimentConfig& config,
                                       const std::vector<int>& k_values);

ExperimentConfig config_from_json_file(const std::string& path);

}  // namespace ridepool
