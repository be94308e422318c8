#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ridepool/experiment.hpp"
#include "ridepool/io.hpp"
#include "ridepool/temporal.hpp"

namespace {

using namespace ridepool;

void add_config_flags(CLI::App* cmd, ExperimentConfig& config, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
    cmd->add_option("--format", config.format, "Network format: tntp | edge-list");
    cmd->add_option("--net", config.net_path, "Network file");
    cmd->add_option("--trips", config.trips_path, "Trips file (TNTP convention)");
    cmd->add_option("--nodes", config.node_path, "Node coordinate file");
    cmd->add_option("--time-scale", config.time_scale,
                    "Scale factor from file time units to minutes");
    cmd->add_option("-K,--max-pool", config.K, "Maximum requests pooled per vehicle");
    cmd->add_option("--delta-bar", config.delta_bar, "Maximum per-user delay [min]");
    cmd->add_option("--t-bar", config.t_bar_values, "Waiting window sweep values [min]");
    cmd->add_option("--demand-scale", config.demand_scales, "Demand scale sweep values");
    cmd->add_option("--rho", config.rho, "Rebalancing weight in the reported objective");
    cmd->add_option("--seed", config.seed, "Random seed");
    cmd->add_option("--workers", config.workers, "Worker threads for precompute");
    cmd->add_option("--max-bags", config.max_bags, "Abort if the bag count exceeds this");
    cmd->add_option("--cache", config.cache_path, "Pool-option cache file");
    cmd->add_option("-o,--output", config.output_dir, "Output directory");
}

ExperimentConfig resolve_config(const CLI::App* cmd, ExperimentConfig flags,
                                const std::string& config_path) {
    ExperimentConfig config = flags;
    if (!config_path.empty()) {
        config = config_from_json_file(config_path);
        // Flags that the user actually passed win over file values.
        auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
        if (passed("--format")) config.format = flags.format;
        if (passed("--net")) config.net_path = flags.net_path;
        if (passed("--trips")) config.trips_path = flags.trips_path;
        if (passed("--nodes")) config.node_path = flags.node_path;
        if (passed("--time-scale")) config.time_scale = flags.time_scale;
        if (passed("--max-pool")) config.K = flags.K;
        if (passed("--delta-bar")) config.delta_bar = flags.delta_bar;
        if (passed("--t-bar")) config.t_bar_values = flags.t_bar_values;
        if (passed("--demand-scale")) config.demand_scales = flags.demand_scales;
        if (passed("--rho")) config.rho = flags.rho;
        if (passed("--seed")) config.seed = flags.seed;
        if (passed("--workers")) config.workers = flags.workers;
        if (passed("--max-bags")) config.max_bags = flags.max_bags;
        if (passed("--cache")) config.cache_path = flags.cache_path;
        if (passed("--output")) config.output_dir = flags.output_dir;
    }
    // RIDEPOOL_CACHE_DIR redirects a relative cache file.
    if (const char* dir = std::getenv("RIDEPOOL_CACHE_DIR");
        dir && !config.cache_path.empty() &&
        std::filesystem::path(config.cache_path).is_relative()) {
        config.cache_path = (std::filesystem::path(dir) / config.cache_path).string();
    }
    return config;
}

int cmd_validate_lemma(int configs, std::int64_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_k(2, 4);
    std::uniform_real_distribution<double> pick_rate(0.1, 10.0);
    std::uniform_real_distribution<double> pick_t(0.5, 15.0);
    int failures = 0;
    std::cout << "k,t_bar_min,analytic,mc_estimate,mc_stderr,abs_diff\n";
    for (int c = 0; c < configs; ++c) {
        TemporalParams params;
        int k = pick_k(rng);
        for (int i = 0; i < k; ++i) params.rates.push_back(pick_rate(rng));
        params.t_bar = pick_t(rng);
        double analytic = pool_probability(params);
        auto mc = pool_probability_mc(params, samples, rng());
        double diff = std::abs(analytic - mc.estimate);
        std::cout << k << ',' << params.t_bar << ',' << analytic << ','
                  << mc.estimate << ',' << mc.standard_error << ',' << diff << '\n';
        // Floor the standard error with the binomial value at the analytic p:
        // an empirical estimate of exactly 0 or 1 reports zero sample error.
        double se = std::max(mc.standard_error,
                             std::sqrt(analytic * (1.0 - analytic) / samples));
        if (diff > 4.0 * se && diff > 1e-12) ++failures;
    }
    if (failures > 0) {
        std::cerr << failures << " configuration(s) outside 4 standard errors\n";
        return 1;
    }
    std::cerr << "closed form and Monte Carlo agree on all " << configs
              << " configurations\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-invariant ride-pooling network flow toolkit"};
    app.require_subcommand(1);

    ExperimentConfig flags;
    std::string config_path;
    std::vector<int> k_values;

    auto* run = app.add_subcommand("run", "Run the full pipeline over a parameter sweep");
    add_config_flags(run, flags, config_path);

    auto* gran = app.add_subcommand("granularity", "Network-granularity sweep");
    add_config_flags(gran, flags, config_path);
    gran->add_option("--k-values", k_values, "Pruned node counts")->required();

    auto* pre = app.add_subcommand("precompute", "Precompute and cache pool options");
    add_config_flags(pre, flags, config_path);

    auto* lemma = app.add_subcommand(
        "validate-lemma", "Compare the co-occurrence probability against Monte Carlo");
    int lemma_configs = 50;
    std::int64_t lemma_samples = 1'000'000;
    std::uint64_t lemma_seed = 1;
    lemma->add_option("--configs", lemma_configs, "Number of random configurations");
    lemma->add_option("--samples", lemma_samples, "Monte Carlo samples per configuration");
    lemma->add_option("--seed", lemma_seed, "Random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto config = resolve_config(run, flags, config_path);
            auto result = run_experiment(config);
            std::cout << result.csv;
            return 0;
        }
        if (gran->parsed()) {
            auto config = resolve_config(gran, flags, config_path);
            auto result = run_granularity(config, k_values);
            std::cout << result.csv;
            return 0;
        }
        if (pre->parsed()) {
            auto config = resolve_config(pre, flags, config_path);
            if (config.cache_path.empty())
                throw ValidationError("precompute requires --cache");
            // One sweep point is enough to populate the cache.
            config.demand_scales = {1.0};
            config.t_bar_values = {config.t_bar_values.front()};
            auto result = run_experiment(config);
            std::cout << "cached pool options; precompute took "
                      << result.points.front().precompute_seconds << " s\n";
            return 0;
        }
        if (lemma->parsed())
            return cmd_validate_lemma(lemma_configs, lemma_samples, lemma_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
