#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/network.hpp"

namespace ridepool {

/// A bag (multiset) of request indices, canonically sorted so equal bags
/// compare equal.
struct Bag {
    std::vector<int> elements;  // sorted, 1 <= size <= K

    int size() const { return static_cast<int>(elements.size()); }
    int multiplicity(int request) const;
    std::vector<int> support() const;

    bool operator==(const Bag&) const = default;
    auto operator<=>(const Bag&) const = default;
};

enum class StopKind { Pickup, Dropoff };

struct Stop {
    NodeId node = 0;
    int request = 0;
    StopKind kind = StopKind::Pickup;

    bool operator==(const Stop&) const = default;
};

/// Ordered pickups/dropoffs serving a bag. Every pickup precedes its
/// matching dropoff and the vehicle is never empty strictly between the
/// first and last stop.
using Sequence = std::vector<Stop>;

struct SequenceEvaluation {
    double cost = 0.0;            // sum of shortest-path leg times
    std::vector<double> delays;   // per occurrence, pickup order
    double max_delay = 0.0;
};

struct PoolOption {
    Bag bag;
    std::optional<Sequence> best_sequence;
    std::vector<double> delays;   // per occurrence of best_sequence
    double pooled_cost = 0.0;
    double solo_cost = 0.0;       // multiplicity-weighted sum of t0
    double improvement = 0.0;     // solo_cost - pooled_cost
    bool feasible = false;
};

/// All bags of sizes 1..K over request indices 0..M-1, canonical order
/// (by size, then lexicographic). The callback may be invoked from the
/// enumeration loop; returning false stops early.
void enumerate_bags(int M, int K, const std::function<bool(const Bag&)>& emit);
std::vector<Bag> enumerate_bags(int M, int K);

/// Exact count of size-k bags: C(M + k - 1, k).
std::uint64_t bag_layer_count(int M, int k);

/// All valid serving sequences of a bag with |bag| >= 2, deduplicated as
/// stop-label orderings, in deterministic order.
std::vector<Sequence> enumerate_sequences(const Bag& bag,
                                          const std::vector<Request>& requests);

SequenceEvaluation evaluate_sequence(const Sequence& seq,
                                     const ShortestPathTable& table,
                                     const std::vector<Request>& requests);

/// `sequences_evaluated`, when given, is incremented by the number of valid
/// sequences considered (feeds the precompute counters).
PoolOption best_pool_option(const Bag& bag, const ShortestPathTable& table,
                            const std::vector<Request>& requests,
                            double delta_bar,
                            std::uint64_t* sequences_evaluated = nullptr);

struct PrecomputeStats {
    std::vector<std::uint64_t> sequences_per_k;  // index k, entry 0 unused
    std::uint64_t bags_enumerated = 0;
    double wall_seconds = 0.0;
};

using PoolOptionMap = std::map<Bag, PoolOption>;

struct PrecomputeConfig {
    int K = 2;
    double delta_bar = 10.0;        // minutes
    int workers = 1;
    std::uint64_t max_bags = 50'000'000;  // resource guard
};

/// Feasible bags with strictly positive improvement, for all sizes up to K.
/// Embarrassingly parallel over bags; the result is independent of the
/// worker count. Aborts with an error if the bag count would exceed
/// config.max_bags.
PoolOptionMap precompute_pool_options(const std::vector<Request>& requests,
                                      const ShortestPathTable& table,
                                      const PrecomputeConfig& config,
                                      PrecomputeStats* stats = nullptr);

/// Unit-rate demand matrix of the <= 2|C|-1 equivalent vehicle-flow legs of
/// the optimal sequence. Legs between identical consecutive nodes are
/// skipped.
DemandMatrix demand_matrix_of_option(const PoolOption& opt, int n_nodes);

/// Consecutive-distinct-node legs of a sequence as (tail, head) pairs.
std::vector<std::pair<NodeId, NodeId>> sequence_legs(const Sequence& seq);

/// Cache of a precomputed option map, keyed by a content hash of
/// (network, requests, K, delta_bar). Load returns nullopt on a key
/// mismatch or unreadable file.
std::uint64_t pool_cache_key(const RoadNetwork& net,
                             const std::vector<Request>& requests, int K,
                             double delta_bar);
void save_pool_options(const std::string& path, std::uint64_t key,
                       const PoolOptionMap& options);
std::optional<PoolOptionMap> load_pool_options(const std::string& path,
                                               std::uint64_t key);

}  // namespace ridepool
