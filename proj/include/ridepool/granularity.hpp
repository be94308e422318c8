#pragma once

#include <cstdint>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/network.hpp"

namespace ridepool {

struct PrunedNetwork {
    RoadNetwork network;              // over cluster centroids
    std::vector<int> node_map;        // original node -> cluster id
    std::vector<Request> requests;    // remapped, merged, o != d
    double dropped_demand = 0.0;      // intra-cluster demand removed
};

/// Coarsen the network by seeded k-means over node coordinates. A pruned arc
/// (c1, c2) exists iff some original arc crosses from c1 to c2; its travel
/// time is the L2 centroid distance scaled so the mean original arc speed is
/// preserved. When every cluster is a singleton the original arc times are
/// kept, so the identity case reproduces the input exactly.
PrunedNetwork prune_network(const RoadNetwork& net,
                            const std::vector<Request>& requests, int k,
                            std::uint64_t seed);

struct GranularityRow {
    int k = 0;
    double objective_improvement = 0.0;
    double precompute_seconds = 0.0;
    double dropped_demand = 0.0;
};

}  // namespace ridepool
