#pragma once

// Test-only oracles, independent of the library's implementation paths:
// brute-force path enumeration, exhaustive stop permutations, exhaustive
// selection orders, plus random instance generators.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ridepool/assignment.hpp"
#include "ridepool/demand.hpp"
#include "ridepool/network.hpp"
#include "ridepool/pooling.hpp"

namespace ridepool::testing {

/// Shortest o->d cost by enumerating every simple-prefix walk of at most
/// |V| - 1 arcs.
double brute_force_shortest(const RoadNetwork& net, NodeId o, NodeId d);

/// Sum of arc times along an explicit arc path.
double path_cost(const RoadNetwork& net, const std::vector<int>& arcs);

struct OracleSequenceResult {
    bool feasible = false;
    double best_cost = 0.0;
    std::vector<Sequence> all_valid;  // label-deduplicated
};

/// Exhaustive stop-permutation oracle: all (2|C|)! occurrence orderings,
/// filtered by pickup-before-dropoff and the no-empty-leg rule, deduplicated
/// as label sequences. best_cost minimizes over sequences whose delays all
/// stay within delta_bar.
OracleSequenceResult oracle_pool(const Bag& bag, const RoadNetwork& net,
                                 const ShortestPathTable& table,
                                 const std::vector<Request>& requests,
                                 double delta_bar);

/// Cost and per-occurrence delays of a sequence computed by walking the
/// reconstructed shortest paths arc by arc.
SequenceEvaluation oracle_evaluate(const Sequence& seq, const RoadNetwork& net,
                                   const ShortestPathTable& table,
                                   const std::vector<Request>& requests);

/// Relaxed objective after processing `order` bags (Algorithm 1 updates)
/// starting from the full demands.
double replay_selection(const std::vector<Bag>& order, const PoolOptionMap& options,
                        const std::vector<Request>& requests, double t_bar,
                        const ShortestPathTable& table);

/// Minimum relaxed objective over every ordered subset of the option bags.
double oracle_best_selection(const PoolOptionMap& options,
                             const std::vector<Request>& requests, double t_bar,
                             const ShortestPathTable& table);

/// Random strongly connected instance: a permutation cycle plus extra arcs.
RoadNetwork random_network(std::mt19937_64& rng, int n_nodes, int extra_arcs,
                           bool with_coords = false);

/// Random requests with distinct OD pairs.
std::vector<Request> random_requests(std::mt19937_64& rng, const RoadNetwork& net,
                                     int count, double max_alpha = 10.0);

}  // namespace ridepool::testing
