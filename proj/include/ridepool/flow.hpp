#pragma once

#include <string>
#include <vector>

#include "ridepool/assignment.hpp"
#include "ridepool/demand.hpp"
#include "ridepool/network.hpp"

namespace ridepool {

/// Per-origin commodity arc flows plus the rebalancing flow. Node balance is
/// measured as inflow minus outflow: commodity j satisfies
/// divergence(x^j) = D[:, j] and the total vehicle flow is a circulation,
/// divergence(X*1 + x_r) = 0.
struct FlowSolution {
    int n_nodes = 0;
    int n_arcs = 0;
    std::vector<double> commodity;    // n_arcs x n_nodes, arc-major
    std::vector<double> rebalancing;  // n_arcs
    double user_time = 0.0;
    double rebal_time = 0.0;

    double& x(int arc, int origin) {
        return commodity[static_cast<size_t>(arc) * n_nodes + origin];
    }
    double x(int arc, int origin) const {
        return commodity[static_cast<size_t>(arc) * n_nodes + origin];
    }
    /// Total active flow on an arc, (X*1)_a.
    double active(int arc) const;
    double objective(double rho) const { return user_time + rho * rebal_time; }
};

/// Optimal solution of the network flow problem by decomposition: every
/// positive demand D(dest, origin) is routed along a shortest origin->dest
/// path; rebalancing is a single-commodity min-cost flow restoring the node
/// divergence -D*1. Exact because costs are linear and arcs uncapacitated.
FlowSolution solve_network_flow(const RoadNetwork& net,
                                const ShortestPathTable& table,
                                const DemandMatrix& demand);

/// Node divergence (inflow - outflow) of an arc flow.
std::vector<double> flow_divergence(const RoadNetwork& net,
                                    const std::vector<double>& arc_flow);

enum class ItineraryKind { Active, Rebalancing };

struct VehicleItinerary {
    std::vector<int> arcs;  // contiguous path or cycle
    double flow = 0.0;
    ItineraryKind kind = ItineraryKind::Active;
};

/// Standard flow decomposition of the active flow X*1 and the rebalancing
/// flow into paths and cycles; the arc-wise sum reproduces the input flows.
std::vector<VehicleItinerary> decompose_flows(const FlowSolution& sol,
                                              const RoadNetwork& net);

struct MetricsReport {
    double total_demand = 0.0;        // requests/hour
    double pooled_percentage = 0.0;   // share of users pooled, in [0, 1]
    double average_delay = 0.0;       // minutes, over pooled users
    bool nothing_pooled = false;
    std::vector<double> composition;  // user-flow share by bag size, index k
    double base_objective = 0.0;      // rho = 1
    double pooled_objective = 0.0;    // rho = 1
    double objective_improvement = 0.0;
    double base_rebalancing_share = 0.0;
    double pooled_rebalancing_share = 0.0;
};

MetricsReport compute_metrics(const FlowSolution& base,
                              const FlowSolution& pooled,
                              const AssignmentResult& assignment,
                              const PoolOptionMap& options,
                              const std::vector<Request>& requests, int K);

std::string flow_to_csv(const FlowSolution& sol, const RoadNetwork& net);
std::string metrics_to_json(const MetricsReport& report);

}  // namespace ridepool
