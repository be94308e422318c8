#include "ridepool/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ridepool {

namespace {

constexpr double kFlowTol = 1e-12;

/// Successive-shortest-paths min-cost flow with Dijkstra and node
/// potentials. Capacities and flows are real-valued; every augmentation
/// saturates a source or sink edge, so the bipartite transportation use
/// below terminates after at most supplies + demands rounds.
class MinCostFlow {
  public:
    explicit MinCostFlow(int n) : n_(n), adj_(n) {}

    void add_edge(int from, int to, double cap, double cost) {
        adj_[from].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({to, cap, cost});
        adj_[to].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({from, 0.0, -cost});
    }

    /// Sends as much flow as possible from s to t at minimum cost.
    /// Returns (flow, cost).
    std::pair<double, double> solve(int s, int t) {
        std::vector<double> potential(n_, 0.0);  // costs are nonnegative
        double total_flow = 0.0, total_cost = 0.0;
        while (true) {
            // Dijkstra on reduced costs.
            std::vector<double> dist(n_, std::numeric_limits<double>::infinity());
            std::vector<int> prev_edge(n_, -1);
            using Item = std::pair<double, int>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            dist[s] = 0.0;
            pq.push({0.0, s});
            while (!pq.empty()) {
                auto [d, v] = pq.top();
                pq.pop();
                if (d > dist[v] + kFlowTol) continue;
                for (int id : adj_[v]) {
                    const Edge& e = edges_[id];
                    if (e.cap <= kFlowTol) continue;
                    double nd = dist[v] + e.cost + potential[v] - potential[e.to];
                    if (nd < dist[e.to] - kFlowTol) {
                        dist[e.to] = nd;
                        prev_edge[e.to] = id;
                        pq.push({nd, e.to});
                    }
                }
            }
            if (prev_edge[t] < 0) break;
            for (int v = 0; v < n_; ++v)
                if (dist[v] < std::numeric_limits<double>::infinity())
                    potential[v] += dist[v];

            double push = std::numeric_limits<double>::infinity();
            for (int v = t; v != s; v = edges_[prev_edge[v] ^ 1].to)
                push = std::min(push, edges_[prev_edge[v]].cap);
            for (int v = t; v != s; v = edges_[prev_edge[v] ^ 1].to) {
                Edge& e = edges_[prev_edge[v]];
                e.cap -= push;
                edges_[prev_edge[v] ^ 1].cap += push;
                total_cost += push * e.cost;
            }
            total_flow += push;
        }
        return {total_flow, total_cost};
    }

    double forward_flow(int edge_id) const { return edges_[edge_id ^ 1].cap; }

  private:
    struct Edge {
        int to;
        double cap;
        double cost;
    };
    int n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

}  // namespace

double FlowSolution::active(int arc) const {
    double s = 0.0;
    for (int j = 0; j < n_nodes; ++j) s += x(arc, j);
    return s;
}

std::vector<double> flow_divergence(const RoadNetwork& net,
                                    const std::vector<double>& arc_flow) {
    std::vector<double> div(net.num_nodes(), 0.0);
    for (int a = 0; a < net.num_arcs(); ++a) {
        div[net.arc(a).head] += arc_flow[a];
        div[net.arc(a).tail] -= arc_flow[a];
    }
    return div;
}

FlowSolution solve_network_flow(const RoadNetwork& net,
                                const ShortestPathTable& table,
                                const DemandMatrix& demand) {
    const int n = net.num_nodes();
    if (demand.size() != n) throw ValidationError("demand matrix size mismatch");
    double total = 0.0;
    for (NodeId j = 0; j < n; ++j) total += demand.column_sum(j);
    if (std::abs(total) > 1e-6)
        throw ValidationError("demand matrix columns do not balance to zero");

    FlowSolution sol;
    sol.n_nodes = n;
    sol.n_arcs = net.num_arcs();
    sol.commodity.assign(static_cast<size_t>(sol.n_arcs) * n, 0.0);
    sol.rebalancing.assign(sol.n_arcs, 0.0);

    // Commodity routing: each positive demand (dest i, origin j) travels a
    // shortest j -> i path. Optimal because costs are linear and arcs are
    // uncapacitated.
    for (NodeId j = 0; j < n; ++j)
        for (NodeId i = 0; i < n; ++i) {
            if (i == j) continue;
            double alpha = demand(i, j);
            if (alpha <= 0.0) continue;
            for (int a : reconstruct_path(table, net, j, i)) sol.x(a, j) += alpha;
            sol.user_time += alpha * table.dist(j, i);
        }

    // Rebalancing: restore divergence -D*1 with a transportation problem
    // between vehicle-surplus and vehicle-deficit nodes at shortest-path
    // costs, then expand each transport flow onto network arcs.
    std::vector<double> excess = demand.row_sums();  // net vehicle inflow
    std::vector<NodeId> surplus, deficit;
    for (NodeId v = 0; v < n; ++v) {
        if (excess[v] > kFlowTol) surplus.push_back(v);
        else if (excess[v] < -kFlowTol) deficit.push_back(v);
    }
    if (!surplus.empty()) {
        const int ns = static_cast<int>(surplus.size());
        const int nd = static_cast<int>(deficit.size());
        MinCostFlow mcf(ns + nd + 2);
        const int src = ns + nd, sink = ns + nd + 1;
        for (int i = 0; i < ns; ++i)
            mcf.add_edge(src, i, excess[surplus[i]], 0.0);
        for (int w = 0; w < nd; ++w)
            mcf.add_edge(ns + w, sink, -excess[deficit[w]], 0.0);
        std::vector<std::vector<int>> edge_id(ns, std::vector<int>(nd));
        int next_id = 2 * (ns + nd);
        for (int i = 0; i < ns; ++i)
            for (int w = 0; w < nd; ++w) {
                edge_id[i][w] = next_id;
                next_id += 2;
                mcf.add_edge(i, ns + w, std::numeric_limits<double>::infinity(),
                             table.dist(surplus[i], deficit[w]));
            }
        auto [flow, cost] = mcf.solve(src, sink);
        (void)flow;
        sol.rebal_time = cost;
        for (int i = 0; i < ns; ++i)
            for (int w = 0; w < nd; ++w) {
                double f = mcf.forward_flow(edge_id[i][w]);
                if (f <= kFlowTol) continue;
                for (int a : reconstruct_path(table, net, surplus[i], deficit[w]))
                    sol.rebalancing[a] += f;
            }
    }
    return sol;
}

std::vector<VehicleItinerary> decompose_flows(const FlowSolution& sol,
                                              const RoadNetwork& net) {
    std::vector<VehicleItinerary> out;
    auto decompose = [&](std::vector<double> flow, ItineraryKind kind) {
        const int n = net.num_nodes();
        const double tol = 1e-12;
        auto div = flow_divergence(net, flow);  // inflow - outflow

        auto first_out_arc = [&](NodeId v) -> int {
            for (int a : net.out_arcs(v))
                if (flow[a] > tol) return a;
            return -1;
        };

        // Walk forward from `start` along positive-flow arcs until a sink
        // node (paths) or a repeated node (cycles) is found.
        auto extract_from = [&](NodeId start, bool want_path) -> bool {
            std::vector<int> walk;
            std::vector<int> visited_at(n, -1);
            NodeId v = start;
            visited_at[v] = 0;
            while (true) {
                if (want_path && v != start && div[v] > tol) {
                    double push = div[v];
                    if (div[start] < -tol) push = std::min(push, -div[start]);
                    for (int a : walk) push = std::min(push, flow[a]);
                    for (int a : walk) flow[a] -= push;
                    div[start] += push;
                    div[v] -= push;
                    out.push_back({walk, push, kind});
                    return true;
                }
                int a = first_out_arc(v);
                if (a < 0) return false;
                walk.push_back(a);
                v = net.arc(a).head;
                if (visited_at[v] >= 0) {
                    // Cycle from the first visit of v onward.
                    std::vector<int> cycle(walk.begin() + visited_at[v], walk.end());
                    double push = std::numeric_limits<double>::infinity();
                    for (int c : cycle) push = std::min(push, flow[c]);
                    for (int c : cycle) flow[c] -= push;
                    out.push_back({cycle, push, kind});
                    return true;
                }
                visited_at[v] = static_cast<int>(walk.size());
            }
        };

        // Paths first, from nodes with net outflow.
        bool progress = true;
        while (progress) {
            progress = false;
            for (NodeId v = 0; v < n; ++v)
                if (div[v] < -tol && extract_from(v, true)) {
                    progress = true;
                    break;
                }
        }
        // Remaining flow is a circulation: peel cycles.
        for (int a = 0; a < net.num_arcs(); ++a)
            while (flow[a] > tol)
                if (!extract_from(net.arc(a).tail, false)) break;
    };

    std::vector<double> active(net.num_arcs());
    for (int a = 0; a < net.num_arcs(); ++a) active[a] = sol.active(a);
    decompose(std::move(active), ItineraryKind::Active);
    decompose(sol.rebalancing, ItineraryKind::Rebalancing);
    return out;
}

MetricsReport compute_metrics(const FlowSolution& base,
                              const FlowSolution& pooled,
                              const AssignmentResult& assignment,
                              const PoolOptionMap& options,
                              const std::vector<Request>& requests, int K) {
    MetricsReport report;
    report.total_demand = total_demand(requests);

    double pooled_users = 0.0;
    double delay_mass = 0.0;
    report.composition.assign(K + 1, 0.0);
    for (const auto& [bag, gamma] : assignment.gamma) {
        pooled_users += bag.size() * gamma;
        report.composition[bag.size()] += bag.size() * gamma;
        const PoolOption& opt = options.at(bag);
        for (double d : opt.delays) delay_mass += gamma * d;
    }
    double unpooled = 0.0;
    for (double r : assignment.residual) unpooled += r;
    if (K >= 1) report.composition[1] += unpooled;
    if (report.total_demand > 0.0)
        for (double& c : report.composition) c /= report.total_demand;

    report.pooled_percentage =
        report.total_demand > 0.0 ? pooled_users / report.total_demand : 0.0;
    if (pooled_users > 0.0) {
        report.average_delay = delay_mass / pooled_users;
    } else {
        report.average_delay = 0.0;
        report.nothing_pooled = true;
    }

    report.base_objective = base.objective(1.0);
    report.pooled_objective = pooled.objective(1.0);
    report.objective_improvement =
        report.base_objective > 0.0
            ? (report.base_objective - report.pooled_objective) / report.base_objective
            : 0.0;
    report.base_rebalancing_share =
        report.base_objective > 0.0 ? base.rebal_time / report.base_objective : 0.0;
    report.pooled_rebalancing_share =
        report.pooled_objective > 0.0 ? pooled.rebal_time / report.pooled_objective
                                      : 0.0;
    return report;
}

std::string flow_to_csv(const FlowSolution& sol, const RoadNetwork& net) {
    std::ostringstream out;
    out.precision(9);
    out << "arc,tail,head,active_flow,rebalancing_flow\n";
    for (int a = 0; a < net.num_arcs(); ++a)
        out << a << ',' << (net.arc(a).tail + 1) << ',' << (net.arc(a).head + 1)
            << ',' << sol.active(a) << ',' << sol.rebalancing[a] << '\n';
    return out.str();
}

std::string metrics_to_json(const MetricsReport& report) {
    nlohmann::json j;
    j["total_demand_per_hour"] = report.total_demand;
    j["pooled_percentage"] = report.pooled_percentage;
    j["average_delay_min"] = report.average_delay;
    j["nothing_pooled"] = report.nothing_pooled;
    j["composition_by_size"] = report.composition;
    j["base_objective"] = report.base_objective;
    j["pooled_objective"] = report.pooled_objective;
    j["objective_improvement"] = report.objective_improvement;
    j["base_rebalancing_share"] = report.base_rebalancing_share;
    j["pooled_rebalancing_share"] = report.pooled_rebalancing_share;
    return j.dump(2);
}

}  // namespace ridepool
