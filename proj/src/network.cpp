#include "ridepool/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ridepool {

RoadNetwork::RoadNetwork(int n_nodes, std::vector<Arc> arcs,
                         std::vector<Point> coords)
    : n_nodes_(n_nodes), coords_(std::move(coords)) {
    if (n_nodes_ <= 0) throw ValidationError("network must have at least one node");
    if (!coords_.empty() && static_cast<int>(coords_.size()) != n_nodes_)
        throw ValidationError("coordinate count does not match node count");

    std::map<std::pair<NodeId, NodeId>, double> best;
    for (const Arc& a : arcs) {
        if (a.tail < 0 || a.tail >= n_nodes_ || a.head < 0 || a.head >= n_nodes_)
            throw ValidationError("arc endpoint outside node range");
        if (a.tail == a.head)
            throw ValidationError("self-loop arc " + std::to_string(a.tail + 1));
        if (!(a.travel_time > 0.0) || !std::isfinite(a.travel_time))
            throw ValidationError("non-positive travel time on arc (" +
                                  std::to_string(a.tail + 1) + "," +
                                  std::to_string(a.head + 1) + ")");
        auto [it, inserted] = best.emplace(std::pair{a.tail, a.head}, a.travel_time);
        if (!inserted) {
            ++collapsed_;
            it->second = std::min(it->second, a.travel_time);
        }
    }
    arcs_.reserve(best.size());
    for (const auto& [od, t] : best)
        arcs_.push_back({od.first, od.second, t});

    out_arcs_.resize(n_nodes_);
    for (int a = 0; a < num_arcs(); ++a)
        out_arcs_[arcs_[a].tail].push_back(a);

    check_strongly_connected();
}

int RoadNetwork::find_arc(NodeId tail, NodeId head) const {
    for (int a : out_arcs_[tail])
        if (arcs_[a].head == head) return a;
    return -1;
}

void RoadNetwork::check_strongly_connected() const {
    // BFS from node 0 forward and backward.
    auto reach = [&](bool forward) {
        std::vector<char> seen(n_nodes_, 0);
        std::vector<std::vector<NodeId>> adj(n_nodes_);
        for (const Arc& a : arcs_)
            forward ? adj[a.tail].push_back(a.head) : adj[a.head].push_back(a.tail);
        std::vector<NodeId> stack = {0};
        seen[0] = 1;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            for (NodeId w : adj[v])
                if (!seen[w]) { seen[w] = 1; stack.push_back(w); }
        }
        return seen;
    };
    auto fwd = reach(true);
    auto bwd = reach(false);
    for (NodeId v = 0; v < n_nodes_; ++v) {
        if (!fwd[v])
            throw ValidationError("network not strongly connected: no path from node 1 to node " +
                                  std::to_string(v + 1));
        if (!bwd[v])
            throw ValidationError("network not strongly connected: no path from node " +
                                  std::to_string(v + 1) + " to node 1");
    }
}

ShortestPathTable all_pairs_shortest_paths(const RoadNetwork& net) {
    const int n = net.num_nodes();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<size_t>(n) * n, inf);
    std::vector<NodeId> pred(static_cast<size_t>(n) * n, -1);

    auto d = [&](NodeId i, NodeId j) -> double& { return dist[i * static_cast<size_t>(n) + j]; };
    auto p = [&](NodeId i, NodeId j) -> NodeId& { return pred[i * static_cast<size_t>(n) + j]; };

    for (NodeId i = 0; i < n; ++i) d(i, i) = 0.0;
    for (const Arc& a : net.arcs()) {
        if (a.travel_time < d(a.tail, a.head)) {
            d(a.tail, a.head) = a.travel_time;
            p(a.tail, a.head) = a.tail;
        }
    }

    // Floyd-Warshall; on ties keep the path whose predecessor of j is lowest.
    for (NodeId k = 0; k < n; ++k)
        for (NodeId i = 0; i < n; ++i) {
            const double dik = d(i, k);
            if (dik == inf) continue;
            for (NodeId j = 0; j < n; ++j) {
                if (i == j || k == j) continue;
                const double via = dik + d(k, j);
                if (via < d(i, j) ||
                    (via == d(i, j) && p(k, j) >= 0 && p(k, j) < p(i, j))) {
                    d(i, j) = via;
                    p(i, j) = p(k, j);
                }
            }
        }

    return ShortestPathTable(n, std::move(dist), std::move(pred));
}

std::vector<int> reconstruct_path(const ShortestPathTable& table,
                                  const RoadNetwork& net, NodeId o, NodeId d) {
    std::vector<int> arcs;
    NodeId cur = d;
    while (cur != o) {
        NodeId prev = table.pred(o, cur);
        if (prev < 0) throw ValidationError("no path recorded for requested pair");
        int a = net.find_arc(prev, cur);
        if (a < 0) throw ValidationError("predecessor arc missing from network");
        arcs.push_back(a);
        cur = prev;
    }
    std::reverse(arcs.begin(), arcs.end());
    return arcs;
}

}  // namespace ridepool
