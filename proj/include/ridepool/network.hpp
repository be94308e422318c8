#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ridepool {

/// Node index, 0-based internally. File formats are 1-based and converted at
/// the I/O boundary.
using NodeId = int;

struct Arc {
    NodeId tail = 0;
    NodeId head = 0;
    double travel_time = 0.0;  // minutes, > 0
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Directed road network. Immutable after construction; the constructor
/// validates self-loops, positive travel times and strong connectivity.
/// Parallel arcs are collapsed to the minimum travel time (the flow model
/// only ever uses the cheapest arc between two nodes).
class RoadNetwork {
  public:
    RoadNetwork(int n_nodes, std::vector<Arc> arcs,
                std::vector<Point> coords = {});

    int num_nodes() const { return n_nodes_; }
    int num_arcs() const { return static_cast<int>(arcs_.size()); }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const Arc& arc(int a) const { return arcs_[a]; }

    bool has_coords() const { return !coords_.empty(); }
    const std::vector<Point>& coords() const { return coords_; }

    /// Arc index for (tail, head), or -1 if absent.
    int find_arc(NodeId tail, NodeId head) const;

    /// Arc indices leaving `node`.
    const std::vector<int>& out_arcs(NodeId node) const {
        return out_arcs_[node];
    }

    /// Number of duplicate (tail, head) rows collapsed at construction.
    int collapsed_parallel_arcs() const { return collapsed_; }

  private:
    void check_strongly_connected() const;

    int n_nodes_ = 0;
    std::vector<Arc> arcs_;
    std::vector<Point> coords_;
    std::vector<std::vector<int>> out_arcs_;
    int collapsed_ = 0;
};

/// All-pairs shortest travel times plus predecessors for path recovery.
/// pred(o, d) is the node preceding d on the chosen shortest o->d path.
/// Ties between equal-cost paths are broken by the lowest predecessor node
/// index, so results are reproducible across runs and platforms.
class ShortestPathTable {
  public:
    ShortestPathTable(int n, std::vector<double> dist, std::vector<NodeId> pred)
        : n_(n), dist_(std::move(dist)), pred_(std::move(pred)) {}

    int num_nodes() const { return n_; }
    double dist(NodeId o, NodeId d) const { return dist_[o * n_ + d]; }
    NodeId pred(NodeId o, NodeId d) const { return pred_[o * n_ + d]; }

  private:
    int n_;
    std::vector<double> dist_;
    std::vector<NodeId> pred_;
};

/// Floyd-Warshall over the full network. Requires strong connectivity
/// (guaranteed by RoadNetwork construction).
ShortestPathTable all_pairs_shortest_paths(const RoadNetwork& net);

/// Arc indices of one shortest o->d path; empty iff o == d.
std::vector<int> reconstruct_path(const ShortestPathTable& table,
                                  const RoadNetwork& net, NodeId o, NodeId d);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ridepool
