#include "ridepool/granularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>

#include "ridepool/io.hpp"

namespace ridepool {
namespace {

double sq_dist(const Point& a, const Point& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Seeded k-means++ initialization followed by Lloyd iterations (cap 100).
/// Returns per-node cluster assignments; empty clusters are removed and ids
/// compacted.
std::pair<std::vector<int>, std::vector<Point>> kmeans(
    const std::vector<Point>& points, int k, std::uint64_t seed) {
    const int n = static_cast<int>(points.size());
    std::mt19937_64 rng(seed);

    std::vector<Point> centers;
    centers.reserve(k);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::uniform_int_distribution<int> first(0, n - 1);
    centers.push_back(points[first(rng)]);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(points[i], centers.back()));
            total += d2[i];
        }
        if (total <= 0.0) {
            // All remaining points coincide with a center; place duplicates.
            centers.push_back(centers.back());
            continue;
        }
        std::uniform_real_distribution<double> pick(0.0, total);
        double target = pick(rng), acc = 0.0;
        int chosen = n - 1;
        for (int i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= target) {
                chosen = i;
                break;
            }
        }
        centers.push_back(points[chosen]);
    }

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < static_cast<int>(centers.size()); ++c) {
                double d = sq_dist(points[i], centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        std::vector<Point> sums(centers.size(), {0.0, 0.0});
        std::vector<int> counts(centers.size(), 0);
        for (int i = 0; i < n; ++i) {
            sums[assign[i]].x += points[i].x;
            sums[assign[i]].y += points[i].y;
            ++counts[assign[i]];
        }
        for (size_t c = 0; c < centers.size(); ++c)
            if (counts[c] > 0) centers[c] = {sums[c].x / counts[c], sums[c].y / counts[c]};
        if (!changed && iter > 0) break;
    }

    // Compact away empty clusters.
    std::vector<int> counts(centers.size(), 0);
    for (int a : assign) ++counts[a];
    std::vector<int> remap(centers.size(), -1);
    std::vector<Point> kept;
    for (size_t c = 0; c < centers.size(); ++c)
        if (counts[c] > 0) {
            remap[c] = static_cast<int>(kept.size());
            kept.push_back(centers[c]);
        }
    for (int& a : assign) a = remap[a];
    return {assign, kept};
}

}  // namespace

PrunedNetwork prune_network(const RoadNetwork& net,
                            const std::vector<Request>& requests, int k,
                            std::uint64_t seed) {
    if (!net.has_coords())
        throw ValidationError("pruning requires node coordinates");
    if (k < 2 || k > net.num_nodes())
        throw ValidationError("cluster count must be in 2..|V|");

    if (k == net.num_nodes()) {
        // Identity coarsening: keep the instance bit-for-bit so the k = |V|
        // sweep entry reproduces the full-network run exactly.
        PrunedNetwork out{net, {}, {}, 0.0};
        out.node_map.resize(net.num_nodes());
        for (int v = 0; v < net.num_nodes(); ++v) out.node_map[v] = v;
        out.requests = merge_requests(requests, &out.dropped_demand);
        return out;
    }

    auto [node_map, centers] = kmeans(net.coords(), k, seed);
    const int n_clusters = static_cast<int>(centers.size());

    bool identity = n_clusters == net.num_nodes();

    // An arc exists between clusters iff some original arc crosses them.
    // Travel time is the centroid L2 distance over the mean original arc
    // speed; in the identity case the original arc times are kept so the
    // pruned instance reproduces the input exactly.
    double length_sum = 0.0, time_sum = 0.0;
    for (const Arc& a : net.arcs()) {
        length_sum += std::sqrt(sq_dist(net.coords()[a.tail], net.coords()[a.head]));
        time_sum += a.travel_time;
    }
    if (!(length_sum > 0.0) && !identity)
        throw ValidationError("degenerate coordinates: all arc lengths are zero");
    const double mean_speed = length_sum / time_sum;  // distance per minute

    std::map<std::pair<int, int>, double> pruned_arcs;
    for (const Arc& a : net.arcs()) {
        int c1 = node_map[a.tail], c2 = node_map[a.head];
        if (c1 == c2) continue;
        double t = identity
                       ? a.travel_time
                       : std::sqrt(sq_dist(centers[c1], centers[c2])) / mean_speed;
        if (!(t > 0.0)) t = std::numeric_limits<double>::min();
        auto [it, inserted] = pruned_arcs.emplace(std::pair{c1, c2}, t);
        if (!inserted) it->second = std::min(it->second, t);
    }
    std::vector<Arc> arcs;
    arcs.reserve(pruned_arcs.size());
    for (const auto& [cc, t] : pruned_arcs) arcs.push_back({cc.first, cc.second, t});

    std::optional<RoadNetwork> pruned;
    try {
        pruned.emplace(n_clusters, std::move(arcs), centers);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(e.what()) +
                              " (pruned network; try a larger cluster count)");
    }
    PrunedNetwork out{std::move(*pruned), std::move(node_map), {}, 0.0};

    std::vector<Request> remapped;
    remapped.reserve(requests.size());
    for (const Request& r : requests)
        remapped.push_back({out.node_map[r.o], out.node_map[r.d], r.alpha});
    out.requests = merge_requests(remapped, &out.dropped_demand);
    return out;
}

}  // namespace ridepool
