#include "support/oracles.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "ridepool/temporal.hpp"

namespace ridepool::testing {

double brute_force_shortest(const RoadNetwork& net, NodeId o, NodeId d) {
    if (o == d) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    // DFS over walks of at most |V| - 1 arcs; an optimal path never repeats
    // a node with positive arc times.
    std::function<void(NodeId, double, int)> dfs = [&](NodeId v, double cost, int depth) {
        if (v == d) {
            best = std::min(best, cost);
            return;
        }
        if (depth >= net.num_nodes() - 1) return;
        for (int a : net.out_arcs(v))
            dfs(net.arc(a).head, cost + net.arc(a).travel_time, depth + 1);
    };
    dfs(o, 0.0, 0);
    return best;
}

double path_cost(const RoadNetwork& net, const std::vector<int>& arcs) {
    double c = 0.0;
    for (int a : arcs) c += net.arc(a).travel_time;
    return c;
}

SequenceEvaluation oracle_evaluate(const Sequence& seq, const RoadNetwork& net,
                                   const ShortestPathTable& table,
                                   const std::vector<Request>& requests) {
    SequenceEvaluation eval;
    std::vector<double> prefix(seq.size(), 0.0);
    for (size_t i = 1; i < seq.size(); ++i)
        prefix[i] =
            prefix[i - 1] +
            path_cost(net, reconstruct_path(table, net, seq[i - 1].node, seq[i].node));
    eval.cost = prefix.back();

    std::map<int, std::vector<size_t>> open;
    std::vector<std::pair<size_t, double>> delays;
    for (size_t i = 0; i < seq.size(); ++i) {
        if (seq[i].kind == StopKind::Pickup) {
            open[seq[i].request].push_back(i);
        } else {
            size_t p = open[seq[i].request].front();
            open[seq[i].request].erase(open[seq[i].request].begin());
            const Request& r = requests[seq[i].request];
            double solo =
                path_cost(net, reconstruct_path(table, net, r.o, r.d));
            delays.push_back({p, prefix[i] - prefix[p] - solo});
        }
    }
    std::sort(delays.begin(), delays.end());
    for (auto& [p, d] : delays) {
        eval.delays.push_back(d);
        eval.max_delay = std::max(eval.max_delay, d);
    }
    return eval;
}

OracleSequenceResult oracle_pool(const Bag& bag, const RoadNetwork& net,
                                 const ShortestPathTable& table,
                                 const std::vector<Request>& requests,
                                 double delta_bar) {
    OracleSequenceResult result;
    const int k = bag.size();

    // Occurrence tokens: 0..k-1 pickups, k..2k-1 dropoffs of the matching
    // occurrence.
    std::vector<int> perm(2 * k);
    for (int i = 0; i < 2 * k; ++i) perm[i] = i;

    std::set<std::vector<std::pair<int, int>>> seen_labels;
    std::sort(perm.begin(), perm.end());
    do {
        // Pickup of each occurrence before its dropoff.
        std::vector<int> pos(2 * k);
        for (int i = 0; i < 2 * k; ++i) pos[perm[i]] = i;
        bool ok = true;
        for (int occ = 0; occ < k; ++occ)
            if (pos[occ] > pos[k + occ]) ok = false;
        if (!ok) continue;
        // Occupancy >= 1 strictly between first and last stop.
        int onboard = 0;
        for (int i = 0; i < 2 * k - 1 && ok; ++i) {
            onboard += perm[i] < k ? 1 : -1;
            if (onboard < 1) ok = false;
        }
        if (!ok) continue;

        Sequence seq;
        std::vector<std::pair<int, int>> labels;
        for (int i = 0; i < 2 * k; ++i) {
            int occ = perm[i] % k;
            bool pickup = perm[i] < k;
            int req = bag.elements[occ];
            seq.push_back({pickup ? requests[req].o : requests[req].d, req,
                           pickup ? StopKind::Pickup : StopKind::Dropoff});
            labels.push_back({req, pickup ? 0 : 1});
        }
        if (!seen_labels.insert(labels).second) continue;
        result.all_valid.push_back(seq);

        auto eval = oracle_evaluate(seq, net, table, requests);
        if (eval.max_delay <= delta_bar) {
            if (!result.feasible || eval.cost < result.best_cost) {
                result.feasible = true;
                result.best_cost = eval.cost;
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return result;
}

double replay_selection(const std::vector<Bag>& order, const PoolOptionMap& options,
                        const std::vector<Request>& requests, double t_bar,
                        const ShortestPathTable& table) {
    std::vector<double> residual(requests.size());
    for (size_t m = 0; m < requests.size(); ++m) residual[m] = requests[m].alpha;
    double objective = 0.0;
    for (const Bag& bag : order) {
        const PoolOption& opt = options.at(bag);
        double gamma = effective_gamma(bag, residual, t_bar);
        objective += gamma * opt.pooled_cost;
        for (int r : bag.support()) {
            residual[r] -= bag.multiplicity(r) * gamma;
            if (residual[r] < 0.0) residual[r] = 0.0;
        }
    }
    for (size_t m = 0; m < requests.size(); ++m)
        objective += residual[m] * table.dist(requests[m].o, requests[m].d);
    return objective;
}

double oracle_best_selection(const PoolOptionMap& options,
                             const std::vector<Request>& requests, double t_bar,
                             const ShortestPathTable& table) {
    std::vector<Bag> bags;
    for (const auto& [bag, opt] : options) bags.push_back(bag);
    const int b = static_cast<int>(bags.size());

    double best = replay_selection({}, options, requests, t_bar, table);
    // Every ordered subset, by DFS over remaining bags.
    std::vector<Bag> order;
    std::vector<char> used(b, 0);
    std::function<void()> rec = [&]() {
        best = std::min(best, replay_selection(order, options, requests, t_bar, table));
        for (int i = 0; i < b; ++i) {
            if (used[i]) continue;
            used[i] = 1;
            order.push_back(bags[i]);
            rec();
            order.pop_back();
            used[i] = 0;
        }
    };
    rec();
    return best;
}

RoadNetwork random_network(std::mt19937_64& rng, int n_nodes, int extra_arcs,
                           bool with_coords) {
    std::vector<NodeId> cycle(n_nodes);
    for (int i = 0; i < n_nodes; ++i) cycle[i] = i;
    std::shuffle(cycle.begin(), cycle.end(), rng);

    std::uniform_real_distribution<double> time_dist(1.0, 10.0);
    std::uniform_int_distribution<int> node_dist(0, n_nodes - 1);

    std::vector<Arc> arcs;
    for (int i = 0; i < n_nodes; ++i)
        arcs.push_back({cycle[i], cycle[(i + 1) % n_nodes], time_dist(rng)});
    for (int e = 0; e < extra_arcs; ++e) {
        NodeId tail = node_dist(rng), head = node_dist(rng);
        if (tail == head) continue;
        arcs.push_back({tail, head, time_dist(rng)});
    }

    std::vector<Point> coords;
    if (with_coords) {
        std::uniform_real_distribution<double> coord_dist(0.0, 100.0);
        for (int i = 0; i < n_nodes; ++i)
            coords.push_back({coord_dist(rng), coord_dist(rng)});
    }
    return RoadNetwork(n_nodes, std::move(arcs), std::move(coords));
}

std::vector<Request> random_requests(std::mt19937_64& rng, const RoadNetwork& net,
                                     int count, double max_alpha) {
    std::uniform_int_distribution<int> node_dist(0, net.num_nodes() - 1);
    std::uniform_real_distribution<double> alpha_dist(0.1, max_alpha);
    std::set<std::pair<NodeId, NodeId>> seen;
    std::vector<Request> requests;
    int guard = 0;
    while (static_cast<int>(requests.size()) < count && ++guard < 100 * count) {
        NodeId o = node_dist(rng), d = node_dist(rng);
        if (o == d || !seen.insert({o, d}).second) continue;
        requests.push_back({o, d, alpha_dist(rng)});
    }
    return requests;
}

}  // namespace ridepool::testing
