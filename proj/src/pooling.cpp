#include "ridepool/pooling.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace ridepool {

int Bag::multiplicity(int request) const {
    return static_cast<int>(std::count(elements.begin(), elements.end(), request));
}

std::vector<int> Bag::support() const {
    std::vector<int> s;
    for (int e : elements)
        if (s.empty() || s.back() != e) s.push_back(e);
    return s;
}

void enumerate_bags(int M, int K, const std::function<bool(const Bag&)>& emit) {
    if (K < 1) throw std::invalid_argument("K must be at least 1");
    // Nondecreasing index vectors per size: combinations with repetition,
    // emitted by size first, then lexicographically.
    Bag bag;
    std::function<bool(int, int)> build = [&](int min_index, int remaining) -> bool {
        if (remaining == 0) return emit(bag);
        for (int i = min_index; i < M; ++i) {
            bag.elements.push_back(i);
            bool keep_going = build(i, remaining - 1);
            bag.elements.pop_back();
            if (!keep_going) return false;
        }
        return true;
    };
    for (int k = 1; k <= K; ++k)
        if (!build(0, k)) return;
}

std::vector<Bag> enumerate_bags(int M, int K) {
    std::vector<Bag> bags;
    enumerate_bags(M, K, [&](const Bag& b) {
        bags.push_back(b);
        return true;
    });
    return bags;
}

std::uint64_t bag_layer_count(int M, int k) {
    // C(M + k - 1, k)
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i)
        c = c * static_cast<std::uint64_t>(M - 1 + i) / static_cast<std::uint64_t>(i);
    return c;
}

std::vector<Sequence> enumerate_sequences(const Bag& bag,
                                          const std::vector<Request>& requests) {
    if (bag.size() < 2)
        throw std::invalid_argument("sequence enumeration needs a bag of at least 2");
    std::vector<int> support = bag.support();
    const int total_stops = 2 * bag.size();

    std::vector<int> remaining_pickups(support.size());
    std::vector<int> onboard(support.size(), 0);
    for (size_t s = 0; s < support.size(); ++s)
        remaining_pickups[s] = bag.multiplicity(support[s]);

    std::vector<Sequence> out;
    Sequence current;
    int occupancy = 0;

    // Depth-first over stop labels (request, kind); choosing by label rather
    // than by occurrence dedups repeated requests automatically.
    std::function<void()> rec = [&]() {
        if (static_cast<int>(current.size()) == total_stops) {
            out.push_back(current);
            return;
        }
        const bool last_stop = static_cast<int>(current.size()) == total_stops - 1;
        for (size_t s = 0; s < support.size(); ++s) {
            if (remaining_pickups[s] > 0) {
                --remaining_pickups[s];
                ++onboard[s];
                ++occupancy;
                current.push_back({requests[support[s]].o, support[s], StopKind::Pickup});
                rec();
                current.pop_back();
                --occupancy;
                --onboard[s];
                ++remaining_pickups[s];
            }
        }
        for (size_t s = 0; s < support.size(); ++s) {
            if (onboard[s] > 0) {
                // A dropoff that empties the vehicle must be the last stop:
                // no edge may carry a null user flow.
                if (occupancy == 1 && !last_stop) continue;
                --onboard[s];
                --occupancy;
                current.push_back({requests[support[s]].d, support[s], StopKind::Dropoff});
                rec();
                current.pop_back();
                ++occupancy;
                ++onboard[s];
            }
        }
    };
    rec();
    return out;
}

SequenceEvaluation evaluate_sequence(const Sequence& seq,
                                     const ShortestPathTable& table,
                                     const std::vector<Request>& requests) {
    SequenceEvaluation eval;
    std::vector<double> prefix(seq.size(), 0.0);
    for (size_t i = 1; i < seq.size(); ++i)
        prefix[i] = prefix[i - 1] + table.dist(seq[i - 1].node, seq[i].node);
    eval.cost = prefix.back();

    // FIFO matching of pickups to dropoffs of the same request; delays are
    // reported in pickup order.
    std::map<int, std::vector<size_t>> open_pickups;
    std::vector<std::pair<size_t, double>> delays_by_pickup;
    for (size_t i = 0; i < seq.size(); ++i) {
        const Stop& stop = seq[i];
        if (stop.kind == StopKind::Pickup) {
            open_pickups[stop.request].push_back(i);
        } else {
            auto& queue = open_pickups[stop.request];
            size_t pickup = queue.front();
            queue.erase(queue.begin());
            const Request& r = requests[stop.request];
            double delay = prefix[i] - prefix[pickup] - table.dist(r.o, r.d);
            delays_by_pickup.push_back({pickup, delay});
        }
    }
    std::sort(delays_by_pickup.begin(), delays_by_pickup.end());
    for (const auto& [pickup, delay] : delays_by_pickup) {
        eval.delays.push_back(delay);
        eval.max_delay = std::max(eval.max_delay, delay);
    }
    return eval;
}

PoolOption best_pool_option(const Bag& bag, const ShortestPathTable& table,
                            const std::vector<Request>& requests,
                            double delta_bar,
                            std::uint64_t* sequences_evaluated) {
    PoolOption opt;
    opt.bag = bag;
    opt.solo_cost = 0.0;
    for (int e : bag.elements)
        opt.solo_cost += table.dist(requests[e].o, requests[e].d);

    if (bag.size() == 1) {
        const Request& r = requests[bag.elements[0]];
        opt.best_sequence = Sequence{{r.o, bag.elements[0], StopKind::Pickup},
                                     {r.d, bag.elements[0], StopKind::Dropoff}};
        opt.delays = {0.0};
        opt.pooled_cost = opt.solo_cost;
        opt.improvement = 0.0;
        opt.feasible = true;
        return opt;
    }

    auto sequences = enumerate_sequences(bag, requests);
    if (sequences_evaluated) *sequences_evaluated += sequences.size();

    bool found = false;
    double best_cost = 0.0;
    for (const Sequence& seq : sequences) {
        auto eval = evaluate_sequence(seq, table, requests);
        if (eval.max_delay > delta_bar) continue;
        // Ties go to the first sequence in enumeration order.
        if (!found || eval.cost < best_cost) {
            found = true;
            best_cost = eval.cost;
            opt.best_sequence = seq;
            opt.delays = eval.delays;
        }
    }
    opt.feasible = found;
    if (found) {
        opt.pooled_cost = best_cost;
        opt.improvement = opt.solo_cost - opt.pooled_cost;
    }
    return opt;
}

PoolOptionMap precompute_pool_options(const std::vector<Request>& requests,
                                      const ShortestPathTable& table,
                                      const PrecomputeConfig& config,
                                      PrecomputeStats* stats) {
    const auto t0 = std::chrono::steady_clock::now();
    const int M = static_cast<int>(requests.size());

    std::uint64_t projected = 0;
    for (int k = 1; k <= config.K; ++k) projected += bag_layer_count(M, k);
    if (projected > config.max_bags)
        throw ValidationError("bag count " + std::to_string(projected) +
                              " exceeds the configured cap of " +
                              std::to_string(config.max_bags) +
                              "; raise max_bags or reduce K");

    // Size-1 bags never have positive improvement, so only sizes >= 2 are
    // evaluated.
    std::vector<Bag> bags;
    enumerate_bags(M, config.K, [&](const Bag& b) {
        if (b.size() >= 2) bags.push_back(b);
        return true;
    });

    const int workers = std::max(1, config.workers);
    std::vector<std::optional<PoolOption>> results(bags.size());
    std::vector<std::vector<std::uint64_t>> seq_counts(
        workers, std::vector<std::uint64_t>(config.K + 1, 0));

    auto work = [&](int w) {
        for (size_t i = w; i < bags.size(); i += workers) {
            std::uint64_t evaluated = 0;
            PoolOption opt =
                best_pool_option(bags[i], table, requests, config.delta_bar, &evaluated);
            seq_counts[w][bags[i].size()] += evaluated;
            if (opt.feasible && opt.improvement > 0.0) results[i] = std::move(opt);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    PoolOptionMap map;
    for (auto& opt : results)
        if (opt) map.emplace(opt->bag, std::move(*opt));

    if (stats) {
        stats->sequences_per_k.assign(config.K + 1, 0);
        for (const auto& counts : seq_counts)
            for (int k = 0; k <= config.K; ++k) stats->sequences_per_k[k] += counts[k];
        stats->bags_enumerated = projected;
        stats->wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return map;
}

std::vector<std::pair<NodeId, NodeId>> sequence_legs(const Sequence& seq) {
    std::vector<std::pair<NodeId, NodeId>> legs;
    for (size_t i = 1; i < seq.size(); ++i)
        if (seq[i - 1].node != seq[i].node)
            legs.push_back({seq[i - 1].node, seq[i].node});
    return legs;
}

DemandMatrix demand_matrix_of_option(const PoolOption& opt, int n_nodes) {
    if (!opt.feasible || !opt.best_sequence)
        throw ValidationError("demand matrix requested for an infeasible pool option");
    DemandMatrix d(n_nodes);
    for (const auto& [tail, head] : sequence_legs(*opt.best_sequence))
        d.at(head, tail) += 1.0;
    d.close_columns();
    return d;
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t hash_double(std::uint64_t h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return fnv1a(h, &bits, sizeof(bits));
}

std::uint64_t hash_int(std::uint64_t h, std::int64_t v) {
    return fnv1a(h, &v, sizeof(v));
}

}  // namespace

std::uint64_t pool_cache_key(const RoadNetwork& net,
                             const std::vector<Request>& requests, int K,
                             double delta_bar) {
    std::uint64_t h = 14695981039346656037ULL;
    h = hash_int(h, net.num_nodes());
    for (const Arc& a : net.arcs()) {
        h = hash_int(h, a.tail);
        h = hash_int(h, a.head);
        h = hash_double(h, a.travel_time);
    }
    for (const Request& r : requests) {
        h = hash_int(h, r.o);
        h = hash_int(h, r.d);
        h = hash_double(h, r.alpha);
    }
    h = hash_int(h, K);
    h = hash_double(h, delta_bar);
    return h;
}

void save_pool_options(const std::string& path, std::uint64_t key,
                       const PoolOptionMap& options) {
    nlohmann::json j;
    j["key"] = key;
    auto& entries = j["options"] = nlohmann::json::array();
    for (const auto& [bag, opt] : options) {
        nlohmann::json e;
        e["bag"] = bag.elements;
        nlohmann::json seq = nlohmann::json::array();
        for (const Stop& s : *opt.best_sequence)
            seq.push_back({s.node, s.request, s.kind == StopKind::Pickup ? 0 : 1});
        e["seq"] = std::move(seq);
        e["delays"] = opt.delays;
        e["pooled_cost"] = opt.pooled_cost;
        e["solo_cost"] = opt.solo_cost;
        entries.push_back(std::move(e));
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write pool-option cache: " + path);
    out << j.dump();
}

std::optional<PoolOptionMap> load_pool_options(const std::string& path,
                                               std::uint64_t key) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
    if (!j.contains("key") || j["key"].get<std::uint64_t>() != key) return std::nullopt;
    PoolOptionMap map;
    for (const auto& e : j["options"]) {
        PoolOption opt;
        opt.bag.elements = e["bag"].get<std::vector<int>>();
        Sequence seq;
        for (const auto& s : e["seq"])
            seq.push_back({s[0].get<NodeId>(), s[1].get<int>(),
                           s[2].get<int>() == 0 ? StopKind::Pickup : StopKind::Dropoff});
        opt.best_sequence = std::move(seq);
        opt.delays = e["delays"].get<std::vector<double>>();
        opt.pooled_cost = e["pooled_cost"].get<double>();
        opt.solo_cost = e["solo_cost"].get<double>();
        opt.improvement = opt.solo_cost - opt.pooled_cost;
        opt.feasible = true;
        map.emplace(opt.bag, std::move(opt));
    }
    return map;
}

}  // namespace ridepool
