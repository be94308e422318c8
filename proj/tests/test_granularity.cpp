#include <doctest.h>

#include <random>

#include "ridepool/granularity.hpp"
#include "ridepool/io.hpp"
#include "support/oracles.hpp"

using namespace ridepool;
using namespace ridepool::testing;

TEST_CASE("identity pruning reproduces the input network") {
    std::mt19937_64 rng(151);
    RoadNetwork net = random_network(rng, 8, 14, /*with_coords=*/true);
    auto requests = random_requests(rng, net, 6);

    auto pruned = prune_network(net, requests, net.num_nodes(), 7);
    CHECK(pruned.network.num_nodes() == net.num_nodes());
    CHECK(pruned.network.num_arcs() == net.num_arcs());
    CHECK(pruned.dropped_demand == doctest::Approx(0.0));
    CHECK(pruned.requests.size() == requests.size());
    // Same adjacency and travel times under the cluster relabeling.
    for (const Arc& a : net.arcs()) {
        int arc = pruned.network.find_arc(pruned.node_map[a.tail],
                                          pruned.node_map[a.head]);
        REQUIRE(arc >= 0);
        CHECK(pruned.network.arc(arc).travel_time ==
              doctest::Approx(a.travel_time).epsilon(1e-12));
    }
}

TEST_CASE("two separable clusters merge demand to at most two requests") {
    // Two tight 2-node clusters far apart, fully connected across.
    std::vector<Point> coords = {{0, 0}, {0, 1}, {100, 0}, {100, 1}};
    std::vector<Arc> arcs;
    for (NodeId a = 0; a < 4; ++a)
        for (NodeId b = 0; b < 4; ++b)
            if (a != b) arcs.push_back({a, b, a / 2 == b / 2 ? 1.0 : 50.0});
    RoadNetwork net(4, std::move(arcs), coords);

    std::vector<Request> requests = {
        {0, 2, 1.0}, {0, 3, 2.0}, {1, 2, 3.0}, {2, 1, 4.0}, {0, 1, 5.0}};
    auto pruned = prune_network(net, requests, 2, 3);
    CHECK(pruned.network.num_nodes() == 2);
    CHECK(pruned.requests.size() <= 2);
    // Intra-cluster request 0 -> 1 is dropped; its demand is accounted for.
    CHECK(pruned.dropped_demand == doctest::Approx(5.0));
    CHECK(total_demand(pruned.requests) + pruned.dropped_demand ==
          doctest::Approx(total_demand(requests)).epsilon(1e-12));
}

TEST_CASE("pruning is deterministic under a fixed seed") {
    std::mt19937_64 rng(161);
    RoadNetwork net = random_network(rng, 12, 20, /*with_coords=*/true);
    auto requests = random_requests(rng, net, 8);
    auto a = prune_network(net, requests, 5, 42);
    auto b = prune_network(net, requests, 5, 42);
    CHECK(a.node_map == b.node_map);
    CHECK(a.network.num_arcs() == b.network.num_arcs());
    CHECK(a.dropped_demand == doctest::Approx(b.dropped_demand));
    for (int arc = 0; arc < a.network.num_arcs(); ++arc) {
        CHECK(a.network.arc(arc).tail == b.network.arc(arc).tail);
        CHECK(a.network.arc(arc).head == b.network.arc(arc).head);
        CHECK(a.network.arc(arc).travel_time ==
              doctest::Approx(b.network.arc(arc).travel_time));
    }
}

TEST_CASE("demand conservation across cluster counts") {
    std::mt19937_64 rng(171);
    RoadNetwork net = random_network(rng, 12, 24, /*with_coords=*/true);
    auto requests = random_requests(rng, net, 10);
    double total = total_demand(requests);
    for (int k : {3, 5, 8, 12}) {
        auto pruned = prune_network(net, requests, k, 9);
        CHECK(total_demand(pruned.requests) + pruned.dropped_demand ==
              doctest::Approx(total).epsilon(1e-9));
        for (const Request& r : pruned.requests) {
            CHECK(r.o != r.d);
            CHECK(r.alpha > 0.0);
        }
        for (int v = 0; v < net.num_nodes(); ++v) {
            CHECK(pruned.node_map[v] >= 0);
            CHECK(pruned.node_map[v] < pruned.network.num_nodes());
        }
    }
}

TEST_CASE("invalid cluster counts are rejected") {
    std::mt19937_64 rng(181);
    RoadNetwork net = random_network(rng, 6, 10, /*with_coords=*/true);
    auto requests = random_requests(rng, net, 4);
    CHECK_THROWS(prune_network(net, requests, 1, 1));
    CHECK_THROWS(prune_network(net, requests, 7, 1));
}

TEST_CASE("pruning requires coordinates") {
    std::mt19937_64 rng(191);
    RoadNetwork net = random_network(rng, 6, 10, /*with_coords=*/false);
    auto requests = random_requests(rng, net, 4);
    CHECK_THROWS(prune_network(net, requests, 3, 1));
}
