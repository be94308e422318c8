#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/network.hpp"

namespace ridepool {

/// TNTP ingestion. Arc travel times are the free_flow_time column scaled by
/// `time_scale` (datasets vary in units; times are minutes internally).
/// One Request per strictly positive off-diagonal OD flow; duplicates summed,
/// intra-zonal entries dropped.
std::pair<RoadNetwork, std::vector<Request>> parse_tntp(
    std::istream& net_text, std::istream& trips_text,
    std::istream* node_coords_text = nullptr, double time_scale = 1.0);

RoadNetwork parse_tntp_net(std::istream& net_text, double time_scale = 1.0);
std::vector<Request> parse_tntp_trips(std::istream& trips_text);
std::vector<Point> parse_tntp_nodes(std::istream& node_text, int n_nodes);

/// Edge-list format: `tail head time` rows plus optional `node: id x y`
/// coordinate rows; comments start with `~` or `#`.
RoadNetwork parse_edge_list(std::istream& text, double time_scale = 1.0);
void write_edge_list(std::ostream& out, const RoadNetwork& net);

/// Merge duplicate OD pairs (summing alpha) and drop o == d entries.
/// Returns the merged set; `dropped_intrazonal` (optional) receives the
/// total demand removed because o == d.
std::vector<Request> merge_requests(const std::vector<Request>& requests,
                                    double* dropped_intrazonal = nullptr);

}  // namespace ridepool
