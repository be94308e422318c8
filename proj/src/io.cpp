#include "ridepool/io.hpp"

#include <cctype>
#include <iostream>
#include <map>
#include <sstream>

namespace ridepool {
namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_comment(const std::string& line) {
    return !line.empty() && (line[0] == '~' || line[0] == '#');
}

struct TntpMetadata {
    std::map<std::string, std::string> tags;
    int end_line = 0;  // line number after <END OF METADATA>
};

/// Reads `<TAG> value` lines until <END OF METADATA>. `lines` carries the
/// whole stream, pre-split.
TntpMetadata read_metadata(const std::vector<std::string>& lines,
                           const std::string& what) {
    TntpMetadata meta;
    for (size_t i = 0; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty() || is_comment(line)) continue;
        if (line[0] != '<') {
            // Data before <END OF METADATA> marks a malformed header.
            throw ParseError(what + ": missing <END OF METADATA> tag before data at line " +
                             std::to_string(i + 1));
        }
        size_t close = line.find('>');
        if (close == std::string::npos)
            throw ParseError(what + ": unterminated metadata tag at line " +
                             std::to_string(i + 1));
        std::string tag = line.substr(1, close - 1);
        std::string value = trim(line.substr(close + 1));
        if (tag == "END OF METADATA") {
            meta.end_line = static_cast<int>(i + 1);
            return meta;
        }
        meta.tags[tag] = value;
    }
    throw ParseError(what + ": missing <END OF METADATA> tag");
}

int require_int_tag(const TntpMetadata& meta, const std::string& tag,
                    const std::string& what) {
    auto it = meta.tags.find(tag);
    if (it == meta.tags.end())
        throw ParseError(what + ": missing <" + tag + "> metadata tag");
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw ParseError(what + ": invalid value for <" + tag + ">: " + it->second);
    }
}

std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

NodeId check_node(long idx, int n_nodes, const std::string& what, size_t line) {
    if (idx < 1 || idx > n_nodes)
        throw ParseError(what + ": node index " + std::to_string(idx) +
                         " outside 1.." + std::to_string(n_nodes) + " at line " +
                         std::to_string(line));
    return static_cast<NodeId>(idx - 1);
}

}  // namespace

RoadNetwork parse_tntp_net(std::istream& net_text, double time_scale) {
    auto lines = read_lines(net_text);
    auto meta = read_metadata(lines, "net");
    const int n_nodes = require_int_tag(meta, "NUMBER OF NODES", "net");
    const int n_links = require_int_tag(meta, "NUMBER OF LINKS", "net");

    std::vector<Arc> arcs;
    arcs.reserve(n_links);
    for (size_t i = meta.end_line; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty() || is_comment(line)) continue;
        // Strip the trailing ';' and any stray tabs.
        size_t semi = line.find(';');
        if (semi != std::string::npos) line = line.substr(0, semi);
        std::istringstream row(line);
        long init = 0, term = 0;
        double capacity = 0, length = 0, fftt = 0;
        if (!(row >> init >> term >> capacity >> length >> fftt))
            throw ParseError("net: malformed link record at line " + std::to_string(i + 1));
        NodeId tail = check_node(init, n_nodes, "net", i + 1);
        NodeId head = check_node(term, n_nodes, "net", i + 1);
        if (!(fftt > 0.0))
            throw ValidationError("net: zero or negative free_flow_time at line " +
                                  std::to_string(i + 1));
        arcs.push_back({tail, head, fftt * time_scale});
    }
    if (static_cast<int>(arcs.size()) != n_links)
        throw ParseError("net: <NUMBER OF LINKS> is " + std::to_string(n_links) +
                         " but " + std::to_string(arcs.size()) + " link records found");
    return RoadNetwork(n_nodes, std::move(arcs));
}

std::vector<Request> parse_tntp_trips(std::istream& trips_text) {
    auto lines = read_lines(trips_text);
    auto meta = read_metadata(lines, "trips");
    const int n_zones = require_int_tag(meta, "NUMBER OF ZONES", "trips");

    std::map<std::pair<NodeId, NodeId>, double> flows;
    NodeId origin = -1;
    for (size_t i = meta.end_line; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty() || is_comment(line)) continue;
        if (line.rfind("Origin", 0) == 0) {
            std::istringstream row(line.substr(6));
            long o = 0;
            if (!(row >> o))
                throw ParseError("trips: malformed Origin line at line " + std::to_string(i + 1));
            origin = check_node(o, n_zones, "trips", i + 1);
            continue;
        }
        if (origin < 0)
            throw ParseError("trips: destination entries before any Origin block at line " +
                             std::to_string(i + 1));
        // `dest : flow;` entries, several per line.
        std::istringstream row(line);
        std::string entry;
        while (std::getline(row, entry, ';')) {
            entry = trim(entry);
            if (entry.empty()) continue;
            size_t colon = entry.find(':');
            if (colon == std::string::npos)
                throw ParseError("trips: malformed entry '" + entry + "' at line " +
                                 std::to_string(i + 1));
            long dest = 0;
            double flow = 0.0;
            try {
                dest = std::stol(trim(entry.substr(0, colon)));
                flow = std::stod(trim(entry.substr(colon + 1)));
            } catch (const std::exception&) {
                throw ParseError("trips: malformed entry '" + entry + "' at line " +
                                 std::to_string(i + 1));
            }
            NodeId d = check_node(dest, n_zones, "trips", i + 1);
            if (d == origin || flow <= 0.0) continue;  // intra-zonal and empty entries dropped
            flows[{origin, d}] += flow;
        }
    }

    std::vector<Request> requests;
    requests.reserve(flows.size());
    for (const auto& [od, alpha] : flows)
        requests.push_back({od.first, od.second, alpha});
    return requests;
}

std::vector<Point> parse_tntp_nodes(std::istream& node_text, int n_nodes) {
    auto lines = read_lines(node_text);
    std::vector<Point> coords(n_nodes);
    std::vector<char> seen(n_nodes, 0);
    for (size_t i = 0; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty() || is_comment(line)) continue;
        if (line[0] == '<') continue;  // tolerate metadata
        std::string lowered = line;
        for (char& c : lowered) c = static_cast<char>(std::tolower(c));
        if (lowered.rfind("node", 0) == 0) continue;  // column header
        size_t semi = line.find(';');
        if (semi != std::string::npos) line = line.substr(0, semi);
        std::istringstream row(line);
        long node = 0;
        double x = 0, y = 0;
        if (!(row >> node >> x >> y))
            throw ParseError("nodes: malformed coordinate record at line " +
                             std::to_string(i + 1));
        NodeId v = check_node(node, n_nodes, "nodes", i + 1);
        coords[v] = {x, y};
        seen[v] = 1;
    }
    for (NodeId v = 0; v < n_nodes; ++v)
        if (!seen[v])
            throw ParseError("nodes: no coordinates for node " + std::to_string(v + 1));
    return coords;
}

std::pair<RoadNetwork, std::vector<Request>> parse_tntp(
    std::istream& net_text, std::istream& trips_text,
    std::istream* node_coords_text, double time_scale) {
    RoadNetwork net = parse_tntp_net(net_text, time_scale);
    std::vector<Request> requests = parse_tntp_trips(trips_text);
    for (const Request& r : requests)
        if (r.o >= net.num_nodes() || r.d >= net.num_nodes())
            throw ParseError("trips: zone index exceeds network node count");
    if (node_coords_text) {
        auto coords = parse_tntp_nodes(*node_coords_text, net.num_nodes());
        net = RoadNetwork(net.num_nodes(), net.arcs(), std::move(coords));
    }
    return {std::move(net), std::move(requests)};
}

RoadNetwork parse_edge_list(std::istream& text, double time_scale) {
    std::vector<Arc> arcs;
    std::vector<std::pair<NodeId, Point>> coord_rows;
    std::string line;
    size_t lineno = 0;
    int max_node = 0;
    while (std::getline(text, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || is_comment(line)) continue;
        if (line.rfind("node:", 0) == 0) {
            std::istringstream row(line.substr(5));
            long id = 0;
            double x = 0, y = 0;
            if (!(row >> id >> x >> y))
                throw ParseError("edge-list: malformed node record at line " +
                                 std::to_string(lineno));
            if (id < 1)
                throw ParseError("edge-list: node index must be positive at line " +
                                 std::to_string(lineno));
            coord_rows.push_back({static_cast<NodeId>(id - 1), {x, y}});
            max_node = std::max(max_node, static_cast<int>(id));
            continue;
        }
        std::istringstream row(line);
        long tail = 0, head = 0;
        double t = 0.0;
        if (!(row >> tail >> head >> t))
            throw ParseError("edge-list: malformed arc record at line " +
                             std::to_string(lineno));
        if (tail < 1 || head < 1)
            throw ParseError("edge-list: node index must be positive at line " +
                             std::to_string(lineno));
        if (!(t > 0.0))
            throw ValidationError("edge-list: non-positive travel time at line " +
                                  std::to_string(lineno));
        arcs.push_back({static_cast<NodeId>(tail - 1), static_cast<NodeId>(head - 1),
                        t * time_scale});
        max_node = std::max({max_node, static_cast<int>(tail), static_cast<int>(head)});
    }
    std::vector<Point> coords;
    if (!coord_rows.empty()) {
        coords.resize(max_node);
        for (const auto& [id, p] : coord_rows) coords[id] = p;
    }
    size_t before = arcs.size();
    RoadNetwork net(max_node, std::move(arcs), std::move(coords));
    if (net.collapsed_parallel_arcs() > 0)
        std::cerr << "warning: collapsed " << net.collapsed_parallel_arcs()
                  << " duplicate arc rows to minimum travel time\n";
    (void)before;
    return net;
}

void write_edge_list(std::ostream& out, const RoadNetwork& net) {
    out.precision(17);
    if (net.has_coords())
        for (NodeId v = 0; v < net.num_nodes(); ++v)
            out << "node: " << (v + 1) << ' ' << net.coords()[v].x << ' '
                << net.coords()[v].y << '\n';
    for (const Arc& a : net.arcs())
        out << (a.tail + 1) << ' ' << (a.head + 1) << ' ' << a.travel_time << '\n';
}

std::vector<Request> merge_requests(const std::vector<Request>& requests,
                                    double* dropped_intrazonal) {
    std::map<std::pair<NodeId, NodeId>, double> merged;
    double dropped = 0.0;
    for (const Request& r : requests) {
        if (r.o == r.d) {
            dropped += r.alpha;
            continue;
        }
        merged[{r.o, r.d}] += r.alpha;
    }
    if (dropped_intrazonal) *dropped_intrazonal = dropped;
    std::vector<Request> out;
    out.reserve(merged.size());
    for (const auto& [od, alpha] : merged)
        if (alpha > 0.0) out.push_back({od.first, od.second, alpha});
    return out;
}

}  // namespace ridepool
