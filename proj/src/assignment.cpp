#include "ridepool/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "ridepool/temporal.hpp"

namespace ridepool {

double effective_gamma(const Bag& bag, const std::vector<double>& residual,
                       double t_bar_minutes) {
    double cap = std::numeric_limits<double>::infinity();
    for (int r : bag.support()) {
        if (residual[r] <= 0.0) return 0.0;
        cap = std::min(cap, residual[r] / bag.multiplicity(r));
    }
    if (bag.size() == 1) return cap;

    // Rates enter once per bag occurrence (a request pooled with itself
    // needs the same process to fire that many times) and are converted
    // from per-hour to per-minute to match the waiting window.
    TemporalParams params;
    params.t_bar = t_bar_minutes;
    for (int e : bag.elements) params.rates.push_back(residual[e] / 60.0);
    return cap * pool_probability(params);
}

AssignmentResult greedy_assign(const PoolOptionMap& options,
                               const std::vector<Request>& requests,
                               double t_bar_minutes) {
    AssignmentResult result;
    result.residual.resize(requests.size());
    for (size_t m = 0; m < requests.size(); ++m)
        result.residual[m] = requests[m].alpha;

    // The per-bag improvement is static, so the greedy loop amounts to
    // processing bags by descending improvement per pooled user; ties break
    // to the larger bag, then canonical bag order.
    std::vector<const PoolOption*> order;
    order.reserve(options.size());
    for (const auto& [bag, opt] : options) {
        if (!(opt.improvement > 0.0))
            throw std::invalid_argument("option map must contain only positive improvements");
        order.push_back(&opt);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const PoolOption* a, const PoolOption* b) {
                         double ra = a->improvement / a->bag.size();
                         double rb = b->improvement / b->bag.size();
                         if (ra != rb) return ra > rb;
                         if (a->bag.size() != b->bag.size())
                             return a->bag.size() > b->bag.size();
                         return a->bag < b->bag;
                     });

    for (const PoolOption* opt : order) {
        ++result.iterations;
        double gamma = effective_gamma(opt->bag, result.residual, t_bar_minutes);
        if (gamma > 0.0) {
            result.gamma[opt->bag] = gamma;
            result.selected_order.push_back(opt->bag);
            for (int r : opt->bag.support()) {
                result.residual[r] -= opt->bag.multiplicity(r) * gamma;
                if (result.residual[r] < 0.0) {
                    if (result.residual[r] < -1e-9)
                        throw std::logic_error("residual demand went negative");
                    result.residual[r] = 0.0;
                }
            }
        }
    }
    return result;
}

RidePoolingDemand assemble_d_rp(const AssignmentResult& result,
                                const PoolOptionMap& options,
                                const std::vector<Request>& requests,
                                int n_nodes) {
    RidePoolingDemand out{DemandMatrix(n_nodes)};
    for (const auto& [bag, gamma] : result.gamma) {
        const PoolOption& opt = options.at(bag);
        out.d_rp.add_scaled(demand_matrix_of_option(opt, n_nodes), gamma);
        out.pooled_user_flow += bag.size() * gamma;
    }

    std::vector<Request> residual_requests;
    for (size_t m = 0; m < requests.size(); ++m) {
        double a = result.residual[m];
        if (a < -1e-9) throw ValidationError("negative residual demand");
        if (a > 0.0) {
            residual_requests.push_back({requests[m].o, requests[m].d, a});
            out.unpooled_user_flow += a;
        }
    }
    if (!residual_requests.empty())
        out.d_rp += build_demand_matrix(residual_requests, n_nodes);
    out.d_rp.close_columns();
    return out;
}

double relaxed_objective(const AssignmentResult& result,
                         const PoolOptionMap& options,
                         const std::vector<Request>& requests,
                         const ShortestPathTable& table) {
    double j = 0.0;
    for (const auto& [bag, gamma] : result.gamma)
        j += gamma * options.at(bag).pooled_cost;
    for (size_t m = 0; m < requests.size(); ++m)
        j += result.residual[m] * table.dist(requests[m].o, requests[m].d);
    return j;
}

std::string assignment_to_json(const AssignmentResult& result) {
    nlohmann::json j;
    j["iterations"] = result.iterations;
    j["residual"] = result.residual;
    auto& gammas = j["gamma"] = nlohmann::json::array();
    for (const Bag& bag : result.selected_order) {
        nlohmann::json e;
        e["bag"] = bag.elements;
        e["gamma"] = result.gamma.at(bag);
        gammas.push_back(std::move(e));
    }
    return j.dump(2);
}

}  // namespace ridepool
