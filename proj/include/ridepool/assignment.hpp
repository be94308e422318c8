#pragma once

#include <map>
#include <string>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/pooling.hpp"

namespace ridepool {

struct AssignmentResult {
    std::map<Bag, double> gamma;      // vehicle flow per bag, requests/hour
    std::vector<double> residual;     // unassigned demand per request
    int iterations = 0;
    std::vector<Bag> selected_order;
};

struct RidePoolingDemand {
    DemandMatrix d_rp;
    double pooled_user_flow = 0.0;    // sum |C| gamma_C
    double unpooled_user_flow = 0.0;  // sum residual
};

/// gamma_C = min over support of (residual_i / multiplicity_i) times the
/// co-occurrence probability of the bag's residual rates within t_bar.
/// Zero if any support element has zero residual.
double effective_gamma(const Bag& bag, const std::vector<double>& residual,
                       double t_bar_minutes);

/// Greedy knapsack-like assignment: repeatedly select the bag with the
/// largest improvement per pooled user among unselected positive entries
/// (ties: larger bag, then canonical bag order), allocate effective_gamma
/// on the current residuals, and retire the bag.
AssignmentResult greedy_assign(const PoolOptionMap& options,
                               const std::vector<Request>& requests,
                               double t_bar_minutes);

/// d_rp = sum_C gamma_C * D^{C,*} + demand matrix of the residual requests.
RidePoolingDemand assemble_d_rp(const AssignmentResult& result,
                                const PoolOptionMap& options,
                                const std::vector<Request>& requests,
                                int n_nodes);

/// User-travel-time objective of an assignment:
/// sum_C gamma_C * pooled_cost + sum_m residual_m * t0_m.
double relaxed_objective(const AssignmentResult& result,
                         const PoolOptionMap& options,
                         const std::vector<Request>& requests,
                         const ShortestPathTable& table);

std::string assignment_to_json(const AssignmentResult& result);

}  // namespace ridepool
