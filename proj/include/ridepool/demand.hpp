#pragma once

#include <vector>

#include "ridepool/network.hpp"

namespace ridepool {

/// A travel request: alpha users per hour from origin o to destination d != o.
struct Request {
    NodeId o = 0;
    NodeId d = 0;
    double alpha = 0.0;  // requests per hour, > 0
};

/// Node-balance demand matrix. Column j is the origin, row i the destination;
/// the diagonal closes each column to zero sum.
class DemandMatrix {
  public:
    explicit DemandMatrix(int n) : n_(n), m_(static_cast<size_t>(n) * n, 0.0) {}

    int size() const { return n_; }
    double operator()(NodeId dest, NodeId origin) const {
        return m_[static_cast<size_t>(dest) * n_ + origin];
    }
    double& at(NodeId dest, NodeId origin) {
        return m_[static_cast<size_t>(dest) * n_ + origin];
    }

    /// Recompute each diagonal entry as minus the off-diagonal column sum.
    void close_columns();

    double column_sum(NodeId j) const;

    /// Row sums D*1: net user inflow per node, drives rebalancing.
    std::vector<double> row_sums() const;

    DemandMatrix& operator+=(const DemandMatrix& other);
    void add_scaled(const DemandMatrix& other, double factor);

  private:
    int n_;
    std::vector<double> m_;
};

/// Demand matrix of a request set. Requests must have distinct OD pairs;
/// merge duplicates before calling.
DemandMatrix build_demand_matrix(const std::vector<Request>& requests,
                                 int n_nodes);

std::vector<Request> scale_requests(std::vector<Request> requests,
                                    double factor);

double total_demand(const std::vector<Request>& requests);

}  // namespace ridepool
