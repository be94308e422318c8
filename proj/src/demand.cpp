#include "ridepool/demand.hpp"

#include <map>
#include <stdexcept>

namespace ridepool {

void DemandMatrix::close_columns() {
    for (NodeId j = 0; j < n_; ++j) {
        double off = 0.0;
        for (NodeId i = 0; i < n_; ++i)
            if (i != j) off += (*this)(i, j);
        at(j, j) = -off;
    }
}

double DemandMatrix::column_sum(NodeId j) const {
    double s = 0.0;
    for (NodeId i = 0; i < n_; ++i) s += (*this)(i, j);
    return s;
}

std::vector<double> DemandMatrix::row_sums() const {
    std::vector<double> r(n_, 0.0);
    for (NodeId i = 0; i < n_; ++i)
        for (NodeId j = 0; j < n_; ++j) r[i] += (*this)(i, j);
    return r;
}

DemandMatrix& DemandMatrix::operator+=(const DemandMatrix& other) {
    add_scaled(other, 1.0);
    return *this;
}

void DemandMatrix::add_scaled(const DemandMatrix& other, double factor) {
    if (other.n_ != n_) throw std::invalid_argument("demand matrix size mismatch");
    for (size_t i = 0; i < m_.size(); ++i) m_[i] += factor * other.m_[i];
}

DemandMatrix build_demand_matrix(const std::vector<Request>& requests,
                                 int n_nodes) {
    DemandMatrix d(n_nodes);
    std::map<std::pair<NodeId, NodeId>, int> seen;
    for (const Request& r : requests) {
        if (r.o < 0 || r.o >= n_nodes || r.d < 0 || r.d >= n_nodes)
            throw ValidationError("request endpoint outside node range");
        if (r.o == r.d) throw ValidationError("request with equal origin and destination");
        if (!(r.alpha > 0.0)) throw ValidationError("request with non-positive demand");
        if (!seen.emplace(std::pair{r.o, r.d}, 1).second)
            throw ValidationError("duplicate OD pair in request set; merge first");
        d.at(r.d, r.o) += r.alpha;
    }
    d.close_columns();
    return d;
}

std::vector<Request> scale_requests(std::vector<Request> requests,
                                    double factor) {
    if (!(factor > 0.0)) throw ValidationError("demand scale factor must be positive");
    for (Request& r : requests) r.alpha *= factor;
    return requests;
}

double total_demand(const std::vector<Request>& requests) {
    double s = 0.0;
    for (const Request& r : requests) s += r.alpha;
    return s;
}

}  // namespace ridepool
