#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ridepool {

/// Inputs to the Poisson co-occurrence probability: per-occurrence arrival
/// rates (per minute, > 0) and the maximum waiting window t_bar (minutes).
/// A request appearing with multiplicity m in a bag contributes its rate m
/// times.
struct TemporalParams {
    std::vector<double> rates;  // per minute
    double t_bar = 0.0;         // minutes
};

/// Probability that every process in `params.rates` has an arrival within a
/// window of length t_bar: sum_i (a_i / sum_j a_j) * prod_{j != i}
/// (1 - exp(-a_j t_bar)). Returns 1 for a single rate.
double pool_probability(const TemporalParams& params);

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Monte Carlo estimate of the same probability: sample first arrivals
/// E_i ~ Exp(a_i) and count max - min <= t_bar. Deterministic for a fixed
/// seed; sampling is chunked so a parallel evaluation with the same chunking
/// reproduces the serial result.
McEstimate pool_probability_mc(const TemporalParams& params,
                               std::int64_t samples, std::uint64_t seed);

}  // namespace ridepool
