#include "ridepool/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ridepool {
namespace {

void check_params(const TemporalParams& params) {
    if (params.rates.empty())
        throw std::invalid_argument("pool probability needs at least one rate");
    for (double a : params.rates)
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("pool probability rates must be positive");
    if (params.t_bar < 0.0 || !std::isfinite(params.t_bar))
        throw std::invalid_argument("waiting window must be nonnegative");
}

}  // namespace

double pool_probability(const TemporalParams& params) {
    check_params(params);
    const size_t k = params.rates.size();
    if (k == 1) return 1.0;
    if (params.t_bar == 0.0) return 0.0;

    // Each factor is 1 - e^{-a t} = -expm1(-a t); the product is accumulated
    // in log space so windows with tiny per-OD rates do not underflow to 0.
    double rate_sum = 0.0;
    double log_full_product = 0.0;
    std::vector<double> log_terms(k);
    for (size_t j = 0; j < k; ++j) {
        rate_sum += params.rates[j];
        log_terms[j] = std::log(-std::expm1(-params.rates[j] * params.t_bar));
        log_full_product += log_terms[j];
    }
    double p = 0.0;
    for (size_t i = 0; i < k; ++i)
        p += params.rates[i] / rate_sum * std::exp(log_full_product - log_terms[i]);
    return std::clamp(p, 0.0, 1.0);
}

McEstimate pool_probability_mc(const TemporalParams& params,
                               std::int64_t samples, std::uint64_t seed) {
    check_params(params);
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    const size_t k = params.rates.size();
    if (k == 1) return {1.0, 0.0};

    // Per-chunk seeding keeps the estimate reproducible under any
    // parallel split that respects the chunk boundaries.
    constexpr std::int64_t kChunk = 1 << 16;
    std::int64_t hits = 0;
    for (std::int64_t start = 0, chunk = 0; start < samples; start += kChunk, ++chunk) {
        std::seed_seq seq{seed, static_cast<std::uint64_t>(chunk)};
        std::mt19937_64 rng(seq);
        const std::int64_t end = std::min(samples, start + kChunk);
        for (std::int64_t s = start; s < end; ++s) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0;
            for (size_t i = 0; i < k; ++i) {
                std::exponential_distribution<double> exp_dist(params.rates[i]);
                double e = exp_dist(rng);
                lo = std::min(lo, e);
                hi = std::max(hi, e);
            }
            if (hi - lo <= params.t_bar) ++hits;
        }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return {p, se};
}

}  // namespace ridepool
