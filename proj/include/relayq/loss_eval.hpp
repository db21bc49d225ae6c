#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relayq/channel_models.hpp"
#include "relayq/quantizer.hpp"
#include "relayq/resource_alloc.hpp"

namespace relayq {

struct LossBreakdown {
    double delta_q = 0.0;                // E[ln((h + 1/g)/(q[h] + 1/g))] in nats
    std::vector<double> interval_terms;  // I_{-1} .. I_{N-1}
    double tail_mass = 0.0;              // 1 - F(q_{N-1})
    double tolerance = 0.0;              // quadrature + tail truncation budget
};

// Per-link quantization loss by adaptive quadrature, split exactly at the
// quantization levels where the integrand kinks. Unbounded supports are
// truncated at quantile(1 - 1e-10); the analytic tail bound is folded into
// the reported tolerance.
LossBreakdown delta_q(const QuantizationVector& q, double gamma, const ChannelDistribution& dist);

// Weighted source-link loss bound
//   E[ln((h + 1/g_sr)/(q[h] + 1/g_sr)) (1 - F_rd(alpha q[h]))],
// alpha = g_sr/g_rd. The weight is constant on each quantization interval.
double delta_sir_bound(const QuantizationVector& q, double gamma_sr, double gamma_rd,
                       const ChannelDistribution& dist_sr, const ChannelDistribution& dist_rd);

struct MonteCarloReport {
    std::int64_t n_trials = 0;
    double mean_perfect_rate = 0.0;
    double mean_quantized_rate = 0.0;  // guaranteed rate, used for the loss
    double mean_achieved_rate = 0.0;   // diagnostic: rated against true caps
    double mean_delta = 0.0;
    double delta_stderr = 0.0;
    double percent_lost = 0.0;  // 100 * mean_delta / mean_perfect_rate
    double percent_stderr = 0.0;
};

// End-to-end loss estimate: per trial, draw all N_S + 1 channels from the
// substream (master_seed, trial), solve the perfect and quantized
// allocations, and accumulate the guaranteed-rate loss. Results depend only
// on (seed, n_trials), not on the thread count.
MonteCarloReport monte_carlo_delta(const NetworkConfig& cfg,
                                   const std::vector<std::optional<QuantizationVector>>& quantizers,
                                   const std::vector<ChannelDistribution>& dists,
                                   std::int64_t n_trials, std::uint64_t master_seed,
                                   int n_threads = 1);

nlohmann::json to_json(const LossBreakdown& b);
nlohmann::json to_json(const MonteCarloReport& r);

}  // namespace relayq
