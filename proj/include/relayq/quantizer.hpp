#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <json.hpp>

#include "relayq/channel_models.hpp"

namespace relayq {

// Ordered nonzero quantization levels q_0 < ... < q_{N-1}. The implicit
// lower boundary q_{-1} = 0 and upper boundary q_N = support_max complete
// the N+1 quantization intervals.
struct QuantizationVector {
    std::vector<double> levels;
    double gamma_design = 0.0;  // average SNR the vector was designed for (linear)
    double support_max = std::numeric_limits<double>::infinity();

    int level_count() const { return static_cast<int>(levels.size()); }
};

struct QuantizeResult {
    int index;     // interval index in [0, N]
    double level;  // reported value: lower boundary of the interval
};

// Lower-boundary rule: h in [q_{n-1}, q_n) reports q_{n-1}, so the reported
// value never exceeds h and rates computed from it stay achievable.
QuantizeResult quantize(const QuantizationVector& q, double h);

// Ratios r_i = (q_i + 1/gamma)/(q_{i-1} + 1/gamma) of the designed quantizer,
// obeying r_i = 1 + ln r_{i-1}; strictly decreasing toward 1 for r_0 > 1.
struct RatioSequence {
    std::vector<double> r;
    double product() const;
};

// r_0, 1 + ln r_0, ... up to r_n (n+1 entries). Throws InvalidRatioError
// for r0 <= 1.
RatioSequence iterate_ratios(double r0, int n);

// Root r_0 of prod_{i=0..n_levels} r_i = product_target; the product is
// strictly increasing in r_0 so bisection is safe.
double solve_ratio_root(int n_levels, double product_target);

// kappa*_N = F^-1(1 - 1/N), except the uniform law where the exact value is
// the support endpoint 2 for any N > 1.
double kappa_star(int n_levels, const ChannelDistribution& dist);

// Closed-form optimal quantizer for the unit-mean uniform law:
// q_n = (prod_{i<=n} r_i - 1)/gamma with prod_{i=0..N} r_i = 2*gamma + 1.
QuantizationVector design_uniform(int n_levels, double gamma);

// General-law quantizer: same level structure with the product target
// kappa*gamma + 1 (kappa defaults to kappa*_N). Requires N >= 2.
QuantizationVector design_general(int n_levels, double gamma, const ChannelDistribution& dist,
                                  std::optional<double> kappa_override = std::nullopt);

// Exact stationary levels: cyclic coordinate sweeps on
// (q_n + 1/g) ln((q_n + 1/g)/(q_{n-1} + 1/g)) = (F(q_{n+1}) - F(q_n))/f(q_n).
QuantizationVector design_fixed_point(int n_levels, double gamma, const ChannelDistribution& dist);

// Equiprobable intervals baseline: q_n = quantile((n+1)/(N+1)).
QuantizationVector design_max_entropy(int n_levels, const ChannelDistribution& dist);

// Relative residual |lhs - rhs|/|rhs| of the stationarity condition at each
// level; used by tests and the acceptance suite.
std::vector<double> stationarity_residuals(const QuantizationVector& q, double gamma,
                                           const ChannelDistribution& dist);

// {"gamma": <linear>, "levels": [...], "support_max": <number|"inf">}
nlohmann::json to_json(const QuantizationVector& q);
QuantizationVector quantization_vector_from_json(const nlohmann::json& j);

}  // namespace relayq
