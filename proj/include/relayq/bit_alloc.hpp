#pragma once

#include <vector>

#include "relayq/resource_alloc.hpp"

namespace relayq {

// Per-link loss coefficients:
//   eta_i  = min(1, r_1/alpha_i) c_q        with alpha_i = gamma_sr_i/gamma_rd
//   eta_rd = N_S (1 - (beta/(beta+1))^{2 N_S}) c_q
//            with beta = 2 gamma_rd / sum_i gamma_sr_i
// A strong source link (large alpha) makes the relay budget the bottleneck,
// so its CSI precision stops mattering and eta_i falls off as r_1/alpha_i.
struct LossCoefficients {
    std::vector<double> eta_sr;
    double eta_rd = 0.0;
    std::vector<double> alpha;
    double beta = 0.0;
    double c_q = 1.0;
};

LossCoefficients loss_coefficients(const NetworkConfig& cfg, double r1, double c_q = 1.0);

// Bits that never count against the budget (a link whose CSI the central
// node already has). Contributes nothing to the bound.
inline constexpr int kInfiniteBits = std::numeric_limits<int>::max();

struct BitAllocation {
    std::vector<int> k_sr;
    int k_rd = 0;
    int k_max = 0;
    double bound_value = 0.0;  // sum eta_m 2^-k_m over fed-back links
};

// Greedy marginal allocation: start from all-ones and hand each remaining
// bit to the link with the largest eta_m 2^-k_m; ties go to the lowest
// index, sources before the relay. Exactly optimal for this separable
// convex objective.
BitAllocation greedy_allocate(const LossCoefficients& eta, int k_max);

enum class CentralNode { External, Relay, Destination };

// Relay as central node: S_i-R CSI is local, so the whole budget feeds the
// R-D link. Destination: the reverse. External: plain greedy.
BitAllocation central_node_variant(const LossCoefficients& eta, int k_max, CentralNode node);

nlohmann::json to_json(const BitAllocation& b, const LossCoefficients& eta);

}  // namespace relayq
