#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "relayq/quantizer.hpp"

namespace relayq {

struct NetworkConfig {
    int n_sources = 0;
    std::vector<double> gamma_sr;  // average SNR per S_i-R link (linear)
    double gamma_rd = 0.0;         // average SNR of the R-D link (linear)

    void validate() const;  // throws InvalidInputError
};

struct ChannelRealization {
    std::vector<double> h_sr;  // normalized powers, length n_sources
    double h_rd = 0.0;
};

struct PowerAllocation {
    std::vector<double> p;          // destination-SNR share per source
    double water_level = 0.0;       // common marginal level nu; largest cap when budget is slack
    double sum_rate_nats = 0.0;     // sum of guaranteed per-source rates
    double achieved_rate_nats = 0.0;  // same allocation rated against true caps (diagnostic)
    double surplus = 0.0;           // unallocated budget when every cap binds
};

// Maximizer of sum_i min(ln(1+caps_i), ln(1+p_i)) subject to sum p <= budget:
// p_i = min(caps_i, nu) with nu an exact breakpoint scan. If sum(caps) <=
// budget the caps are returned and the surplus left unallocated.
PowerAllocation max_sum_rate(std::span<const double> caps, double budget);

struct PerfectCsi {};
struct QuantizedCsi {
    // one entry per link, sources in order then the relay-destination link;
    // a disengaged entry passes the true value through (the identity limit).
    std::vector<std::optional<QuantizationVector>> quantizers;
};
using CsiMode = std::variant<PerfectCsi, QuantizedCsi>;

// Solves the relay allocation for one channel draw. With quantized CSI the
// caps and budget are built from the conservatively quantized powers;
// sum_rate_nats is the guaranteed rate (min against the reported caps) and
// achieved_rate_nats re-rates the allocation against the true caps.
PowerAllocation solve_realization(const NetworkConfig& cfg, const ChannelRealization& real,
                                  const CsiMode& csi);

nlohmann::json to_json(const PowerAllocation& a);

}  // namespace relayq
