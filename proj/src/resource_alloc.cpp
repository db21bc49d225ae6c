#include "relayq/resource_alloc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "relayq/errors.hpp"

namespace relayq {

void NetworkConfig::validate() const {
    if (n_sources < 1)
        throw InvalidInputError("network needs at least one source");
    if (static_cast<int>(gamma_sr.size()) != n_sources)
        throw InvalidInputError("gamma_sr length must equal n_sources");
    for (double g : gamma_sr)
        if (!(g > 0.0) || !std::isfinite(g))
            throw InvalidInputError("gamma_sr entries must be positive and finite");
    if (!(gamma_rd > 0.0) || !std::isfinite(gamma_rd))
        throw InvalidInputError("gamma_rd must be positive and finite");
}

PowerAllocation max_sum_rate(std::span<const double> caps, double budget) {
    if (!(budget >= 0.0) || !std::isfinite(budget))
        throw InvalidInputError("budget must be nonnegative and finite");
    for (double c : caps)
        if (!(c >= 0.0) || !std::isfinite(c))
            throw InvalidInputError("caps must be nonnegative and finite");

    const std::size_t m = caps.size();
    PowerAllocation out;
    out.p.assign(m, 0.0);

    const double cap_sum = std::accumulate(caps.begin(), caps.end(), 0.0);
    if (cap_sum <= budget) {
        // Objective is flat beyond the caps; take the minimal-power completion.
        std::copy(caps.begin(), caps.end(), out.p.begin());
        out.water_level = m == 0 ? 0.0 : *std::max_element(caps.begin(), caps.end());
        out.surplus = budget - cap_sum;
    } else {
        // Breakpoint scan: with the k smallest caps bound, the common level is
        // nu = (budget - sum of those caps)/(m - k); valid when it lands in
        // [s_k, s_{k+1}).
        std::vector<double> sorted(caps.begin(), caps.end());
        std::sort(sorted.begin(), sorted.end());
        double prefix = 0.0;
        double nu = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            nu = (budget - prefix) / static_cast<double>(m - k);
            if (nu <= sorted[k])
                break;
            prefix += sorted[k];
        }
        out.water_level = nu;
        for (std::size_t i = 0; i < m; ++i)
            out.p[i] = std::min(caps[i], nu);
    }

    double rate = 0.0;
    for (double p : out.p)
        rate += std::log1p(p);
    out.sum_rate_nats = rate;
    out.achieved_rate_nats = rate;

#ifndef NDEBUG
    // Whenever some source is left below its cap while the budget is spent,
    // the caps must collectively dominate the allocation.
    bool some_below = false;
    for (std::size_t i = 0; i < m; ++i)
        if (out.p[i] < caps[i])
            some_below = true;
    if (some_below && out.surplus == 0.0) {
        const double p_sum = std::accumulate(out.p.begin(), out.p.end(), 0.0);
        assert(cap_sum >= p_sum - 1e-12 * std::max(1.0, p_sum));
    }
#endif
    return out;
}

PowerAllocation solve_realization(const NetworkConfig& cfg, const ChannelRealization& real,
                                  const CsiMode& csi) {
    cfg.validate();
    if (static_cast<int>(real.h_sr.size()) != cfg.n_sources)
        throw InvalidInputError("realization size does not match network");
    for (double h : real.h_sr)
        if (!(h >= 0.0))
            throw InvalidInputError("channel powers must be nonnegative");
    if (!(real.h_rd >= 0.0))
        throw InvalidInputError("channel powers must be nonnegative");

    const std::size_t ns = static_cast<std::size_t>(cfg.n_sources);
    std::vector<double> true_caps(ns);
    for (std::size_t i = 0; i < ns; ++i)
        true_caps[i] = cfg.gamma_sr[i] * real.h_sr[i];
    const double true_budget = cfg.gamma_rd * real.h_rd;

    if (std::holds_alternative<PerfectCsi>(csi))
        return max_sum_rate(true_caps, true_budget);

    const auto& quantizers = std::get<QuantizedCsi>(csi).quantizers;
    if (quantizers.size() != ns + 1)
        throw MissingQuantizerError("quantized CSI needs one quantizer slot per link (" +
                                    std::to_string(ns + 1) + ")");

    std::vector<double> q_caps(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const double qh = quantizers[i] ? quantize(*quantizers[i], real.h_sr[i]).level : real.h_sr[i];
        q_caps[i] = cfg.gamma_sr[i] * qh;
    }
    const double q_hrd = quantizers[ns] ? quantize(*quantizers[ns], real.h_rd).level : real.h_rd;

    PowerAllocation alloc = max_sum_rate(q_caps, cfg.gamma_rd * q_hrd);

    // Guaranteed rate: min against the reported caps (already satisfied by the
    // solver since p_i <= q_caps_i). Achieved rate: the physical channel
    // supports the true caps, so re-rate against those.
    double achieved = 0.0;
    for (std::size_t i = 0; i < ns; ++i)
        achieved += std::log1p(std::min(alloc.p[i], true_caps[i]));
    alloc.achieved_rate_nats = achieved;
    return alloc;
}

nlohmann::json to_json(const PowerAllocation& a) {
    nlohmann::json j;
    j["p"] = a.p;
    j["water_level"] = a.water_level;
    j["sum_rate_nats"] = a.sum_rate_nats;
    j["achieved_rate_nats"] = a.achieved_rate_nats;
    j["surplus"] = a.surplus;
    return j;
}

}  // namespace relayq
