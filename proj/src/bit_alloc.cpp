#include "relayq/bit_alloc.hpp"

#include <cmath>

#include "relayq/errors.hpp"

namespace relayq {

namespace {

double pow2_neg(int k) { return k == kInfiniteBits ? 0.0 : std::ldexp(1.0, -k); }

double bound_of(const std::vector<double>& etas, const std::vector<int>& bits) {
    double b = 0.0;
    for (std::size_t i = 0; i < etas.size(); ++i)
        b += etas[i] * pow2_neg(bits[i]);
    return b;
}

// Greedy over an arbitrary subset of links (all-ones start, one bit per step).
std::vector<int> greedy_bits(const std::vector<double>& etas, int k_max) {
    std::vector<int> bits(etas.size(), 1);
    const int steps = k_max - static_cast<int>(etas.size());
    for (int s = 0; s < steps; ++s) {
        std::size_t best = 0;
        double best_val = -1.0;
        for (std::size_t m = 0; m < etas.size(); ++m) {
            const double v = etas[m] * pow2_neg(bits[m]);
            if (v > best_val) {
                best_val = v;
                best = m;
            }
        }
        bits[best] += 1;
    }
    return bits;
}

}  // namespace

LossCoefficients loss_coefficients(const NetworkConfig& cfg, double r1, double c_q) {
    cfg.validate();
    if (!(r1 > 1.0))
        throw InvalidInputError("r1 must exceed 1");
    if (!(c_q > 0.0))
        throw InvalidInputError("c_q must be positive");

    LossCoefficients lc;
    lc.c_q = c_q;
    double gamma_sum = 0.0;
    for (double g : cfg.gamma_sr)
        gamma_sum += g;
    lc.beta = 2.0 * cfg.gamma_rd / gamma_sum;

    lc.alpha.resize(cfg.gamma_sr.size());
    lc.eta_sr.resize(cfg.gamma_sr.size());
    for (std::size_t i = 0; i < cfg.gamma_sr.size(); ++i) {
        lc.alpha[i] = cfg.gamma_sr[i] / cfg.gamma_rd;
        lc.eta_sr[i] = std::min(1.0, r1 / lc.alpha[i]) * c_q;
    }
    const double ns = static_cast<double>(cfg.n_sources);
    lc.eta_rd = ns * (1.0 - std::pow(lc.beta / (lc.beta + 1.0), 2.0 * ns)) * c_q;
    return lc;
}

BitAllocation greedy_allocate(const LossCoefficients& eta, int k_max) {
    const int n_links = static_cast<int>(eta.eta_sr.size()) + 1;
    if (k_max < n_links)
        throw BudgetTooSmallError("k_max must cover at least one bit per link");

    std::vector<double> etas = eta.eta_sr;
    etas.push_back(eta.eta_rd);
    const auto bits = greedy_bits(etas, k_max);

    BitAllocation out;
    out.k_sr.assign(bits.begin(), bits.end() - 1);
    out.k_rd = bits.back();
    out.k_max = k_max;
    out.bound_value = bound_of(etas, bits);
    return out;
}

BitAllocation central_node_variant(const LossCoefficients& eta, int k_max, CentralNode node) {
    const int ns = static_cast<int>(eta.eta_sr.size());
    BitAllocation out;
    out.k_max = k_max;
    switch (node) {
        case CentralNode::External:
            return greedy_allocate(eta, k_max);
        case CentralNode::Relay: {
            if (k_max < 1)
                throw BudgetTooSmallError("relay central node still needs one R-D bit");
            out.k_sr.assign(static_cast<std::size_t>(ns), kInfiniteBits);
            out.k_rd = k_max;
            out.bound_value = eta.eta_rd * pow2_neg(k_max);
            return out;
        }
        case CentralNode::Destination: {
            if (k_max < ns)
                throw BudgetTooSmallError("destination central node needs one bit per source");
            const auto bits = greedy_bits(eta.eta_sr, k_max);
            out.k_sr = bits;
            out.k_rd = kInfiniteBits;
            out.bound_value = bound_of(eta.eta_sr, bits);
            return out;
        }
    }
    throw InvalidInputError("unknown central node");
}

nlohmann::json to_json(const BitAllocation& b, const LossCoefficients& eta) {
    nlohmann::json j;
    auto bits_value = [](int k) -> nlohmann::json {
        if (k == kInfiniteBits)
            return "inf";
        return k;
    };
    nlohmann::json ks = nlohmann::json::array();
    for (int k : b.k_sr)
        ks.push_back(bits_value(k));
    j["k_sr"] = ks;
    j["k_rd"] = bits_value(b.k_rd);
    j["k_max"] = b.k_max;
    j["bound_value"] = b.bound_value;
    j["eta"] = {{"eta_sr", eta.eta_sr}, {"eta_rd", eta.eta_rd}, {"alpha", eta.alpha},
                {"beta", eta.beta},     {"c_q", eta.c_q}};
    return j;
}

}  // namespace relayq
