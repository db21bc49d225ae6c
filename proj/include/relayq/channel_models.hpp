#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "relayq/rng.hpp"

namespace relayq {

enum class ChannelKind { UniformPower, RayleighPower, Tabulated };

// Normalized channel-power law with E[h] = 1. Immutable after construction
// and safe to share across threads.
//
//   UniformPower : f(h) = 1/2 on [0, 2]
//   RayleighPower: f(h) = e^-h on [0, inf)   (power of a Rayleigh channel)
//   Tabulated    : piecewise-linear cdf built from a (h, pdf) grid; the pdf
//                  is the piecewise-constant derivative of that interpolant,
//                  so quantile() is exact on the grid.
class ChannelDistribution {
public:
    static ChannelDistribution uniform_power();
    static ChannelDistribution rayleigh_power();
    static ChannelDistribution tabulated(std::vector<double> h, std::vector<double> pdf);
    // Two-column CSV (h, pdf); header row required, h strictly increasing.
    static ChannelDistribution from_csv(const std::string& path);

    ChannelKind kind() const { return kind_; }
    bool finite_support() const { return std::isfinite(support_max_); }
    // q_N = inf{h >= 0 : F(h) = 1}; +inf for RayleighPower.
    double support_max() const { return support_max_; }
    double pdf_max() const { return pdf_max_; }
    double mean() const { return mean_; }

    double pdf(double h) const;
    double cdf(double h) const;
    // Smallest h with cdf(h) >= p. Throws InfiniteQuantileError for p >= 1
    // on unbounded support; returns support_max for p = 1 on bounded support.
    double quantile(double p) const;

    // i.i.d. draws by inverse cdf; identical stream state gives a
    // bit-identical sequence.
    double sample_one(RngStream& stream) const { return quantile_unchecked(stream.next_double()); }
    std::vector<double> sample(RngStream& stream, std::size_t count) const;

private:
    ChannelDistribution() = default;
    double quantile_unchecked(double p) const;

    ChannelKind kind_ = ChannelKind::UniformPower;
    double support_max_ = 2.0;
    double pdf_max_ = 0.5;
    double mean_ = 1.0;
    // Tabulated only: grid nodes, cdf at nodes, per-cell density (cdf slope).
    std::vector<double> grid_;
    std::vector<double> cdf_;
    std::vector<double> density_;
};

}  // namespace relayq
