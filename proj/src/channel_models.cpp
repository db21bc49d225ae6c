#include "relayq/channel_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "relayq/errors.hpp"

namespace relayq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ChannelDistribution ChannelDistribution::uniform_power() {
    ChannelDistribution d;
    d.kind_ = ChannelKind::UniformPower;
    d.support_max_ = 2.0;
    d.pdf_max_ = 0.5;
    d.mean_ = 1.0;
    return d;
}

ChannelDistribution ChannelDistribution::rayleigh_power() {
    ChannelDistribution d;
    d.kind_ = ChannelKind::RayleighPower;
    d.support_max_ = kInf;
    d.pdf_max_ = 1.0;
    d.mean_ = 1.0;
    return d;
}

ChannelDistribution ChannelDistribution::tabulated(std::vector<double> h, std::vector<double> pdf) {
    if (h.size() < 2 || h.size() != pdf.size())
        throw InvalidInputError("tabulated law needs >= 2 (h, pdf) pairs of equal length");
    if (h.front() < 0.0)
        throw InvalidInputError("tabulated law support must be nonnegative");
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (pdf[i] < 0.0 || !std::isfinite(pdf[i]) || !std::isfinite(h[i]))
            throw InvalidInputError("tabulated pdf values must be finite and nonnegative");
        if (i > 0 && h[i] <= h[i - 1])
            throw InvalidInputError("tabulated h grid must be strictly increasing");
    }

    ChannelDistribution d;
    d.kind_ = ChannelKind::Tabulated;
    d.grid_ = std::move(h);

    // Trapezoid cell masses, normalized so the cdf ends exactly at 1.
    const std::size_t m = d.grid_.size();
    std::vector<double> mass(m - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        mass[i] = 0.5 * (pdf[i] + pdf[i + 1]) * (d.grid_[i + 1] - d.grid_[i]);
        total += mass[i];
    }
    if (total <= 0.0)
        throw InvalidInputError("tabulated pdf has zero total mass");

    d.cdf_.assign(m, 0.0);
    d.density_.assign(m - 1, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        d.cdf_[i + 1] = d.cdf_[i] + mass[i] / total;
        d.density_[i] = (mass[i] / total) / (d.grid_[i + 1] - d.grid_[i]);
    }
    d.cdf_.back() = 1.0;
    d.support_max_ = d.grid_.back();
    d.pdf_max_ = *std::max_element(d.density_.begin(), d.density_.end());

    double mean = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i)
        mean += d.density_[i] * 0.5 * (d.grid_[i + 1] * d.grid_[i + 1] - d.grid_[i] * d.grid_[i]);
    d.mean_ = mean;
    if (std::abs(mean - 1.0) > 1e-6)
        throw InvalidInputError("tabulated law is not unit mean: E[h] = " + std::to_string(mean));
    return d;
}

ChannelDistribution ChannelDistribution::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInputError("cannot open distribution file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw InvalidInputError("empty distribution file: " + path);
    // header row is required and discarded
    std::vector<double> h, p;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw InvalidInputError(path + ":" + std::to_string(lineno) + ": expected two comma-separated columns");
        try {
            h.push_back(std::stod(a));
            p.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw InvalidInputError(path + ":" + std::to_string(lineno) + ": non-numeric value");
        }
    }
    return tabulated(std::move(h), std::move(p));
}

double ChannelDistribution::pdf(double h) const {
    if (h < 0.0)
        return 0.0;
    switch (kind_) {
        case ChannelKind::UniformPower:
            return h <= 2.0 ? 0.5 : 0.0;
        case ChannelKind::RayleighPower:
            return std::exp(-h);
        case ChannelKind::Tabulated: {
            if (h < grid_.front() || h > grid_.back())
                return 0.0;
            auto it = std::upper_bound(grid_.begin(), grid_.end(), h);
            std::size_t cell = (it == grid_.begin()) ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
            if (cell >= density_.size())
                cell = density_.size() - 1;
            return density_[cell];
        }
    }
    return 0.0;
}

double ChannelDistribution::cdf(double h) const {
    if (h <= 0.0)
        return 0.0;
    switch (kind_) {
        case ChannelKind::UniformPower:
            return h >= 2.0 ? 1.0 : 0.5 * h;
        case ChannelKind::RayleighPower:
            return -std::expm1(-h);
        case ChannelKind::Tabulated: {
            if (h <= grid_.front())
                return 0.0;
            if (h >= grid_.back())
                return 1.0;
            auto it = std::upper_bound(grid_.begin(), grid_.end(), h);
            const std::size_t cell = static_cast<std::size_t>(it - grid_.begin()) - 1;
            return cdf_[cell] + density_[cell] * (h - grid_[cell]);
        }
    }
    return 0.0;
}

double ChannelDistribution::quantile(double p) const {
    if (p < 0.0 || p > 1.0)
        throw InvalidInputError("quantile probability outside [0, 1]");
    if (p >= 1.0 && !finite_support())
        throw InfiniteQuantileError("quantile(1) diverges on unbounded support");
    return quantile_unchecked(p);
}

double ChannelDistribution::quantile_unchecked(double p) const {
    switch (kind_) {
        case ChannelKind::UniformPower:
            return 2.0 * p;
        case ChannelKind::RayleighPower:
            return -std::log1p(-p);
        case ChannelKind::Tabulated: {
            if (p <= 0.0)
                return 0.0;
            if (p >= 1.0)
                return grid_.back();
            // first node with cdf >= p; the cell before it has positive
            // density (a zero-density cell cannot raise the cdf past p), so
            // the crossing point below is the smallest h with cdf(h) >= p.
            const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
            const std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
            return grid_[idx - 1] + (p - cdf_[idx - 1]) / density_[idx - 1];
        }
    }
    return 0.0;
}

std::vector<double> ChannelDistribution::sample(RngStream& stream, std::size_t count) const {
    std::vector<double> out(count);
    for (auto& v : out)
        v = sample_one(stream);
    return out;
}

}  // namespace relayq
