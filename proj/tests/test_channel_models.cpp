#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "relayq/channel_models.hpp"
#include "relayq/errors.hpp"
#include "relayq/quadrature.hpp"
#include "relayq/rng.hpp"

using namespace relayq;

namespace {

ChannelDistribution make_tabulated() {
    // Trapezoid input chosen so the piecewise-constant densities come out as
    // {0.6, 0.3, 0.1} on cells [0,1], [1,2], [2,3]; the mean is exactly 1.
    return ChannelDistribution::tabulated({0.0, 1.0, 2.0, 3.0}, {0.8, 0.4, 0.2, 0.0});
}

double ks_statistic(const ChannelDistribution& dist, std::size_t n, std::uint64_t seed) {
    RngStream stream(seed, 0);
    std::vector<double> x = dist.sample(stream, n);
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = dist.cdf(x[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / static_cast<double>(n)));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / static_cast<double>(n)));
    }
    return d;
}

}  // namespace

TEST_CASE("pdf on and off the support") {
    const auto uni = ChannelDistribution::uniform_power();
    const auto ray = ChannelDistribution::rayleigh_power();
    CHECK(uni.pdf(1.0) == doctest::Approx(0.5));
    CHECK(uni.pdf(3.0) == 0.0);
    CHECK(ray.pdf(0.0) == doctest::Approx(1.0));
    CHECK(ray.pdf(2.0) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("cdf values") {
    const auto uni = ChannelDistribution::uniform_power();
    const auto ray = ChannelDistribution::rayleigh_power();
    CHECK(uni.cdf(1.0) == doctest::Approx(0.5));
    CHECK(ray.cdf(std::log(2.0)) == doctest::Approx(0.5));  // 1 - e^{-ln 2}
    CHECK(uni.cdf(0.0) == 0.0);
    CHECK(ray.cdf(0.0) == 0.0);
    CHECK(make_tabulated().cdf(0.0) == 0.0);
}

TEST_CASE("quantile values and errors") {
    const auto uni = ChannelDistribution::uniform_power();
    const auto ray = ChannelDistribution::rayleigh_power();
    CHECK(ray.quantile(1.0 - 1.0 / std::exp(1.0)) == doctest::Approx(1.0));
    // 1 - 1/N with large N approaches ln N for the exponential power law
    CHECK(ray.quantile(1.0 - 1e-6) == doctest::Approx(std::log(1e6)));
    CHECK(uni.quantile(0.75) == doctest::Approx(1.5));
    CHECK(uni.quantile(1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)ray.quantile(1.0), InfiniteQuantileError);
    CHECK_THROWS_AS((void)ray.quantile(-0.1), InvalidInputError);
}

TEST_CASE("sampling: law of large numbers, support, determinism") {
    const auto ray = ChannelDistribution::rayleigh_power();
    RngStream s1(42, 0);
    const auto draws = ray.sample(s1, 1000000);
    double mean = 0.0;
    for (double v : draws)
        mean += v;
    mean /= static_cast<double>(draws.size());
    CHECK(std::abs(mean - 1.0) < 0.005);

    const auto uni = ChannelDistribution::uniform_power();
    RngStream s2(42, 0);
    for (double v : uni.sample(s2, 100000)) {
        CHECK(v >= 0.0);
        CHECK(v <= 2.0);
    }

    RngStream a(42, 7), b(42, 7);
    CHECK(ray.sample(a, 1000) == ray.sample(b, 1000));
}

TEST_CASE("normalization and unit mean by quadrature") {
    const auto tab = make_tabulated();
    for (const auto& dist : {ChannelDistribution::uniform_power(),
                             ChannelDistribution::rayleigh_power(), tab}) {
        const double top = dist.finite_support() ? dist.support_max() : dist.quantile(1.0 - 1e-13);
        const double mass = integrate([&](double h) { return dist.pdf(h); }, 0.0, top, 1e-10);
        const double mean = integrate([&](double h) { return h * dist.pdf(h); }, 0.0, top, 1e-10);
        CHECK(std::abs(mass - 1.0) < 1e-8);
        CHECK(std::abs(mean - 1.0) < 1e-6);
    }
}

TEST_CASE("quantile inverts the cdf") {
    const auto tab = make_tabulated();
    RngStream stream(7, 1);
    for (const auto& dist : {ChannelDistribution::uniform_power(),
                             ChannelDistribution::rayleigh_power(), tab}) {
        for (int i = 0; i < 1000; ++i) {
            const double p = 0.999 * stream.next_double();
            CHECK(std::abs(dist.cdf(dist.quantile(p)) - p) < 1e-9);
        }
        // and the other way around on the interior of the support
        const double top = dist.finite_support() ? dist.support_max() : dist.quantile(0.9999);
        for (int i = 1; i < 200; ++i) {
            const double h = top * i / 200.0;
            CHECK(std::abs(dist.quantile(dist.cdf(h)) - h) < 1e-9);
        }
    }
}

TEST_CASE("empirical cdf matches analytic cdf (Kolmogorov-Smirnov)") {
    const std::size_t n = 100000;
    const double bound = 2.0 / std::sqrt(static_cast<double>(n));
    CHECK(ks_statistic(ChannelDistribution::uniform_power(), n, 11) < bound);
    CHECK(ks_statistic(ChannelDistribution::rayleigh_power(), n, 12) < bound);
}

TEST_CASE("tabulated law") {
    const auto tab = make_tabulated();
    CHECK(tab.kind() == ChannelKind::Tabulated);
    CHECK(tab.support_max() == doctest::Approx(3.0));
    CHECK(tab.pdf(0.5) == doctest::Approx(0.6));
    CHECK(tab.pdf(1.5) == doctest::Approx(0.3));
    CHECK(tab.pdf(2.5) == doctest::Approx(0.1));
    CHECK(tab.pdf(3.5) == 0.0);
    CHECK(tab.cdf(1.0) == doctest::Approx(0.6));
    CHECK(tab.cdf(2.0) == doctest::Approx(0.9));
    CHECK(tab.quantile(0.6) == doctest::Approx(1.0));
    CHECK(tab.pdf_max() == doctest::Approx(0.6));
    CHECK(tab.mean() == doctest::Approx(1.0));

    CHECK_THROWS_AS(ChannelDistribution::tabulated({0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}),
                    InvalidInputError);
    // mean far from 1 is rejected
    CHECK_THROWS_AS(ChannelDistribution::tabulated({0.0, 0.5}, {2.0, 2.0}), InvalidInputError);
}

TEST_CASE("tabulated quantile across a zero-density stretch") {
    // masses 3/4 on [0,1] and 1/4 on [2,3] give unit mean; [1,2] is flat
    const double w = 1e-9;
    const auto tab = ChannelDistribution::tabulated({0.0, 1.0 - w, 1.0, 2.0, 2.0 + w, 3.0},
                                                    {0.75, 0.75, 0.0, 0.0, 0.25, 0.25});
    const double p_flat = tab.cdf(1.0);
    CHECK(p_flat == doctest::Approx(0.75));
    CHECK(tab.cdf(1.5) == doctest::Approx(p_flat));
    // smallest h with cdf >= p, not the far end of the flat run
    CHECK(tab.quantile(p_flat) <= 1.0 + 1e-12);
    CHECK(tab.quantile(0.5 * p_flat) < 1.0);
    for (double p : {0.1, 0.3, 0.7, 0.9, 0.99})
        CHECK(std::abs(tab.cdf(tab.quantile(p)) - p) < 1e-12);
}

TEST_CASE("tabulated law loads from csv") {
    const std::string path = "tab_dist_test.csv";
    {
        std::ofstream out(path);
        out << "h,pdf\n0.0,0.8\n1.0,0.4\n2.0,0.2\n3.0,0.0\n";
    }
    const auto tab = ChannelDistribution::from_csv(path);
    CHECK(tab.cdf(1.0) == doctest::Approx(0.6));
    CHECK(tab.quantile(0.9) == doctest::Approx(2.0));
    std::remove(path.c_str());

    CHECK_THROWS_AS(ChannelDistribution::from_csv("does_not_exist.csv"), InvalidInputError);
}

TEST_CASE("pdf_max is exposed") {
    CHECK(ChannelDistribution::uniform_power().pdf_max() == doctest::Approx(0.5));
    CHECK(ChannelDistribution::rayleigh_power().pdf_max() == doctest::Approx(1.0));
}
