#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "relayq/bit_alloc.hpp"
#include "relayq/errors.hpp"
#include "relayq/loss_eval.hpp"
#include "relayq/rng.hpp"

using namespace relayq;

namespace {

NetworkConfig equal_network(int ns, double g) {
    NetworkConfig cfg;
    cfg.n_sources = ns;
    cfg.gamma_sr.assign(static_cast<std::size_t>(ns), g);
    cfg.gamma_rd = g;
    return cfg;
}

LossCoefficients direct_eta(std::vector<double> eta_sr, double eta_rd) {
    LossCoefficients lc;
    lc.eta_sr = std::move(eta_sr);
    lc.eta_rd = eta_rd;
    lc.alpha.assign(lc.eta_sr.size(), 1.0);
    lc.beta = 1.0;
    return lc;
}

// Exhaustive minimum of sum eta_m 2^-k_m over k >= 1, sum k = k_max.
double brute_force_bound(const std::vector<double>& etas, int k_max) {
    const int m = static_cast<int>(etas.size());
    std::vector<int> k(static_cast<std::size_t>(m), 1);
    double best = std::numeric_limits<double>::infinity();
    // enumerate compositions of the spare bits
    const int spare = k_max - m;
    std::vector<int> extra(static_cast<std::size_t>(m), 0);
    while (true) {
        int used = 0;
        for (int e : extra)
            used += e;
        if (used == spare) {
            double v = 0.0;
            for (int i = 0; i < m; ++i)
                v += etas[static_cast<std::size_t>(i)] *
                     std::ldexp(1.0, -(1 + extra[static_cast<std::size_t>(i)]));
            best = std::min(best, v);
        }
        int i = 0;
        while (i < m) {
            extra[static_cast<std::size_t>(i)] += 1;
            if (extra[static_cast<std::size_t>(i)] <= spare)
                break;
            extra[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == m)
            break;
    }
    return best;
}

}  // namespace

TEST_CASE("loss coefficients from the network geometry") {
    const auto lc = loss_coefficients(equal_network(2, 100.0), 1.5, 1.0);
    CHECK(lc.alpha[0] == doctest::Approx(1.0));
    CHECK(lc.alpha[1] == doctest::Approx(1.0));
    CHECK(lc.beta == doctest::Approx(1.0));
    CHECK(lc.eta_rd == doctest::Approx(2.0 * (1.0 - 1.0 / 16.0)));  // 1.875
    CHECK(lc.eta_sr[0] == doctest::Approx(1.0));                    // min(1, r1)

    // alpha -> inf (overwhelming source link) drives its coefficient to zero
    NetworkConfig skew = equal_network(2, 1e9);
    skew.gamma_rd = 1.0;
    const auto lc2 = loss_coefficients(skew, 1.5, 1.0);
    CHECK(lc2.eta_sr[0] < 1e-8);

    CHECK_THROWS_AS(loss_coefficients(equal_network(2, 1.0), 1.0, 1.0), InvalidInputError);
}

TEST_CASE("relay coefficient decreases in beta") {
    // sweep beta through gamma_rd; eta_rd must fall monotonically
    double prev = std::numeric_limits<double>::infinity();
    for (double grd : {0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
        NetworkConfig cfg = equal_network(3, 10.0);
        cfg.gamma_rd = grd;
        const auto lc = loss_coefficients(cfg, 2.0, 1.0);
        CHECK(lc.eta_rd < prev);
        CHECK(lc.eta_rd > 0.0);
        CHECK(lc.eta_rd <= 3.0);
        prev = lc.eta_rd;
    }
}

TEST_CASE("greedy allocation hand cases") {
    {
        const auto ba = greedy_allocate(direct_eta({1.0, 1.0}, 1.0), 6);
        CHECK(ba.k_sr == std::vector<int>{2, 2});
        CHECK(ba.k_rd == 2);
        CHECK(ba.bound_value == doctest::Approx(3.0 / 4.0));
    }
    {
        const auto ba = greedy_allocate(direct_eta({4.0, 1.0}, 1.0), 5);
        CHECK(ba.k_sr == std::vector<int>{3, 1});
        CHECK(ba.k_rd == 1);
    }
    {
        const auto ba = greedy_allocate(direct_eta({4.0, 1.0}, 1.0), 6);
        CHECK(ba.k_sr == std::vector<int>{4, 1});  // tie at 0.5 goes to the lowest index
        CHECK(ba.k_rd == 1);
    }
    CHECK_THROWS_AS(greedy_allocate(direct_eta({1.0, 1.0}, 1.0), 2), BudgetTooSmallError);

    // equality budget forces all ones
    const auto ones = greedy_allocate(direct_eta({1.0, 1.0}, 1.0), 3);
    CHECK(ones.k_sr == std::vector<int>{1, 1});
    CHECK(ones.k_rd == 1);
}

TEST_CASE("greedy equals brute force") {
    RngStream stream(77, 0);
    for (int inst = 0; inst < 50; ++inst) {
        const int ns = 1 + static_cast<int>(stream.next_u64() % 4);
        std::vector<double> eta_sr(static_cast<std::size_t>(ns));
        for (auto& e : eta_sr)
            e = 0.05 + 4.0 * stream.next_double();
        const double eta_rd = 0.05 + 4.0 * stream.next_double();
        const int k_max = ns + 1 + static_cast<int>(stream.next_u64() % (12 - ns));

        const auto ba = greedy_allocate(direct_eta(eta_sr, eta_rd), k_max);
        auto etas = eta_sr;
        etas.push_back(eta_rd);
        const double best = brute_force_bound(etas, k_max);
        CHECK(ba.bound_value == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("bound is monotone in the budget and stable under exchanges") {
    const auto eta = direct_eta({3.0, 0.7, 1.2}, 2.1);
    double prev = std::numeric_limits<double>::infinity();
    for (int k_max = 4; k_max <= 16; ++k_max) {
        const auto ba = greedy_allocate(eta, k_max);
        CHECK(ba.bound_value <= prev);
        prev = ba.bound_value;

        std::vector<int> bits = ba.k_sr;
        bits.push_back(ba.k_rd);
        std::vector<double> etas = eta.eta_sr;
        etas.push_back(eta.eta_rd);
        // moving one bit between any pair never helps
        for (std::size_t from = 0; from < bits.size(); ++from) {
            for (std::size_t to = 0; to < bits.size(); ++to) {
                if (from == to || bits[from] <= 1)
                    continue;
                double v = 0.0;
                for (std::size_t m = 0; m < bits.size(); ++m) {
                    int k = bits[m] + (m == to) - (m == from);
                    v += etas[m] * std::ldexp(1.0, -k);
                }
                CHECK(v >= ba.bound_value - 1e-12);
            }
        }
    }
}

TEST_CASE("central node variants") {
    const auto eta = direct_eta({1.0, 1.0}, 1.875);
    {
        const auto ba = central_node_variant(eta, 4, CentralNode::Relay);
        CHECK(ba.k_rd == 4);
        CHECK(ba.k_sr == std::vector<int>{kInfiniteBits, kInfiniteBits});
        CHECK(ba.bound_value == doctest::Approx(1.875 / 16.0));
    }
    {
        const auto ba = central_node_variant(eta, 4, CentralNode::Destination);
        CHECK(ba.k_sr == std::vector<int>{2, 2});
        CHECK(ba.k_rd == kInfiniteBits);
        CHECK(ba.bound_value == doctest::Approx(0.5));
        CHECK_THROWS_AS(central_node_variant(eta, 1, CentralNode::Destination),
                        BudgetTooSmallError);
    }
    {
        const auto external = central_node_variant(eta, 4, CentralNode::External);
        CHECK(external.bound_value == greedy_allocate(eta, 4).bound_value);
    }
    // with many sources and a small budget the relay is the best central node
    const auto wide = direct_eta(std::vector<double>(8, 1.0), 2.0);
    const auto relay = central_node_variant(wide, 9, CentralNode::Relay);
    const auto external = central_node_variant(wide, 9, CentralNode::External);
    CHECK(relay.bound_value < external.bound_value);
}

TEST_CASE("greedy allocation never trails uniform allocation in simulation") {
    const auto ray = ChannelDistribution::rayleigh_power();
    NetworkConfig cfg;
    cfg.n_sources = 2;
    cfg.gamma_sr = {std::pow(10.0, 2.5), std::pow(10.0, 2.5)};
    cfg.gamma_rd = 100.0;
    const std::vector<ChannelDistribution> dists(3, ray);

    const auto q_nom = design_general(3, cfg.gamma_sr[0], ray);
    const double r1 = 1.0 + std::log(cfg.gamma_sr[0] * q_nom.levels[0] + 1.0);
    const auto eta = loss_coefficients(cfg, r1, 1.0);

    auto quantizer_for = [&](int bits, double g) {
        const int n_levels = (1 << bits) - 1;
        return n_levels >= 2 ? design_general(n_levels, g, ray)
                             : design_fixed_point(n_levels, g, ray);
    };
    auto percent_for = [&](const std::vector<int>& bits, double& stderr_out) {
        std::vector<std::optional<QuantizationVector>> qs(3);
        for (std::size_t l = 0; l < 3; ++l)
            qs[l] = quantizer_for(bits[l], l == 2 ? cfg.gamma_rd : cfg.gamma_sr[l]);
        const auto rep = monte_carlo_delta(cfg, qs, dists, 10000, 555, 2);
        stderr_out = rep.percent_stderr;
        return 100.0 - rep.percent_lost;
    };

    for (int k_max = 4; k_max <= 10; ++k_max) {
        const auto ba = greedy_allocate(eta, k_max);
        std::vector<int> greedy_bits = ba.k_sr;
        greedy_bits.push_back(ba.k_rd);
        std::vector<int> uniform_bits(3, k_max / 3);
        for (int i = 0; i < k_max % 3; ++i)
            uniform_bits[static_cast<std::size_t>(i)] += 1;
        double se_g = 0.0, se_u = 0.0;
        const double pg = percent_for(greedy_bits, se_g);
        const double pu = percent_for(uniform_bits, se_u);
        CHECK(pg >= pu - 3.0 * std::hypot(se_g, se_u));
    }
}

TEST_CASE("allocation serializes with its coefficients") {
    const auto eta = direct_eta({1.0, 2.0}, 0.5);
    const auto j = to_json(central_node_variant(eta, 5, CentralNode::Destination), eta);
    CHECK(j["k_rd"] == "inf");
    CHECK(j["k_max"] == 5);
    CHECK(j["eta"]["eta_sr"].size() == 2);
}
