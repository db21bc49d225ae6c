#include "relayq/loss_eval.hpp"

#include <cmath>
#include <thread>

#include "relayq/errors.hpp"
#include "relayq/quadrature.hpp"
#include "relayq/rng.hpp"

namespace relayq {

namespace {

constexpr double kIntervalTol = 1e-10;
constexpr double kTailProb = 1e-10;

void check_levels(const QuantizationVector& q, const ChannelDistribution& dist) {
    if (q.levels.empty())
        throw InvalidInputError("quantization vector is empty");
    double prev = 0.0;
    for (double v : q.levels) {
        if (!(v > prev))
            throw InvalidInputError("quantization levels must be strictly increasing and positive");
        prev = v;
    }
    if (prev >= dist.support_max())
        throw InvalidInputError("top quantization level lies outside the channel support");
}

// Truncation bound for the last interval of an unbounded law: with T the
// truncation point and q the top level, ln((h+c)/(q+c)) <= (h-q)/(q+c), so the
// discarded piece is at most (E[h 1{h>T}] - q P[h>T])/(q+c). The exponential
// law has E[h 1{h>T}] = (T+1) e^{-T}.
double tail_bound(const ChannelDistribution& dist, double top_level, double trunc, double inv_gamma) {
    if (dist.kind() != ChannelKind::RayleighPower)
        return 0.0;
    const double tail = std::exp(-trunc);
    return tail * (trunc + 1.0 - top_level) / (top_level + inv_gamma);
}

}  // namespace

LossBreakdown delta_q(const QuantizationVector& q, double gamma, const ChannelDistribution& dist) {
    if (!(gamma > 0.0))
        throw InvalidInputError("gamma must be positive");
    check_levels(q, dist);

    const double inv_gamma = 1.0 / gamma;
    const int N = q.level_count();
    const double top =
        dist.finite_support() ? dist.support_max() : dist.quantile(1.0 - kTailProb);

    LossBreakdown out;
    out.interval_terms.resize(static_cast<std::size_t>(N) + 1);
    for (int n = -1; n < N; ++n) {
        const double lo = n < 0 ? 0.0 : q.levels[static_cast<std::size_t>(n)];
        const double hi = n + 1 < N ? q.levels[static_cast<std::size_t>(n + 1)] : top;
        const double base = lo + inv_gamma;
        const double value = integrate(
            [&](double h) { return std::log((h + inv_gamma) / base) * dist.pdf(h); }, lo, hi,
            kIntervalTol);
        out.interval_terms[static_cast<std::size_t>(n + 1)] = value;
        out.tolerance += kIntervalTol;
    }

    // Deterministic pairwise reduction of the interval terms.
    double total = 0.0;
    for (double v : out.interval_terms)
        total += v;
    out.delta_q = total;
    out.tail_mass = 1.0 - dist.cdf(q.levels.back());
    if (!dist.finite_support())
        out.tolerance += tail_bound(dist, q.levels.back(), top, inv_gamma);
    return out;
}

double delta_sir_bound(const QuantizationVector& q, double gamma_sr, double gamma_rd,
                       const ChannelDistribution& dist_sr, const ChannelDistribution& dist_rd) {
    if (!(gamma_sr > 0.0) || !(gamma_rd > 0.0))
        throw InvalidInputError("gammas must be positive");
    check_levels(q, dist_sr);

    // Threshold ratio from {gamma_sr q[h] <= gamma_rd h_rd}: the survival
    // weight is evaluated at (gamma_sr/gamma_rd) q[h].
    const double inv_gamma = 1.0 / gamma_sr;
    const double alpha = gamma_sr / gamma_rd;
    const int N = q.level_count();
    const double top =
        dist_sr.finite_support() ? dist_sr.support_max() : dist_sr.quantile(1.0 - kTailProb);

    // q[h] is constant on each interval, so the survival weight factors out.
    double total = 0.0;
    for (int n = -1; n < N; ++n) {
        const double lo = n < 0 ? 0.0 : q.levels[static_cast<std::size_t>(n)];
        const double hi = n + 1 < N ? q.levels[static_cast<std::size_t>(n + 1)] : top;
        const double base = lo + inv_gamma;
        const double weight = 1.0 - dist_rd.cdf(alpha * lo);
        if (weight <= 0.0)
            continue;
        total += weight * integrate([&](double h) { return std::log((h + inv_gamma) / base) * dist_sr.pdf(h); },
                                    lo, hi, kIntervalTol);
    }
    return total;
}

MonteCarloReport monte_carlo_delta(const NetworkConfig& cfg,
                                   const std::vector<std::optional<QuantizationVector>>& quantizers,
                                   const std::vector<ChannelDistribution>& dists,
                                   std::int64_t n_trials, std::uint64_t master_seed,
                                   int n_threads) {
    cfg.validate();
    if (n_trials < 1)
        throw InvalidInputError("n_trials must be >= 1");
    const std::size_t n_links = static_cast<std::size_t>(cfg.n_sources) + 1;
    if (quantizers.size() != n_links)
        throw MissingQuantizerError("expected one quantizer slot per link");
    if (dists.size() != n_links)
        throw InvalidInputError("expected one distribution per link");

    const std::size_t nt = static_cast<std::size_t>(n_trials);
    std::vector<double> perfect(nt), quantized(nt), achieved(nt);

    const CsiMode quantized_mode = QuantizedCsi{quantizers};
    auto run_trial = [&](std::size_t t) {
        RngStream stream(master_seed, static_cast<std::uint64_t>(t));
        ChannelRealization real;
        real.h_sr.resize(static_cast<std::size_t>(cfg.n_sources));
        for (int i = 0; i < cfg.n_sources; ++i)
            real.h_sr[static_cast<std::size_t>(i)] =
                dists[static_cast<std::size_t>(i)].sample_one(stream);
        real.h_rd = dists[n_links - 1].sample_one(stream);

        const PowerAllocation star = solve_realization(cfg, real, PerfectCsi{});
        const PowerAllocation quant = solve_realization(cfg, real, quantized_mode);
        perfect[t] = star.sum_rate_nats;
        quantized[t] = quant.sum_rate_nats;
        achieved[t] = quant.achieved_rate_nats;
    };

    if (n_threads <= 1) {
        for (std::size_t t = 0; t < nt; ++t)
            run_trial(t);
    } else {
        const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), nt);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < nt; t += workers)
                    run_trial(t);
            });
        }
        for (auto& th : pool)
            th.join();
    }

    // Sequential aggregation in trial order keeps the result independent of
    // the worker schedule. Welford pass for the spread of delta and its
    // covariance with the perfect rate (delta-method stderr of the ratio).
    double sum_perfect = 0.0, sum_quantized = 0.0, sum_achieved = 0.0;
    double mean_d = 0.0, m2_d = 0.0, mean_p = 0.0, m2_p = 0.0, c_dp = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        sum_perfect += perfect[t];
        sum_quantized += quantized[t];
        sum_achieved += achieved[t];
        const double d = perfect[t] - quantized[t];
        const double k = static_cast<double>(t + 1);
        const double dd = d - mean_d;
        const double dp = perfect[t] - mean_p;
        mean_d += dd / k;
        mean_p += dp / k;
        m2_d += dd * (d - mean_d);
        m2_p += dp * (perfect[t] - mean_p);
        c_dp += dd * (perfect[t] - mean_p);
    }

    MonteCarloReport rep;
    rep.n_trials = n_trials;
    const double n = static_cast<double>(n_trials);
    rep.mean_perfect_rate = sum_perfect / n;
    rep.mean_quantized_rate = sum_quantized / n;
    rep.mean_achieved_rate = sum_achieved / n;
    rep.mean_delta = rep.mean_perfect_rate - rep.mean_quantized_rate;
    const double var_d = n_trials > 1 ? m2_d / (n - 1.0) : 0.0;
    const double var_p = n_trials > 1 ? m2_p / (n - 1.0) : 0.0;
    const double cov_dp = n_trials > 1 ? c_dp / (n - 1.0) : 0.0;
    rep.delta_stderr = std::sqrt(var_d / n);
    if (rep.mean_perfect_rate > 0.0) {
        const double ratio = rep.mean_delta / rep.mean_perfect_rate;
        rep.percent_lost = 100.0 * ratio;
        const double var_ratio =
            (var_d + ratio * ratio * var_p - 2.0 * ratio * cov_dp) /
            (n * rep.mean_perfect_rate * rep.mean_perfect_rate);
        rep.percent_stderr = 100.0 * std::sqrt(std::max(var_ratio, 0.0));
    }
    return rep;
}

nlohmann::json to_json(const LossBreakdown& b) {
    nlohmann::json j;
    j["delta_q"] = b.delta_q;
    j["interval_terms"] = b.interval_terms;
    j["tail_mass"] = b.tail_mass;
    j["tolerance"] = b.tolerance;
    return j;
}

nlohmann::json to_json(const MonteCarloReport& r) {
    nlohmann::json j;
    j["n_trials"] = r.n_trials;
    j["mean_perfect_rate"] = r.mean_perfect_rate;
    j["mean_quantized_rate"] = r.mean_quantized_rate;
    j["mean_achieved_rate"] = r.mean_achieved_rate;
    j["mean_delta"] = r.mean_delta;
    j["delta_stderr"] = r.delta_stderr;
    j["percent_lost"] = r.percent_lost;
    j["percent_stderr"] = r.percent_stderr;
    return j;
}

}  // namespace relayq
