#include "relayq/quantizer.hpp"

#include <algorithm>
#include <cmath>

#include "relayq/errors.hpp"

namespace relayq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double product_of(const std::vector<double>& r) {
    double p = 1.0;
    for (double v : r)
        p *= v;
    return p;
}

void check_level_count(int n_levels) {
    if (n_levels < 1)
        throw InvalidInputError("n_levels must be >= 1");
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw InvalidInputError("gamma must be positive and finite");
}

std::vector<double> levels_from_ratios(const RatioSequence& rs, int n_levels, double gamma) {
    std::vector<double> q(n_levels);
    double prod = 1.0;
    for (int n = 0; n < n_levels; ++n) {
        prod *= rs.r[static_cast<std::size_t>(n)];
        q[static_cast<std::size_t>(n)] = (prod - 1.0) / gamma;
    }
    return q;
}
}  // namespace

QuantizeResult quantize(const QuantizationVector& q, double h) {
    const auto& lv = q.levels;
    const auto it = std::upper_bound(lv.begin(), lv.end(), h);
    const int idx = static_cast<int>(it - lv.begin());
    return {idx, idx == 0 ? 0.0 : lv[static_cast<std::size_t>(idx - 1)]};
}

double RatioSequence::product() const { return product_of(r); }

RatioSequence iterate_ratios(double r0, int n) {
    if (!(r0 > 1.0))
        throw InvalidRatioError("ratio recursion requires r0 > 1");
    if (n < 1)
        throw InvalidInputError("ratio sequence length must be >= 1");
    RatioSequence rs;
    rs.r.resize(static_cast<std::size_t>(n) + 1);
    rs.r[0] = r0;
    for (int i = 1; i <= n; ++i)
        rs.r[static_cast<std::size_t>(i)] = 1.0 + std::log(rs.r[static_cast<std::size_t>(i - 1)]);
    return rs;
}

double solve_ratio_root(int n_levels, double product_target) {
    if (!(product_target > 1.0))
        throw DesignInfeasibleError("ratio product target must exceed 1");
    double lo = 1.0 + 1e-12;
    double hi = product_target;  // prod > r_0, so the root lies below the target
    if (product_of(iterate_ratios(hi, n_levels).r) < product_target)
        throw DesignInfeasibleError("no ratio root in (1, target]");
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (product_of(iterate_ratios(mid, n_levels).r) < product_target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double kappa_star(int n_levels, const ChannelDistribution& dist) {
    if (dist.kind() == ChannelKind::UniformPower)
        return 2.0;
    return dist.quantile(1.0 - 1.0 / static_cast<double>(n_levels));
}

QuantizationVector design_uniform(int n_levels, double gamma) {
    check_level_count(n_levels);
    check_gamma(gamma);
    const double r0 = solve_ratio_root(n_levels, 2.0 * gamma + 1.0);
    const auto rs = iterate_ratios(r0, n_levels);
    QuantizationVector q;
    q.levels = levels_from_ratios(rs, n_levels, gamma);
    q.gamma_design = gamma;
    q.support_max = 2.0;
    return q;
}

QuantizationVector design_general(int n_levels, double gamma, const ChannelDistribution& dist,
                                  std::optional<double> kappa_override) {
    check_gamma(gamma);
    if (n_levels < 2)
        throw TooFewLevelsError("design_general requires N >= 2 (kappa* degenerates at N = 1)");
    const double kappa = kappa_override ? *kappa_override : kappa_star(n_levels, dist);
    if (!(kappa > 0.0))
        throw DegenerateKappaError("kappa must be positive, got " + std::to_string(kappa));
    const double r0 = solve_ratio_root(n_levels, kappa * gamma + 1.0);
    const auto rs = iterate_ratios(r0, n_levels);
    QuantizationVector q;
    q.levels = levels_from_ratios(rs, n_levels, gamma);
    q.gamma_design = gamma;
    q.support_max = dist.support_max();
    return q;
}

QuantizationVector design_max_entropy(int n_levels, const ChannelDistribution& dist) {
    check_level_count(n_levels);
    QuantizationVector q;
    q.levels.resize(static_cast<std::size_t>(n_levels));
    for (int n = 0; n < n_levels; ++n)
        q.levels[static_cast<std::size_t>(n)] =
            dist.quantile(static_cast<double>(n + 1) / static_cast<double>(n_levels + 1));
    q.gamma_design = 0.0;  // independent of SNR
    q.support_max = dist.support_max();
    return q;
}

namespace {

// Stationarity mismatch at level x given fixed neighbors; increasing in x on
// (prev, next), negative at the left end and positive at the right end.
double stationarity_gap(double x, double prev, double cdf_next, double inv_gamma,
                        const ChannelDistribution& dist) {
    const double lhs = (x + inv_gamma) * std::log((x + inv_gamma) / (prev + inv_gamma));
    const double f = std::max(dist.pdf(x), 1e-300);
    const double rhs = (cdf_next - dist.cdf(x)) / f;
    return lhs - rhs;
}

}  // namespace

QuantizationVector design_fixed_point(int n_levels, double gamma, const ChannelDistribution& dist) {
    check_level_count(n_levels);
    check_gamma(gamma);
    const double inv_gamma = 1.0 / gamma;
    const int N = n_levels;

    std::vector<double> q;
    if (dist.kind() == ChannelKind::UniformPower)
        q = design_uniform(N, gamma).levels;
    else if (N >= 2)
        q = design_general(N, gamma, dist).levels;
    else
        q = design_max_entropy(N, dist).levels;

    double top = dist.finite_support() ? dist.support_max() : dist.quantile(1.0 - 1e-12);
    if (q.back() >= top)
        top = 2.0 * q.back();

    constexpr int kMaxSweeps = 10000;
    double residual = kInf;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double max_rel_change = 0.0;
        for (int n = 0; n < N; ++n) {
            const double prev = (n == 0) ? 0.0 : q[static_cast<std::size_t>(n - 1)];
            const bool last = (n == N - 1);
            const double next = last ? top : q[static_cast<std::size_t>(n + 1)];
            const double cdf_next = last ? 1.0 : dist.cdf(next);

            // Bisection for the unique interior stationary point; each solve
            // minimizes I_{n-1} + I_n over q_n, so sweeps never increase the
            // total loss.
            double lo = prev;
            double hi = next;
            for (int it = 0; it < 110 && (hi - lo) > 1e-16 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (stationarity_gap(mid, prev, cdf_next, inv_gamma, dist) < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const double updated = 0.5 * (lo + hi);
            const double old = q[static_cast<std::size_t>(n)];
            max_rel_change = std::max(max_rel_change,
                                      std::abs(updated - old) / std::max(std::abs(old), 1e-300));
            q[static_cast<std::size_t>(n)] = updated;
        }
        residual = max_rel_change;
        if (max_rel_change < 1e-10) {
            QuantizationVector out;
            out.levels = std::move(q);
            out.gamma_design = gamma;
            out.support_max = dist.support_max();
            return out;
        }
    }
    throw NoConvergenceError("fixed-point sweeps did not converge", residual);
}

std::vector<double> stationarity_residuals(const QuantizationVector& q, double gamma,
                                           const ChannelDistribution& dist) {
    const double inv_gamma = 1.0 / gamma;
    const int N = q.level_count();
    std::vector<double> res(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        const double x = q.levels[static_cast<std::size_t>(n)];
        const double prev = (n == 0) ? 0.0 : q.levels[static_cast<std::size_t>(n - 1)];
        const double cdf_next =
            (n == N - 1) ? 1.0 : dist.cdf(q.levels[static_cast<std::size_t>(n + 1)]);
        const double lhs = (x + inv_gamma) * std::log((x + inv_gamma) / (prev + inv_gamma));
        const double rhs = (cdf_next - dist.cdf(x)) / std::max(dist.pdf(x), 1e-300);
        res[static_cast<std::size_t>(n)] = std::abs(lhs - rhs) / std::abs(rhs);
    }
    return res;
}

nlohmann::json to_json(const QuantizationVector& q) {
    nlohmann::json j;
    j["gamma"] = q.gamma_design;
    j["levels"] = q.levels;
    if (std::isfinite(q.support_max))
        j["support_max"] = q.support_max;
    else
        j["support_max"] = "inf";
    return j;
}

QuantizationVector quantization_vector_from_json(const nlohmann::json& j) {
    QuantizationVector q;
    q.gamma_design = j.at("gamma").get<double>();
    q.levels = j.at("levels").get<std::vector<double>>();
    const auto& sm = j.at("support_max");
    q.support_max = sm.is_string() ? kInf : sm.get<double>();
    if (q.levels.empty())
        throw InvalidInputError("quantization vector must have at least one level");
    for (std::size_t i = 0; i < q.levels.size(); ++i) {
        const double lo = i == 0 ? 0.0 : q.levels[i - 1];
        if (!(q.levels[i] > lo))
            throw InvalidInputError("quantization levels must be strictly increasing and positive");
    }
    return q;
}

}  // namespace relayq
