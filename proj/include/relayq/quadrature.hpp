#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "relayq/errors.hpp"

namespace relayq {

namespace detail {

// 15-point Kronrod nodes (symmetric half) with Kronrod weights and the
// embedded 7-point Gauss weights (nonzero on odd entries).
struct Gk15 {
    static constexpr double node[8] = {
        0.991455371120813, 0.949107912342759, 0.864864423359769,
        0.741531185599394, 0.586087235467691, 0.405845151377397,
        0.207784955007898, 0.000000000000000};
    static constexpr double wk[8] = {
        0.022935322010529, 0.063092092629979, 0.104790010322250,
        0.140653259715525, 0.169004726639267, 0.190350578064785,
        0.204432940075298, 0.209482141084728};
    static constexpr double wg[8] = {
        0.0, 0.129484966168870, 0.0, 0.279705391489277,
        0.0, 0.381830050505119, 0.0, 0.417959183673469};
};

struct Segment {
    double a, b, value, error;
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(mid);
    double k15 = Gk15::wk[7] * fc;
    double g7 = Gk15::wg[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * Gk15::node[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        k15 += Gk15::wk[i] * fsum;
        g7 += Gk15::wg[i] * fsum;
    }
    return {a, b, k15 * half, std::abs(k15 - g7) * half};
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration to an absolute tolerance: repeatedly
// bisect the segment with the largest error estimate until the summed
// estimate fits the budget. Handles integrands with isolated kinks or jumps
// (quantization boundaries, tabulated densities).
template <class F>
double integrate(F&& f, double a, double b, double abs_tol, int max_segments = 4096) {
    if (!(b > a))
        return 0.0;
    std::vector<detail::Segment> segs;
    segs.push_back(detail::gk15(f, a, b));
    while (true) {
        double total_err = 0.0;
        for (const auto& s : segs)
            total_err += s.error;
        if (total_err <= abs_tol)
            break;
        if (static_cast<int>(segs.size()) >= max_segments)
            throw QuadratureFailureError("adaptive quadrature did not reach tolerance");
        auto worst = std::max_element(
            segs.begin(), segs.end(),
            [](const detail::Segment& x, const detail::Segment& y) { return x.error < y.error; });
        const double lo = worst->a, hi = worst->b;
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi))
            throw QuadratureFailureError("adaptive quadrature stalled on a zero-width segment");
        *worst = detail::gk15(f, lo, mid);
        segs.push_back(detail::gk15(f, mid, hi));
    }
    // sum in position order for a deterministic reduction
    std::sort(segs.begin(), segs.end(),
              [](const detail::Segment& x, const detail::Segment& y) { return x.a < y.a; });
    double total = 0.0;
    for (const auto& s : segs)
        total += s.value;
    return total;
}

}  // namespace relayq
