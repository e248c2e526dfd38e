#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace igabem {

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
    int size() const { return static_cast<int>(x.size()); }
};

// Gauss-Legendre rule of the given order on [lo, hi]. Newton iteration on
// the three-term recurrence; runtime order is needed, hence not Boost's
// compile-time tables.
inline GaussRule gauss_legendre(int order, double lo = -1.0, double hi = 1.0) {
    if (order < 1) throw UsageError("gauss_legendre: order must be >= 1");
    GaussRule r;
    r.x.resize(order);
    r.w.resize(order);
    const int n = order;
    const double c = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                // one more evaluation of the derivative at the converged root
                p0 = 1.0;
                p1 = 0.0;
                for (int k = 1; k <= n; ++k) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
                }
                dp = n * (z * p0 - p1) / (z * z - 1.0);
                break;
            }
        }
        double wt = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = m - c * z;
        r.x[n - 1 - i] = m + c * z;
        r.w[i] = r.w[n - 1 - i] = c * wt;
    }
    if (n % 2 == 1) r.x[n / 2] = m;
    return r;
}

}  // namespace igabem
