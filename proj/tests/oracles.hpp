#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <Eigen/Dense>

#include "igabem/igabem.hpp"

namespace oracle {

// B-spline by divided differences of the truncated power (x - s)_+^d over
// knots[i..i+d+1]; coincident knots use derivatives.
inline double truncated_power_bspline(const std::vector<double>& knots, int i, int d, double s) {
    auto deriv = [&](double x, int k) {
        // d^k/dx^k (x - s)_+^d / k!
        if (x <= s) return (k == d && x == s) ? 1.0 : 0.0;
        double c = 1.0;
        for (int m = 0; m < k; ++m) c *= (d - m) / double(m + 1);
        return c * std::pow(x - s, d - k);
    };
    std::function<double(int, int)> dd = [&](int lo, int hi) -> double {
        if (knots[hi] == knots[lo]) return deriv(knots[lo], hi - lo);
        return (dd(lo + 1, hi) - dd(lo, hi - 1)) / (knots[hi] - knots[lo]);
    };
    return (knots[i + d + 1] - knots[i]) * dd(i, i + d + 1);
}

// Adaptive Gauss-Kronrod over [a,b] split at the given points.
inline double integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts = {},
                        double tol = 1e-13) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double lo = std::max(a, cuts[k]), hi = std::min(b, cuts[k + 1]);
        if (!(hi > lo)) continue;
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 10, tol);
    }
    return total;
}

// Log-singular integral over [a,b] with singularity at s, by tanh-sinh on the
// two sides (the endpoint singularity is handled by the double-exponential map).
inline double integrate_log(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts,
                            double tol = 1e-13) {
    boost::math::quadrature::tanh_sinh<double> ts(12);
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double lo = std::max(a, cuts[k]), hi = std::min(b, cuts[k + 1]);
        if (!(hi > lo)) continue;
        total += ts.integrate(f, lo, hi, tol);
    }
    return total;
}

// int_I ln|t - s| B_j(t) dt for any basis, split at s and all breakpoints.
inline double log_moment(const igabem::BasisSpec& B, int j, double s) {
    std::vector<double> cuts(B.breaks.begin(), B.breaks.end());
    cuts.push_back(s);
    return integrate_log(
        [&](double t) {
            double d = std::abs(t - s);
            return d == 0.0 ? 0.0 : std::log(d) * igabem::eval_function(B, j, t);
        },
        B.a(), B.b(), cuts);
}

// Straightforward quadruple-loop evaluation of the two weighted-quadrature
// matrices: every kernel value and every B-spline value is recomputed.
inline Eigen::MatrixXd naive_IK1(const igabem::Discretization& D) {
    const int N = D.dof();
    igabem::KernelSplit ks(D.curve);
    Eigen::MatrixXd M(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double v = 0.0;
            const auto& ri = D.reg[i];
            const auto& rj = D.reg[j];
            for (std::size_t a = 0; a < ri.nodes.size(); ++a) {
                const double x = D.nodes.eta[ri.nodes[a]];
                const double wi = ri.w[a] * igabem::parametric_speed(D.curve, x);
                double inner = 0.0;
                for (std::size_t b = 0; b < rj.nodes.size(); ++b) {
                    const double y = D.nodes.eta[rj.nodes[b]];
                    inner += rj.w[b] * igabem::parametric_speed(D.curve, y) * ks.K1(x, y);
                }
                v += wi * inner;
            }
            M(i, j) = v;
        }
    return M;
}

inline Eigen::MatrixXd naive_IK2(const igabem::Discretization& D) {
    const int N = D.dof(), nq = D.num_nodes();
    Eigen::MatrixXd M(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double v = 0.0;
            const auto& ri = D.reg[i];
            for (std::size_t a = 0; a < ri.nodes.size(); ++a) {
                const int n1 = ri.nodes[a];
                const double wi = ri.w[a] * igabem::parametric_speed(D.curve, D.nodes.eta[n1]);
                double inner = 0.0;
                for (int n2 = 0; n2 < nq; ++n2) {
                    const double y = D.nodes.eta[n2];
                    inner += D.sing.W(n1, n2) * igabem::parametric_speed(D.curve, y) *
                             igabem::eval_function(D.basis(), j, y);
                }
                v += wi * inner;
            }
            M(i, j) = v;
        }
    return M;
}

// Galerkin single-layer entry int int ln|f(s)-f(t)| B_i(s) B_j(t) J(s) J(t)
// for an open curve, by nested adaptive quadrature with the split
// ln|f(s)-f(t)| = K1 + ln|s-t| (inner integral split at s).
inline double galerkin_entry(const igabem::BoundaryCurve& c, const igabem::BasisSpec& B, int i, int j) {
    igabem::KernelSplit ks(c);
    auto si = igabem::support(B, i);
    auto sj = igabem::support(B, j);
    std::vector<double> cuts(B.breaks.begin(), B.breaks.end());
    auto inner = [&](double s) {
        std::vector<double> ic = cuts;
        ic.push_back(s);
        return integrate_log(
            [&](double t) {
                double d = std::abs(t - s);
                if (d == 0.0) return 0.0;
                return (ks.K1(s, t) + std::log(d)) * igabem::eval_function(B, j, t) * igabem::parametric_speed(c, t);
            },
            sj[0].lo, sj[0].hi, ic, 1e-13);
    };
    return integrate(
        [&](double s) { return inner(s) * igabem::eval_function(B, i, s) * igabem::parametric_speed(c, s); },
        si[0].lo, si[0].hi, cuts, 1e-12);
}

// Straight segment f(t) = (t - a, 0) of the given degree-1 basis.
inline igabem::BoundaryCurve segment(double a, double b) {
    auto B = igabem::make_open_basis(1, {a, b});
    return igabem::make_curve(B, {igabem::Vec2(0.0, 0.0), igabem::Vec2(b - a, 0.0)});
}

// int_a^b int_c^d ln|s - t| dt ds in closed form.
inline double double_log_integral(double a, double b, double c, double d) {
    auto G = [](double x) { return x == 0.0 ? 0.0 : 0.5 * x * x * std::log(std::abs(x)) - 0.75 * x * x; };
    return G(b - c) - G(a - c) - G(b - d) + G(a - d);
}

}  // namespace oracle
