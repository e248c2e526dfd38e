#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "gauss_legendre.hpp"
#include "splines.hpp"

namespace igabem {

namespace detail {

inline double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Antiderivative z^{m+1}/(m+1) (ln|z| - 1/(m+1)) of z^m ln|z|, exactly 0 at z = 0.
inline double log_power_primitive(double z, int m) {
    if (z == 0.0) return 0.0;
    const double m1 = m + 1.0;
    return std::pow(z, m + 1) / m1 * (std::log(std::abs(z)) - 1.0 / m1);
}

}  // namespace detail

// Integrals  int_{t0}^{t1} ln|t - s| (t - t0)^k dt,  k = 0..kmax.
//
// With t = t0 + h u and sigma = (s - t0)/h the integral is
// h^{k+1} (ln h/(k+1) + m_k(sigma)),  m_k = int_0^1 ln|u - sigma| u^k du.
// Near the span m_k uses the closed-form primitive expanded about sigma;
// for |sigma| >= 1.5 the expansion cancels badly, and the series
// ln|sigma|/(k+1) - sum_n sigma^{-n} / (n (n+k+1)) converges geometrically.
inline void span_log_moments(double t0, double t1, double s, int kmax, double* out) {
    const double h = t1 - t0;
    const double sigma = (s - t0) / h;
    const double lnh = std::log(h);
    double hp = h;
    for (int k = 0; k <= kmax; ++k) {
        double mk;
        if (std::abs(sigma) >= 1.5) {
            const double inv = 1.0 / sigma;
            double sum = 0.0, pw = 1.0;
            for (int n = 1; n < 400; ++n) {
                pw *= inv;
                double term = pw / (n * (n + k + 1.0));
                sum += term;
                if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
            }
            mk = std::log(std::abs(sigma)) / (k + 1.0) - sum;
        } else {
            mk = 0.0;
            double sp = 1.0;  // sigma^{k-m}, built from m = k downwards
            for (int m = k; m >= 0; --m) {
                mk += detail::binom(k, m) * sp *
                      (detail::log_power_primitive(1.0 - sigma, m) - detail::log_power_primitive(-sigma, m));
                sp *= sigma;
            }
        }
        out[k] = hp * (lnh / (k + 1.0) + mk);
        hp *= h;
    }
}

// Modified moments mu_j(s) = int_I B_j(t) ln|t - s| dt for every logical
// function of B.
//
// Degree-raising recursion on I_q(B_{j,r}) = int ln|t-s| (t - t_j)^q B_{j,r}.
// Each function carries its own origin t_j; the right-hand Cox-de Boor term
// is re-expanded about t_{j+1} binomially. Addends over zero-length knot
// spans are dropped and base spans outside [a, b] contribute nothing.
inline Eigen::VectorXd modified_moments(const BasisSpec& B, double s) {
    const int d = B.degree;
    const auto& T = B.knots;
    const int nk = static_cast<int>(T.size());
    const double a = B.a(), b = B.b();
    const double tol = 1e-14 * B.length();

    // prev[j*(d+1) + q] holds I_q(B_{j,r-1}).
    const int stride = d + 1;
    std::vector<double> prev(static_cast<std::size_t>(nk - 1) * stride, 0.0);
    for (int i = 0; i + 1 < nk; ++i) {
        if (!(T[i + 1] > T[i])) continue;
        if (T[i] < a - tol || T[i + 1] > b + tol) continue;
        span_log_moments(T[i], T[i + 1], s, d, &prev[static_cast<std::size_t>(i) * stride]);
    }
    std::vector<double> cur(prev.size(), 0.0);
    for (int r = 1; r <= d; ++r) {
        const int nfun = nk - 1 - r;
        const int qmax = d - r;
        for (int j = 0; j < nfun; ++j) {
            const double* pj = &prev[static_cast<std::size_t>(j) * stride];
            const double* pj1 = &prev[static_cast<std::size_t>(j + 1) * stride];
            double* cj = &cur[static_cast<std::size_t>(j) * stride];
            const double dl = T[j + r] - T[j];
            const double D = T[j + r + 1] - T[j + 1];
            const double delta = T[j + 1] - T[j];
            for (int q = 0; q <= qmax; ++q) {
                double v = 0.0;
                if (dl > 0.0) v += pj[q + 1] / dl;
                if (D > 0.0) {
                    double acc = 0.0, dp = 1.0;  // delta^{q-m}, m from q downwards
                    for (int m = q; m >= 0; --m) {
                        acc += detail::binom(q, m) * dp * (D * pj1[m] - pj1[m + 1]);
                        dp *= delta;
                    }
                    v += acc / D;
                }
                cj[q] = v;
            }
        }
        std::swap(prev, cur);
    }
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(B.dim());
    for (int j = 0; j < B.num_raw(); ++j) mu[B.logical(j)] += prev[static_cast<std::size_t>(j) * stride];
    return mu;
}

// Logarithmic weight of the singular rules: ln|t - s| (period 0), or the
// periodic ln|(L/pi) sin(pi (t - s)/L)| on closed curves of parameter length L.
struct LogKernel {
    double period = 0.0;
    bool periodic() const { return period > 0.0; }
};

// Smooth remainder ln|(L/pi) sin(pi x/L)| - ln|x| - ln|x - L| - ln|x + L| for
// |x| <= L (analytic there; the next singularities sit at +-2L).
inline double periodic_log_remainder(double x, double L) {
    const double u = std::abs(x);
    auto lnsinc = [](double y) { return y < 1e-8 ? -y * y / 6.0 : std::log(std::sin(y) / y); };
    if (u <= 0.5 * L) return lnsinc(std::numbers::pi * u / L) - std::log((L - u) * (L + u));
    return lnsinc(std::numbers::pi * (L - u) / L) - std::log(u) - std::log(L + u);
}

// int_I ln-weight(t - s) B_j(t) dt for every logical function of B.
inline Eigen::VectorXd log_moments(const BasisSpec& B, double s, const LogKernel& k = {}) {
    if (!k.periodic()) return modified_moments(B, s);
    const double L = k.period;
    Eigen::VectorXd mu = modified_moments(B, s) + modified_moments(B, s + L) + modified_moments(B, s - L);
    const GaussRule g = gauss_legendre(B.degree + 10);
    for (int e = 0; e < B.num_elements(); ++e) {
        Interval el = B.element(e);
        const double h = 0.5 * el.length(), m = 0.5 * (el.lo + el.hi);
        for (int q = 0; q < g.size(); ++q) {
            const double t = m + h * g.x[q];
            const double r = h * g.w[q] * periodic_log_remainder(t - s, L);
            LocalValues lv = local_values(B, t, 0);
            for (int c = 0; c <= B.degree; ++c) mu[B.logical(lv.span - B.degree + c)] += r * lv.d[0][c];
        }
    }
    return mu;
}

// Moments for a list of abscissae; column nu belongs to sigma[nu].
inline Eigen::MatrixXd moment_table(const BasisSpec& B, const std::vector<double>& sigma, const LogKernel& k = {}) {
    Eigen::MatrixXd M(B.dim(), static_cast<Eigen::Index>(sigma.size()));
    for (std::size_t n = 0; n < sigma.size(); ++n) M.col(static_cast<Eigen::Index>(n)) = log_moments(B, sigma[n], k);
    return M;
}

// int_lo^hi ln|t - s| t^k dt in closed form.
inline double log_moment_monomial(int k, double lo, double hi, double s) {
    double v = 0.0;
    for (int m = 0; m <= k; ++m)
        v += detail::binom(k, m) * std::pow(s, k - m) *
             (detail::log_power_primitive(hi - s, m) - detail::log_power_primitive(lo - s, m));
    return v;
}

}  // namespace igabem
