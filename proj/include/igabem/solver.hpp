#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "splines.hpp"

namespace igabem {

// alpha-hat(s) = sum_j alpha_j B_j(s).
struct BoundarySolution {
    BasisSpec basis;
    Eigen::VectorXd alpha;
    double residual = 0.0;
    std::string method;
    std::string warning;

    double operator()(double s) const { return spline_value(basis, alpha, s); }
};

// Dense direct solve. Symmetrized systems try Cholesky first and fall back to
// LU with a warning; as-assembled (nonsymmetric) systems go straight to LU.
inline BoundarySolution solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs, const BasisSpec& basis,
                              bool try_spd = false) {
    const auto n = A.rows();
    if (A.cols() != n || rhs.size() != n) throw UsageError("solve: dimension mismatch");
    if (n != basis.dim()) throw UsageError("solve: system size differs from basis dimension");
    if (!A.allFinite() || !rhs.allFinite()) throw SolverError("solve: non-finite system entries");
    BoundarySolution sol;
    sol.basis = basis;
    bool done = false;
    if (try_spd) {
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success) {
            sol.alpha = llt.solve(rhs);
            sol.method = "cholesky";
            done = true;
        } else {
            sol.warning = "Cholesky factorization failed; fell back to LU";
        }
    }
    if (!done) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        if (!(lu.rcond() > 64 * std::numeric_limits<double>::epsilon()))
            throw SolverError("solve: matrix is numerically singular (rcond " + std::to_string(lu.rcond()) + ")");
        sol.alpha = lu.solve(rhs);
        sol.method = "lu";
    }
    const double bn = rhs.norm();
    sol.residual = (A * sol.alpha - rhs).norm() / (bn > 0.0 ? bn : 1.0);
    return sol;
}

inline BoundarySolution solve(const AssembledSystem& S, const BasisSpec& basis) {
    return solve(S.A, S.rhs, basis, S.symmetrized);
}

// Spectral condition number sigma_max / sigma_min (infinity if singular).
inline double condition_number(const Eigen::MatrixXd& A) {
    if (A.rows() == 0) return 1.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
    return sv[0] / smin;
}

struct ErrorReport {
    double E_M = 0.0;
    double E_R = 0.0;
    double cond = 0.0;
    int dof = 0;
};

// E_M: max error over `npts` uniform parametric points; E_R: relative L2(I)
// error by Gauss of `order` points on every element.
inline ErrorReport error_metrics(const BoundarySolution& sol, const std::function<double(double)>& exact,
                                 int npts = 500, int order = 10) {
    ErrorReport r;
    r.dof = sol.basis.dim();
    const BasisSpec& B = sol.basis;
    for (int k = 0; k < npts; ++k) {
        double s = B.a() + B.length() * k / (npts - 1);
        if (k == npts - 1) s = B.b();
        r.E_M = std::max(r.E_M, std::abs(sol(s) - exact(s)));
    }
    const GaussRule g = gauss_legendre(order);
    double num = 0.0, den = 0.0;
    for (int e = 0; e < B.num_elements(); ++e) {
        Interval el = B.element(e);
        const double h = 0.5 * el.length(), m = 0.5 * (el.lo + el.hi);
        for (int q = 0; q < g.size(); ++q) {
            double s = m + h * g.x[q];
            double ex = exact(s), err = sol(s) - ex;
            num += h * g.w[q] * err * err;
            den += h * g.w[q] * ex * ex;
        }
    }
    if (!(den > 0.0)) throw MetricError("E_R undefined: exact solution has zero norm");
    r.E_R = std::sqrt(num / den);
    return r;
}

// Largest physical element length (chordal, sampled) and distance from x to
// the curve (dense sampling followed by a few Newton steps).
inline double max_element_length(const BoundaryCurve& c, const BasisSpec& B, int samples = 16) {
    double best = 0.0;
    for (int e = 0; e < B.num_elements(); ++e) {
        Interval el = B.element(e);
        double len = 0.0;
        Vec2 prev = curve_eval(c, el.lo);
        for (int k = 1; k <= samples; ++k) {
            Vec2 p = curve_eval(c, el.lo + el.length() * k / samples);
            len += (p - prev).norm();
            prev = p;
        }
        best = std::max(best, len);
    }
    return best;
}

inline double distance_to_curve(const BoundaryCurve& c, const Vec2& x, int samples_per_element = 32) {
    double best = std::numeric_limits<double>::infinity(), tbest = c.a();
    const BasisSpec& B = c.basis;
    for (int e = 0; e < B.num_elements(); ++e) {
        Interval el = B.element(e);
        for (int k = 0; k <= samples_per_element; ++k) {
            double t = el.lo + el.length() * k / samples_per_element;
            double dd = (curve_eval(c, t) - x).norm();
            if (dd < best) best = dd, tbest = t;
        }
    }
    double t = tbest;
    for (int it = 0; it < 8; ++it) {
        CurveJet j = curve_jet(c, t);
        Vec2 r = j.f - x;
        double g = r.dot(j.f1), h = j.f1.squaredNorm() + r.dot(j.f2);
        if (!(h > 0.0)) break;
        t = std::clamp(t - g / h, c.a(), c.b());
        best = std::min(best, (curve_eval(c, t) - x).norm());
    }
    return best;
}

// Representation formula off the boundary:
//   u(x) = -1/(2 pi) int ln|x - f(t)| density(t) J(t) dt
//          + dl_factor/(2 pi) int d/dn_out ln|x - y| u_D(t) J(t) dt.
// Indirect problems pass no u_D. Points closer to Gamma than one element are
// refused (nearly-singular integrals are out of scope).
inline std::vector<double> eval_interior(const BoundaryCurve& c, const BoundarySolution& density,
                                         const std::function<double(double)>* u_D, const std::vector<Vec2>& pts,
                                         int order = 16) {
    const BasisSpec& B = density.basis;
    const double hmin = max_element_length(c, B);
    for (const auto& x : pts) {
        double dist = distance_to_curve(c, x);
        if (dist < hmin)
            throw DomainError("point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                              ") is too close to the boundary: distance " + std::to_string(dist) +
                              " < element length " + std::to_string(hmin));
    }
    if (u_D) require_c2(c);
    const double nsign = u_D ? outward_sign(c) : 0.0;
    const GaussRule g = gauss_legendre(order);
    std::vector<double> out;
    for (const auto& x : pts) {
        double sl = 0.0, dl = 0.0;
        for (int e = 0; e < B.num_elements(); ++e) {
            Interval el = B.element(e);
            const double h = 0.5 * el.length(), m = 0.5 * (el.lo + el.hi);
            for (int q = 0; q < g.size(); ++q) {
                double t = m + h * g.x[q];
                CurveJet j = curve_jet(c, t);
                Vec2 r = j.f - x;
                double w = h * g.w[q];
                sl += w * std::log(r.norm()) * density(t) * j.f1.norm();
                if (u_D) {
                    Vec2 nJ(-j.f1.y(), j.f1.x());  // left normal times J
                    dl += w * nsign * r.dot(nJ) / r.squaredNorm() * (*u_D)(t);
                }
            }
        }
        out.push_back((-sl + dl) / (2.0 * std::numbers::pi));
    }
    return out;
}

}  // namespace igabem
