#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "splines.hpp"

namespace igabem {

using Vec2 = Eigen::Vector2d;

// Parametric curve f(s) = sum_i Q_i B_i(s); one control point per logical
// basis function (cyclic repetition is implicit for closed curves).
struct BoundaryCurve {
    BasisSpec basis;
    std::vector<Vec2> ctrl;

    bool closed() const { return basis.closed; }
    double a() const { return basis.a(); }
    double b() const { return basis.b(); }
    double length() const { return basis.length(); }

    // Continuity order of f across breakpoints (large if none are interior).
    int smoothness() const {
        int worst = 0;
        const int nb = static_cast<int>(basis.breaks.size());
        for (int k = 0; k < nb; ++k) {
            bool seam = (k == 0 || k == nb - 1);
            if (seam && !basis.closed) continue;
            worst = std::max(worst, basis.mult[k]);
        }
        return worst == 0 ? std::numeric_limits<int>::max() / 2 : basis.degree - worst;
    }
};

inline BoundaryCurve make_curve(const BasisSpec& basis, const std::vector<Vec2>& ctrl, int samples = 1000) {
    if (static_cast<int>(ctrl.size()) != basis.dim())
        throw ConstructionError("control point count " + std::to_string(ctrl.size()) +
                                " does not match basis dimension " + std::to_string(basis.dim()));
    BoundaryCurve c{basis, ctrl};
    if (basis.degree < 1) throw ConstructionError("curves need degree >= 1");
    for (int k = 0; k <= samples; ++k) {
        double s = basis.a() + basis.length() * k / samples;
        Vec2 d1 = Vec2::Zero();
        for (auto [i, v] : eval_basis(basis, s, 1)) d1 += v * ctrl[i];
        if (!(d1.norm() > 0.0)) throw GeometryError("curve parametrization is not regular (J = 0)");
    }
    return c;
}

inline Vec2 curve_eval(const BoundaryCurve& c, double s, int deriv = 0) {
    LocalValues lv = local_values(c.basis, s, deriv);
    Vec2 p = Vec2::Zero();
    const int d = c.basis.degree;
    for (int k = 0; k <= d; ++k) p += lv.d[deriv][k] * c.ctrl[c.basis.logical(lv.span - d + k)];
    return p;
}

// Point, first and second derivative in one basis evaluation.
struct CurveJet {
    Vec2 f, f1, f2;
};

inline CurveJet curve_jet(const BoundaryCurve& c, double s) {
    LocalValues lv = local_values(c.basis, s, 2);
    CurveJet j{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    const int d = c.basis.degree;
    for (int k = 0; k <= d; ++k) {
        const Vec2& q = c.ctrl[c.basis.logical(lv.span - d + k)];
        j.f += lv.d[0][k] * q;
        j.f1 += lv.d[1][k] * q;
        j.f2 += lv.d[2][k] * q;
    }
    return j;
}

inline double parametric_speed(const BoundaryCurve& c, double s) { return curve_eval(c, s, 1).norm(); }

// Twice the signed area enclosed (closed curves); > 0 for counterclockwise.
inline double signed_area(const BoundaryCurve& c, int per_element = 16) {
    const GaussRule g = gauss_legendre(per_element);
    double A = 0.0;
    for (int e = 0; e < c.basis.num_elements(); ++e) {
        Interval el = c.basis.element(e);
        double h = 0.5 * el.length(), m = 0.5 * (el.lo + el.hi);
        for (int q = 0; q < g.size(); ++q) {
            double s = m + h * g.x[q];
            Vec2 f = curve_eval(c, s), d = curve_eval(c, s, 1);
            A += h * g.w[q] * 0.5 * (f.x() * d.y() - f.y() * d.x());
        }
    }
    return A;
}

// Kernel split ln|f(s) - f(t)| = K1(s,t) + K2(s,t).
//
// K2 carries the parametric log singularity: ln|s - t| on open curves and the
// periodic ln|(L/pi) sin(pi (s - t)/L)| on closed ones, where f(a) = f(b)
// makes the seam corners of I x I singular too and K1 must stay periodic.
struct KernelSplit {
    const BoundaryCurve* curve = nullptr;
    double eps_diag = 0.0;
    double period = 0.0;          // L on closed curves, 0 otherwise
    std::vector<double> shifts;   // parameter offsets at which f(s) = f(t)

    explicit KernelSplit(const BoundaryCurve& c) : curve(&c), eps_diag(1e-7 * c.length()) {
        shifts = {0.0};
        if (c.closed()) {
            period = c.length();
            shifts.push_back(c.length());
            shifts.push_back(-c.length());
        }
    }

    // Index of the image that (s,t) is numerically coincident with, or -1.
    int near_image(double s, double t) const {
        for (std::size_t k = 0; k < shifts.size(); ++k)
            if (std::abs(s - t + shifts[k]) <= eps_diag) return static_cast<int>(k);
        return -1;
    }

    // Parametric distance function whose log is K2.
    double pdist(double x) const {
        if (period == 0.0) return std::abs(x);
        return std::abs(period / std::numbers::pi * std::sin(std::numbers::pi * x / period));
    }

    // R(s,t) = |f(s) - f(t)|^2 / pdist(s - t)^2, by continuity J^2 on the diagonal.
    double R(double s, double t) const {
        const int near = near_image(s, t);
        double val;
        if (near >= 0) {
            double mid = std::clamp(0.5 * (s + t - shifts[near]), curve->a(), curve->b());
            double J = parametric_speed(*curve, mid);
            val = J * J;
        } else {
            Vec2 df = curve_eval(*curve, s) - curve_eval(*curve, t);
            double p = pdist(s - t);
            val = df.squaredNorm() / (p * p);
        }
        if (!(val > 0.0) || !std::isfinite(val))
            throw GeometryError("degenerate kernel R(s,t) <= 0: curve is singular or self-intersecting");
        return val;
    }

    double K1(double s, double t) const { return 0.5 * std::log(R(s, t)); }

    double K2(double s, double t) const { return std::log(pdist(s - t)); }

    double K(double s, double t) const {
        return std::log((curve_eval(*curve, s) - curve_eval(*curve, t)).norm());
    }

    // d/dn_left(t) ln|f(s)-f(t)| times J(t), left normal (-f2', f1')/J.
    double Kbar(double s, double t) const {
        const int near = near_image(s, t);
        if (near >= 0) {
            CurveJet j = curve_jet(*curve, s);
            double J2 = j.f1.squaredNorm();
            return 0.5 * (j.f1.y() * j.f2.x() - j.f1.x() * j.f2.y()) / J2;
        }
        Vec2 fs = curve_eval(*curve, s);
        Vec2 ft = curve_eval(*curve, t), dt = curve_eval(*curve, t, 1);
        Vec2 df = fs - ft;
        double r2 = df.squaredNorm();
        if (!(r2 > 0.0)) throw GeometryError("coincident curve points in Kbar");
        return ((ft.y() - fs.y()) * dt.x() - (ft.x() - fs.x()) * dt.y()) / r2;
    }
};

}  // namespace igabem
