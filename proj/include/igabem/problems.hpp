#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "error.hpp"
#include "geometry.hpp"

namespace igabem {

enum class BieKind { IndirectExterior, DirectInterior };

inline std::string to_string(BieKind k) { return k == BieKind::IndirectExterior ? "indirect" : "direct"; }

// Model problem: curve, Dirichlet datum and the known boundary unknown, all
// as functions of the curve parameter.
struct Problem {
    std::string name;
    BoundaryCurve curve;
    BieKind kind = BieKind::IndirectExterior;
    std::function<double(double)> u_D;      // Dirichlet datum u_D(f(t))
    std::function<double(double)> exact;    // density phi(f(t)) or flux q(f(t))
    std::function<double(const Vec2&)> u_exact;  // interior/exterior solution where known
    int geometry_mult = 1;  // multiplicity of geometry breakpoints in the discretization
};

// Single-layer potential  u(s) = -1/(2 pi) int_I ln|f(s) - f(t)| phi(t) J(t) dt
// by tanh-sinh on pieces split at s and at the curve's breakpoints. Near t = s
// the kernel is evaluated through the split K1 + ln|s - t| with the exact
// distance supplied by the quadrature.
inline double single_layer_potential(const BoundaryCurve& c, const std::function<double(double)>& phi, double s,
                                     double tol = 1e-14) {
    KernelSplit ks(c);
    std::vector<double> cuts(c.basis.breaks.begin(), c.basis.breaks.end());
    cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    boost::math::quadrature::tanh_sinh<double> ts(15);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        if (!(hi > lo)) continue;
        const double mid = 0.5 * (lo + hi);
        auto f = [&](double t, double tc) {
            // distance to the nearer end, exact near the endpoints
            double dist_s;
            if (lo == s && t < mid)
                dist_s = std::abs(tc);
            else if (hi == s && t >= mid)
                dist_s = std::abs(tc);
            else
                dist_s = std::abs(t - s);
            if (dist_s == 0.0) return 0.0;
            return (ks.K1(s, t) + std::log(ks.pdist(dist_s))) * phi(t) * parametric_speed(c, t);
        };
        total += ts.integrate(f, lo, hi, tol);
    }
    return -total / (2.0 * std::numbers::pi);
}

inline BoundaryCurve parabola_curve() {
    BasisSpec b = make_open_basis(2, {-1.0, 1.0});
    return make_curve(b, {Vec2(-1.0, 0.0), Vec2(0.0, 2.0), Vec2(1.0, 0.0)});
}

// Cyclic cubic with `n` control points on a circle, scaled so that the curve
// passes through radius `rho` at the knots.
inline BoundaryCurve circle_curve(double rho, int n, double a = -1.0, double b = 1.0) {
    std::vector<double> br(n + 1);
    for (int k = 0; k <= n; ++k) br[k] = a + (b - a) * k / n;
    BasisSpec B = make_cyclic_basis(3, br);
    const double r = 3.0 * rho / (2.0 + std::cos(2.0 * std::numbers::pi / n));
    std::vector<Vec2> q;
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * std::numbers::pi * k / n;
        q.emplace_back(r * std::cos(th), r * std::sin(th));
    }
    return make_curve(B, q);
}

// Smooth closed test curve: cyclic cubic, 12 elements on [-1, 1], control
// points on a star-shaped, counterclockwise polar profile.
inline BoundaryCurve closed_smooth_curve() {
    const int n = 12;
    std::vector<double> br(n + 1);
    for (int k = 0; k <= n; ++k) br[k] = -1.0 + 2.0 * k / n;
    BasisSpec B = make_cyclic_basis(3, br);
    std::vector<Vec2> q;
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * std::numbers::pi * k / n;
        double r = 0.5 + 0.12 * std::cos(2.0 * th) + 0.06 * std::sin(3.0 * th);
        q.emplace_back(r * std::cos(th), r * std::sin(th));
    }
    return make_curve(B, q);
}

// Exterior problem on an open curve whose single-layer density is
// phi(x) = sqrt(1 + 4 x1^2); u_D is manufactured from it.
inline Problem indirect_problem(const std::string& name, const BoundaryCurve& c) {
    Problem p;
    p.name = name;
    p.curve = c;
    p.kind = BieKind::IndirectExterior;
    auto phi = [c](double t) {
        double x1 = curve_eval(c, t).x();
        return std::sqrt(1.0 + 4.0 * x1 * x1);
    };
    p.exact = phi;
    p.u_D = [c, phi](double s) { return single_layer_potential(c, phi, s); };
    return p;
}

// Interior problem with u = -(x1 + x2): q = grad u . n_out.
inline Problem direct_problem(const std::string& name, const BoundaryCurve& c, int geometry_mult) {
    Problem p;
    p.name = name;
    p.curve = c;
    p.kind = BieKind::DirectInterior;
    p.geometry_mult = geometry_mult;
    p.u_D = [c](double t) {
        Vec2 x = curve_eval(c, t);
        return -(x.x() + x.y());
    };
    const double o = signed_area(c) > 0.0 ? -1.0 : 1.0;
    p.exact = [c, o](double t) {
        Vec2 d = curve_eval(c, t, 1);
        // n_out J = o (-f2', f1')
        return -o * (-d.y() + d.x()) / d.norm();
    };
    p.u_exact = [](const Vec2& x) { return -(x.x() + x.y()); };
    return p;
}

// Registry: "parabola" (indirect, open) and "closed-smooth" (direct, closed).
inline Problem define_problem(const std::string& name) {
    if (name == "parabola") return indirect_problem(name, parabola_curve());
    if (name == "closed-smooth") return direct_problem(name, closed_smooth_curve(), 2);
    throw ConfigError("unknown problem '" + name + "' (expected parabola or closed-smooth)");
}

}  // namespace igabem
