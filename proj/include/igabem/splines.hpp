#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "gauss_legendre.hpp"

namespace igabem {

inline constexpr int kMaxDegree = 12;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// Open (clamped) or cyclic B-spline basis.
//
// Open: `knots` is the usual clamped extended knot vector.
// Closed: `knots` is the periodic extension of the knots in [a, b); raw
// function k and raw function k + dim() coincide on I up to a shift, so the
// first `degree` logical functions are the sum of two raw pieces.
struct BasisSpec {
    int degree = 0;
    std::vector<double> knots;
    bool closed = false;
    std::vector<double> breaks;
    std::vector<int> mult;

    double a() const { return breaks.front(); }
    double b() const { return breaks.back(); }
    double length() const { return b() - a(); }
    int num_raw() const { return static_cast<int>(knots.size()) - degree - 1; }
    int dim() const { return closed ? num_raw() - degree : num_raw(); }
    int num_elements() const { return static_cast<int>(breaks.size()) - 1; }
    int logical(int raw) const { return (closed && raw >= dim()) ? raw - dim() : raw; }
    Interval element(int e) const { return {breaks[e], breaks[e + 1]}; }

    // Index e of the element [x_e, x_{e+1}) containing s; s = b maps to the last one.
    int element_of(double s) const {
        if (s < a() || s > b()) throw DomainError("parameter outside the basis interval");
        if (s >= b()) return num_elements() - 1;
        auto it = std::upper_bound(breaks.begin(), breaks.end(), s);
        return static_cast<int>(it - breaks.begin()) - 1;
    }

    // Raw knot span mu with knots[mu] <= s < knots[mu+1]; s = b maps to the last non-empty span.
    int find_span(double s) const {
        if (s < a() || s > b()) throw DomainError("parameter " + std::to_string(s) + " outside [" +
                                                  std::to_string(a()) + ", " + std::to_string(b()) + "]");
        const int lo = degree, hi = num_raw();  // valid spans: [lo, hi-1]
        if (s >= b()) {
            int mu = hi - 1;
            while (mu > lo && knots[mu] >= knots[mu + 1]) --mu;
            return mu;
        }
        auto first = knots.begin() + lo, last = knots.begin() + hi + 1;
        auto it = std::upper_bound(first, last, s);
        return static_cast<int>(it - knots.begin()) - 1;
    }

    bool operator==(const BasisSpec& o) const {
        return degree == o.degree && knots == o.knots && closed == o.closed && breaks == o.breaks &&
               mult == o.mult;
    }
};

namespace detail {

inline void check_breaks(int degree, const std::vector<double>& breaks) {
    if (degree < 0 || degree > kMaxDegree) throw ConstructionError("unsupported degree");
    if (breaks.size() < 2) throw ConstructionError("at least two breakpoints are required");
    for (std::size_t k = 1; k < breaks.size(); ++k)
        if (!(breaks[k] > breaks[k - 1])) throw ConstructionError("breakpoints must be strictly increasing");
}

}  // namespace detail

// Clamped open basis. `mults` covers all breakpoints (ends must be degree+1);
// empty means clamped ends and simple inner knots.
inline BasisSpec make_open_basis(int degree, const std::vector<double>& breaks, std::vector<int> mults = {}) {
    detail::check_breaks(degree, breaks);
    const std::size_t nb = breaks.size();
    if (mults.empty()) {
        mults.assign(nb, 1);
        mults.front() = mults.back() = degree + 1;
    }
    if (mults.size() != nb) throw ConstructionError("multiplicity list does not match breakpoints");
    if (mults.front() != degree + 1 || mults.back() != degree + 1)
        throw ConstructionError("open bases must be clamped (end multiplicity degree+1)");
    for (std::size_t k = 1; k + 1 < nb; ++k)
        if (mults[k] < 1 || mults[k] > std::max(degree, 1))
            throw ConstructionError("inner multiplicity must lie in [1, degree]");
    BasisSpec B;
    B.degree = degree;
    B.closed = false;
    B.breaks = breaks;
    B.mult = mults;
    for (std::size_t k = 0; k < nb; ++k) B.knots.insert(B.knots.end(), mults[k], breaks[k]);
    return B;
}

// Cyclic basis on [breaks.front(), breaks.back()] with b identified with a.
// `mults` (optional) covers all breakpoints; first and last refer to the seam
// and must agree.
inline BasisSpec make_cyclic_basis(int degree, const std::vector<double>& breaks, std::vector<int> mults = {}) {
    detail::check_breaks(degree, breaks);
    const std::size_t nb = breaks.size();
    if (mults.empty()) mults.assign(nb, 1);
    if (mults.size() != nb) throw ConstructionError("multiplicity list does not match breakpoints");
    if (mults.front() != mults.back()) throw ConstructionError("seam multiplicities must agree");
    for (int m : mults)
        if (m < 1 || m > degree) throw ConstructionError("cyclic multiplicity must lie in [1, degree]");
    std::vector<double> u;
    for (std::size_t k = 0; k + 1 < nb; ++k) u.insert(u.end(), mults[k], breaks[k]);
    const int M = static_cast<int>(u.size());
    if (M < degree + 1) throw ConstructionError("cyclic basis needs at least degree+1 knots per period");
    const double L = breaks.back() - breaks.front();
    auto ext = [&](int k) {
        int q = (k >= 0) ? k / M : -((-k + M - 1) / M);
        int r = k - q * M;
        return u[r] + q * L;
    };
    BasisSpec B;
    B.degree = degree;
    B.closed = true;
    B.breaks = breaks;
    B.mult = mults;
    B.knots.resize(M + 2 * degree + 1);
    for (int j = 0; j <= M + 2 * degree; ++j) B.knots[j] = ext(j - degree);
    B.knots[degree] = breaks.front();
    B.knots[M + degree] = breaks.back();
    return B;
}

// Values and derivatives of the d+1 raw functions span-d..span at s.
struct LocalValues {
    int span = 0;
    int degree = 0;
    std::array<std::array<double, kMaxDegree + 1>, 3> d{};
};

// Cox-de Boor with derivatives (NURBS Book A2.3), up to order `nder` <= 2.
inline LocalValues local_values(const BasisSpec& B, double s, int nder) {
    if (nder < 0 || nder > 2) throw UsageError("derivative order must be 0, 1 or 2");
    const int p = B.degree;
    const int mu = B.find_span(s);
    const auto& U = B.knots;
    LocalValues out;
    out.span = mu;
    out.degree = p;
    double ndu[kMaxDegree + 1][kMaxDegree + 1];
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = s - U[mu + 1 - j];
        right[j] = U[mu + j] - s;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for (int j = 0; j <= p; ++j) out.d[0][j] = ndu[j][p];
    if (nder == 0) return out;
    double a[2][kMaxDegree + 1];
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= nder; ++k) {
            double dv = 0.0;
            int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                dv = a[s2][0] * ndu[rk][pk];
            }
            int j1 = (rk >= -1) ? 1 : -rk;
            int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                dv += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                dv += a[s2][k] * ndu[r][pk];
            }
            out.d[k][r] = dv;
            std::swap(s1, s2);
        }
    }
    double f = p;
    for (int k = 1; k <= nder; ++k) {
        for (int j = 0; j <= p; ++j) out.d[k][j] *= f;
        f *= (p - k);
    }
    return out;
}

using SparseValues = std::vector<std::pair<int, double>>;

// Nonzero (logical index, value) pairs of the deriv-th derivative at s.
inline SparseValues eval_basis(const BasisSpec& B, double s, int deriv = 0) {
    LocalValues lv = local_values(B, s, deriv);
    SparseValues out;
    out.reserve(B.degree + 1);
    for (int k = 0; k <= B.degree; ++k) {
        int idx = B.logical(lv.span - B.degree + k);
        double v = lv.d[deriv][k];
        auto it = std::find_if(out.begin(), out.end(), [&](auto& pr) { return pr.first == idx; });
        if (it == out.end())
            out.emplace_back(idx, v);
        else
            it->second += v;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Single logical function value (or derivative) at s.
inline double eval_function(const BasisSpec& B, int i, double s, int deriv = 0) {
    LocalValues lv = local_values(B, s, deriv);
    double v = 0.0;
    for (int k = 0; k <= B.degree; ++k)
        if (B.logical(lv.span - B.degree + k) == i) v += lv.d[deriv][k];
    return v;
}

// Support of logical function i, intersected with I (two arcs for cyclic wraps).
inline std::vector<Interval> support(const BasisSpec& B, int i) {
    if (i < 0 || i >= B.dim()) throw DomainError("basis index out of range");
    std::vector<Interval> out;
    auto add_raw = [&](int r) {
        double lo = std::max(B.knots[r], B.a());
        double hi = std::min(B.knots[r + B.degree + 1], B.b());
        if (hi > lo) out.push_back({lo, hi});
    };
    add_raw(i);
    if (B.closed && i < B.degree) add_raw(i + B.dim());
    std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.lo < y.lo; });
    return out;
}

// Logical functions whose support overlaps the interval on a set of positive length.
inline std::vector<int> active_functions(const BasisSpec& B, const Interval& iv) {
    std::vector<int> out;
    for (int j = 0; j < B.dim(); ++j)
        for (const auto& sj : support(B, j))
            if (std::min(sj.hi, iv.hi) > std::max(sj.lo, iv.lo)) {
                out.push_back(j);
                break;
            }
    return out;
}

// Logical functions whose support overlaps that of parent function i.
inline std::vector<int> overlapping_functions(const BasisSpec& fine, const BasisSpec& parent, int i) {
    std::vector<int> out;
    for (const auto& iv : support(parent, i))
        for (int j : active_functions(fine, iv)) out.push_back(j);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct RefinedBasis {
    BasisSpec parent;
    int nref = 1;
    BasisSpec fine;
    int num_fine() const { return fine.dim(); }
};

// Uniform subdivision of every element into nref pieces; old breakpoints keep
// their multiplicity, new ones are simple.
inline RefinedBasis refine_uniform(const BasisSpec& B, int nref) {
    if (nref < 1) throw UsageError("nref must be >= 1");
    RefinedBasis R;
    R.parent = B;
    R.nref = nref;
    if (nref == 1) {
        R.fine = B;
        return R;
    }
    std::vector<double> br;
    std::vector<int> mu;
    for (int e = 0; e < B.num_elements(); ++e) {
        br.push_back(B.breaks[e]);
        mu.push_back(B.mult[e]);
        const double lo = B.breaks[e], hi = B.breaks[e + 1];
        for (int k = 1; k < nref; ++k) {
            br.push_back(lo + (hi - lo) * k / nref);
            mu.push_back(1);
        }
    }
    br.push_back(B.breaks.back());
    mu.push_back(B.mult.back());
    R.fine = B.closed ? make_cyclic_basis(B.degree, br, mu) : make_open_basis(B.degree, br, mu);
    return R;
}

// Element intervals of `B` lying inside an interval set (used for exact piecewise integration).
inline std::vector<Interval> elements_within(const BasisSpec& B, const std::vector<Interval>& ivs) {
    std::vector<Interval> out;
    for (int e = 0; e < B.num_elements(); ++e) {
        Interval el = B.element(e);
        for (const auto& iv : ivs) {
            double lo = std::max(el.lo, iv.lo), hi = std::min(el.hi, iv.hi);
            if (hi > lo) out.push_back({lo, hi});
        }
    }
    return out;
}

// Exact integral of fine function j times parent function i over I. The
// fine partition refines the parent's, so the integrand is a polynomial of
// degree <= dj + di on every fine element.
inline double product_integral(const BasisSpec& fine, int j, const BasisSpec& parent, int i) {
    const int order = (fine.degree + parent.degree) / 2 + 2;
    const GaussRule g = gauss_legendre(order);
    double total = 0.0;
    auto si = support(parent, i);
    auto sj = support(fine, j);
    std::vector<Interval> both;
    for (auto& x : si)
        for (auto& y : sj) {
            double lo = std::max(x.lo, y.lo), hi = std::min(x.hi, y.hi);
            if (hi > lo) both.push_back({lo, hi});
        }
    for (const auto& el : elements_within(fine, both)) {
        const double c = 0.5 * el.length(), m = 0.5 * (el.lo + el.hi);
        for (int q = 0; q < g.size(); ++q) {
            double s = m + c * g.x[q];
            total += c * g.w[q] * eval_function(fine, j, s) * eval_function(parent, i, s);
        }
    }
    return total;
}

// Value of the spline sum_j c_j B_j (or derivative) at s.
template <class Coeffs>
inline double spline_value(const BasisSpec& B, const Coeffs& c, double s, int deriv = 0) {
    LocalValues lv = local_values(B, s, deriv);
    double v = 0.0;
    for (int k = 0; k <= B.degree; ++k) v += c[B.logical(lv.span - B.degree + k)] * lv.d[deriv][k];
    return v;
}

}  // namespace igabem
