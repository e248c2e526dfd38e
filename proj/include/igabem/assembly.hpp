#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"
#include "splines.hpp"

namespace igabem {

namespace detail {
inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace detail

// Uniform discretization basis of the given degree with nh elements on the
// curve's interval. Geometry breakpoints that fall on the mesh get
// multiplicity `geometry_mult` (1 keeps maximal smoothness).
inline BasisSpec discretization_basis(const BoundaryCurve& curve, int degree, int nh, int geometry_mult = 1) {
    if (nh < 1) throw UsageError("number of elements must be >= 1");
    std::vector<double> br(nh + 1);
    for (int k = 0; k <= nh; ++k) br[k] = curve.a() + curve.length() * k / nh;
    br.back() = curve.b();
    std::vector<int> mu(nh + 1, 1);
    if (geometry_mult > 1) {
        const double tol = 1e-12 * curve.length();
        for (int k = 0; k <= nh; ++k)
            for (double g : curve.basis.breaks)
                if (std::abs(g - br[k]) <= tol) mu[k] = geometry_mult;
    }
    if (curve.closed()) return make_cyclic_basis(degree, br, mu);
    mu.front() = mu.back() = degree + 1;
    return make_open_basis(degree, br, mu);
}

// Everything the weighted-quadrature assembly needs, built once per mesh.
struct Discretization {
    BoundaryCurve curve;
    RefinedBasis ref;
    NodeVector nodes;
    Eigen::MatrixXd colloc;           // fine functions at nodes
    std::vector<WeightedRule> reg;    // one per discretization function
    SingularRules sing;               // one per node
    std::vector<double> J;            // parametric speed at nodes
    std::vector<std::vector<double>> wj;  // reg[i].w times J at its nodes
    std::vector<std::vector<double>> bval; // B_i at reg[i].nodes
    double seconds = 0.0;

    const BasisSpec& basis() const { return ref.parent; }
    int dof() const { return ref.parent.dim(); }
    int num_nodes() const { return nodes.size(); }
};

inline LogKernel log_kernel(const BoundaryCurve& c) { return LogKernel{c.closed() ? c.length() : 0.0}; }

inline Discretization build_discretization(const BoundaryCurve& curve, const BasisSpec& basis, int nref) {
    if (basis.closed != curve.closed() || std::abs(basis.a() - curve.a()) > 0 || std::abs(basis.b() - curve.b()) > 0)
        throw UsageError("discretization basis and curve live on different intervals");
    auto t0 = std::chrono::steady_clock::now();
    Discretization D{curve, refine_uniform(basis, nref), {}, {}, {}, {}, {}, {}, {}, 0.0};
    D.nodes = build_nodes(D.ref.fine);
    D.colloc = collocation_matrix(D.ref.fine, D.nodes);
    D.reg = build_regular_rules(D.ref, D.nodes, D.colloc);
    D.sing = build_singular_rules(D.ref.fine, D.nodes, D.nodes.eta, D.colloc, log_kernel(curve));
    D.J.resize(D.nodes.size());
    for (int n = 0; n < D.nodes.size(); ++n) D.J[n] = parametric_speed(curve, D.nodes.eta[n]);
    D.wj.resize(D.dof());
    D.bval.resize(D.dof());
    for (int i = 0; i < D.dof(); ++i) {
        const auto& r = D.reg[i];
        for (std::size_t k = 0; k < r.nodes.size(); ++k) {
            D.wj[i].push_back(r.w[k] * D.J[r.nodes[k]]);
            D.bval[i].push_back(eval_function(basis, i, D.nodes.eta[r.nodes[k]]));
        }
    }
    D.seconds = detail::seconds_since(t0);
    return D;
}

struct AssemblyCounters {
    long long kernel_evals = 0;       // regular-kernel evaluations (K1, or K on far pairs)
    long long integrand_evals = 0;    // kernel evaluations times local basis pairs
    long long bspline_evals = 0;      // B_j J products used by the singular part
    long long near_kernel_evals = 0;  // baseline: smooth-part evaluations on near pairs
    long long singular_rules = 0;     // baseline: local singular rules built
    long long far_pairs = 0;
    long long near_pairs = 0;
};

struct AssembledSystem {
    std::string strategy;
    Eigen::MatrixXd A;
    Eigen::MatrixXd IK1, IK2;  // weighted strategy only
    Eigen::VectorXd rhs;
    AssemblyCounters counters;
    double seconds_rules = 0.0;
    double seconds_matrix = 0.0;
    double seconds_rhs = 0.0;
    double symmetry_defect = 0.0;  // max|A - A^T| / max|A| as assembled
    bool symmetrized = false;
};

// I_K1(i,j) = sum_{n1} w^i_{n1} J_{n1} sum_{n2} w^j_{n2} J_{n2} K1(eta_{n1}, eta_{n2}),
// row by row: C0 = K1 on all node pairs (evaluated once), C1 = contraction
// of C0 with row i's weights, then one short contraction per column.
inline Eigen::MatrixXd assemble_IK1(const Discretization& D, AssemblyCounters* cnt = nullptr) {
    const int nq = D.num_nodes(), N = D.dof();
    const auto& eta = D.nodes.eta;
    KernelSplit ks(D.curve);
    Eigen::MatrixXd C0(nq, nq);
    for (int n2 = 0; n2 < nq; ++n2)
        for (int n1 = 0; n1 < nq; ++n1) C0(n1, n2) = ks.K1(eta[n1], eta[n2]);
    if (cnt) cnt->kernel_evals += static_cast<long long>(nq) * nq;
    Eigen::MatrixXd IK1(N, N);
    Eigen::RowVectorXd C1(nq);
    for (int i = 0; i < N; ++i) {
        C1.setZero();
        const auto& ri = D.reg[i];
        for (std::size_t k = 0; k < ri.nodes.size(); ++k) C1 += D.wj[i][k] * C0.row(ri.nodes[k]);
        for (int j = 0; j < N; ++j) {
            const auto& rj = D.reg[j];
            double v = 0.0;
            for (std::size_t k = 0; k < rj.nodes.size(); ++k) v += D.wj[j][k] * C1[rj.nodes[k]];
            IK1(i, j) = v;
        }
    }
    return IK1;
}

// I_K2(i,j) = sum_{n1} w^i_{n1} J_{n1} sum_{n2 in N(j)} w^{eta_{n1}}_{n2} J_{n2} B_j(eta_{n2});
// the singular rule is used for every column.
inline Eigen::MatrixXd assemble_IK2(const Discretization& D, AssemblyCounters* cnt = nullptr) {
    const int nq = D.num_nodes(), N = D.dof();
    const Eigen::MatrixXd& WS = D.sing.W;
    // X(n1, j) = Q^{eta_{n1}}[J B_j]
    Eigen::MatrixXd X(nq, N);
    long long used = 0;
    for (int j = 0; j < N; ++j) {
        const auto& rj = D.reg[j];
        Eigen::VectorXd col = Eigen::VectorXd::Zero(nq);
        for (std::size_t k = 0; k < rj.nodes.size(); ++k) {
            const int n2 = rj.nodes[k];
            const double jb = D.J[n2] * D.bval[j][k];
            if (jb == 0.0) continue;
            col += jb * WS.col(n2);
            ++used;
        }
        X.col(j) = col;
    }
    if (cnt) cnt->bspline_evals += used;
    Eigen::MatrixXd IK2(N, N);
    for (int i = 0; i < N; ++i) {
        const auto& ri = D.reg[i];
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(N);
        for (std::size_t k = 0; k < ri.nodes.size(); ++k) row += D.wj[i][k] * X.row(ri.nodes[k]);
        IK2.row(i) = row;
    }
    return IK2;
}

// A = -(I_K1 + I_K2) / (2 pi); symmetrized by averaging on request.
inline Eigen::MatrixXd scale_and_symmetrize(const Eigen::MatrixXd& IK1, const Eigen::MatrixXd& IK2,
                                            bool symmetrize, double* defect = nullptr) {
    if (IK1.rows() != IK2.rows() || IK1.cols() != IK2.cols()) throw UsageError("matrix size mismatch");
    Eigen::MatrixXd A = -(IK1 + IK2) / (2.0 * std::numbers::pi);
    if (defect) {
        const double amax = A.cwiseAbs().maxCoeff();
        *defect = amax > 0.0 ? (A - A.transpose()).cwiseAbs().maxCoeff() / amax : 0.0;
    }
    if (symmetrize) A = 0.5 * (A + A.transpose()).eval();
    return A;
}

// b1_i = sum_n w^i_n J_n u_D(eta_n); u values given at every node.
inline Eigen::VectorXd assemble_b1(const Discretization& D, const std::vector<double>& u_nodes) {
    if (static_cast<int>(u_nodes.size()) != D.num_nodes()) throw UsageError("b1: one datum per node expected");
    Eigen::VectorXd b(D.dof());
    for (int i = 0; i < D.dof(); ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < D.reg[i].nodes.size(); ++k) v += D.wj[i][k] * u_nodes[D.reg[i].nodes[k]];
        b[i] = v;
    }
    return b;
}

// Orientation factor turning the left normal of the parametrization into the
// outward normal of the enclosed domain.
inline double outward_sign(const BoundaryCurve& c) { return signed_area(c) > 0.0 ? -1.0 : 1.0; }

inline void require_c2(const BoundaryCurve& c) {
    if (c.basis.degree < 2 || c.smoothness() < 2)
        throw GeometryError("double-layer term needs a C2 curve (degree >= 2, inner multiplicity <= degree-2)");
}

// Inner double-layer integral g(s) = int_I d/dn_out ln|f(s)-f(t)| u(t) J(t) dt,
// Gauss of the given order on every fine element.
inline double double_layer_inner(const KernelSplit& ks, const BasisSpec& fine, const GaussRule& g, double nsign,
                                 const std::function<double(double)>& u, double s) {
    double v = 0.0;
    for (int e = 0; e < fine.num_elements(); ++e) {
        Interval el = fine.element(e);
        const double h = 0.5 * el.length(), m = 0.5 * (el.lo + el.hi);
        for (int q = 0; q < g.size(); ++q) {
            double t = m + h * g.x[q];
            v += h * g.w[q] * ks.Kbar(s, t) * u(t);
        }
    }
    return nsign * v;
}

// b2_i = sum_n w^i_n J_n g(eta_n) with g from double_layer_inner.
inline Eigen::VectorXd assemble_b2(const Discretization& D, int gauss_order, const std::function<double(double)>& u) {
    require_c2(D.curve);
    KernelSplit ks(D.curve);
    const GaussRule g = gauss_legendre(gauss_order, -1.0, 1.0);
    const double nsign = outward_sign(D.curve);
    std::vector<double> inner(D.num_nodes());
    for (int n = 0; n < D.num_nodes(); ++n)
        inner[n] = double_layer_inner(ks, D.ref.fine, g, nsign, u, D.nodes.eta[n]);
    return assemble_b1(D, inner);
}

// Weighted-quadrature assembly of the single-layer matrix.
inline AssembledSystem assemble_weighted(const Discretization& D, bool symmetrize = false) {
    AssembledSystem S;
    S.strategy = "weighted";
    S.seconds_rules = D.seconds;
    auto t0 = std::chrono::steady_clock::now();
    S.IK1 = assemble_IK1(D, &S.counters);
    S.IK2 = assemble_IK2(D, &S.counters);
    S.A = scale_and_symmetrize(S.IK1, S.IK2, symmetrize, &S.symmetry_defect);
    S.seconds_matrix = detail::seconds_since(t0);
    S.symmetrized = symmetrize;
    return S;
}

// ---------------------------------------------------------------------------
// Element-by-element baseline.

struct BaselineOptions {
    int ng = 32;            // Gauss points per direction
    int local_degree_extra = 2;  // local singular rule: degree d + extra
    int local_subdiv = 4;        // and this many sub-elements per element
};

namespace detail {

struct ElementData {
    int first = 0;                   // logical index of local function 0 is logical(first + k)
    std::vector<int> idx;            // logical indices of the d+1 local functions
    std::vector<double> s, wj;       // Gauss points and weight * J
    std::vector<Vec2> f;
    Eigen::MatrixXd B;               // (d+1) x ng basis values
};

inline ElementData element_data(const BoundaryCurve& c, const BasisSpec& B, int e, const GaussRule& g) {
    ElementData E;
    Interval el = B.element(e);
    const int d = B.degree;
    LocalValues mid = local_values(B, 0.5 * (el.lo + el.hi), 0);
    for (int k = 0; k <= d; ++k) E.idx.push_back(B.logical(mid.span - d + k));
    const int ng = g.size();
    E.B.resize(d + 1, ng);
    const double h = 0.5 * el.length(), m = 0.5 * (el.lo + el.hi);
    for (int q = 0; q < ng; ++q) {
        double s = m + h * g.x[q];
        E.s.push_back(s);
        E.f.push_back(curve_eval(c, s));
        E.wj.push_back(h * g.w[q] * parametric_speed(c, s));
        LocalValues lv = local_values(B, s, 0);
        for (int k = 0; k <= d; ++k) E.B(k, q) = lv.d[0][k];
    }
    return E;
}

inline bool near_pair(int e1, int e2, int E, bool closed) {
    int gap = std::abs(e1 - e2);
    if (closed) gap = std::min(gap, E - gap);
    return gap <= 1;
}

}  // namespace detail

// Classical double loop over element pairs. Far pairs: N_G x N_G tensor Gauss
// on ln|f(s)-f(t)|. Near pairs: tensor Gauss on K1 plus, for K2, an
// outer Gauss rule composed with a log-singular weighted rule on the inner
// element (built from modified moments of a local spline space).
inline AssembledSystem assemble_baseline(const BoundaryCurve& curve, const BasisSpec& B,
                                         const BaselineOptions& opt = {}) {
    if (opt.ng < 1) throw UsageError("N_G must be >= 1");
    AssembledSystem S;
    S.strategy = "element";
    auto t0 = std::chrono::steady_clock::now();
    const int E = B.num_elements(), d = B.degree, N = B.dim();
    const GaussRule g = gauss_legendre(opt.ng);
    KernelSplit ks(curve);
    const LogKernel lk = log_kernel(curve);
    std::vector<detail::ElementData> el;
    for (int e = 0; e < E; ++e) el.push_back(detail::element_data(curve, B, e, g));

    // local singular rules, one factorization per element
    struct LocalSingular {
        BasisSpec basis;
        NodeVector nodes;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
        Eigen::MatrixXd JB;  // (d+1) x n_local: J(x_n) B_k(x_n)
    };
    std::vector<LocalSingular> loc(E);
    const int pl = std::min(kMaxDegree, d + opt.local_degree_extra);
    for (int e = 0; e < E; ++e) {
        Interval iv = B.element(e);
        std::vector<double> br(opt.local_subdiv + 1);
        for (int k = 0; k <= opt.local_subdiv; ++k) br[k] = iv.lo + iv.length() * k / opt.local_subdiv;
        br.back() = iv.hi;
        loc[e].basis = make_open_basis(pl, br);
        loc[e].nodes = build_nodes(loc[e].basis);
        loc[e].cod.compute(collocation_matrix(loc[e].basis, loc[e].nodes));
        if (loc[e].cod.rank() < loc[e].basis.dim()) throw ConstructionError("local singular rule is rank deficient");
        const int nl = loc[e].nodes.size();
        loc[e].JB.resize(d + 1, nl);
        const int span_first = local_values(B, 0.5 * (iv.lo + iv.hi), 0).span;
        for (int n = 0; n < nl; ++n) {
            double x = loc[e].nodes.eta[n];
            // evaluate inside the element even at its right end
            LocalValues lv = local_values(B, std::min(x, std::nextafter(iv.hi, iv.lo)), 0);
            double J = parametric_speed(curve, x);
            for (int k = 0; k <= d; ++k) loc[e].JB(k, n) = (lv.span == span_first) ? J * lv.d[0][k] : 0.0;
        }
    }

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    Eigen::MatrixXd K(opt.ng, opt.ng);
    for (int e1 = 0; e1 < E; ++e1) {
        const auto& X = el[e1];
        Eigen::MatrixXd BW1 = X.B * Eigen::Map<const Eigen::VectorXd>(X.wj.data(), opt.ng).asDiagonal();
        for (int e2 = 0; e2 < E; ++e2) {
            const auto& Y = el[e2];
            Eigen::MatrixXd BW2 = Y.B * Eigen::Map<const Eigen::VectorXd>(Y.wj.data(), opt.ng).asDiagonal();
            Eigen::MatrixXd loc_mat;
            if (!detail::near_pair(e1, e2, E, curve.closed())) {
                for (int q2 = 0; q2 < opt.ng; ++q2)
                    for (int q1 = 0; q1 < opt.ng; ++q1) K(q1, q2) = std::log((X.f[q1] - Y.f[q2]).norm());
                S.counters.far_pairs += 1;
                S.counters.kernel_evals += static_cast<long long>(opt.ng) * opt.ng;
                S.counters.integrand_evals += static_cast<long long>(opt.ng) * opt.ng * (d + 1) * (d + 1);
                loc_mat = BW1 * K * BW2.transpose();
            } else {
                for (int q2 = 0; q2 < opt.ng; ++q2)
                    for (int q1 = 0; q1 < opt.ng; ++q1) K(q1, q2) = ks.K1(X.s[q1], Y.s[q2]);
                S.counters.near_pairs += 1;
                S.counters.near_kernel_evals += static_cast<long long>(opt.ng) * opt.ng;
                loc_mat = BW1 * K * BW2.transpose();
                // singular part: inner integral by the local log rule at each outer point
                const auto& L = loc[e2];
                Eigen::MatrixXd inner(d + 1, opt.ng);  // inner(b, q1)
                for (int q1 = 0; q1 < opt.ng; ++q1) {
                    Eigen::VectorXd mu = log_moments(L.basis, X.s[q1], lk);
                    Eigen::VectorXd w = L.cod.solve(mu);
                    inner.col(q1) = L.JB * w;
                    S.counters.singular_rules += 1;
                }
                loc_mat += BW1 * inner.transpose();
            }
            for (int a = 0; a <= d; ++a)
                for (int c = 0; c <= d; ++c) A(X.idx[a], Y.idx[c]) += loc_mat(a, c);
        }
    }
    S.A = -A / (2.0 * std::numbers::pi);
    const double amax = S.A.cwiseAbs().maxCoeff();
    S.symmetry_defect = amax > 0.0 ? (S.A - S.A.transpose()).cwiseAbs().maxCoeff() / amax : 0.0;
    S.seconds_matrix = detail::seconds_since(t0);
    return S;
}

// Baseline right-hand side: Gauss on every element, inner double-layer
// integral (if requested) by Gauss on every element as well.
inline Eigen::VectorXd assemble_rhs_gauss(const BoundaryCurve& curve, const BasisSpec& B, int ng,
                                          const std::function<double(double)>& u, double c1,
                                          double c2 = 0.0, int inner_order = 16) {
    const GaussRule g = gauss_legendre(ng);
    const GaussRule gi = gauss_legendre(inner_order);
    KernelSplit ks(curve);
    double nsign = 0.0;
    if (c2 != 0.0) {
        require_c2(curve);
        nsign = outward_sign(curve);
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(B.dim());
    for (int e = 0; e < B.num_elements(); ++e) {
        auto X = detail::element_data(curve, B, e, g);
        for (int q = 0; q < ng; ++q) {
            double v = c1 * u(X.s[q]);
            if (c2 != 0.0) v += c2 * double_layer_inner(ks, B, gi, nsign, u, X.s[q]);
            for (int k = 0; k <= B.degree; ++k) b[X.idx[k]] += X.wj[q] * X.B(k, q) * v;
        }
    }
    return b;
}

}  // namespace igabem
