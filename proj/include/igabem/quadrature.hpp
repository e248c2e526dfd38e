#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "moments.hpp"
#include "splines.hpp"

namespace igabem {

// Shared quadrature nodes eta (sorted) and the fine element holding each node.
struct NodeVector {
    std::vector<double> eta;
    std::vector<int> element;
    int size() const { return static_cast<int>(eta.size()); }
};

// Nodes for the refined basis. Open: first and last fine element get degree+2
// uniformly spaced points (endpoints included), inner elements their
// midpoint, inner breakpoints are taken once. Closed: every element is inner
// and the seam breakpoint a is taken once. Closed layouts never contain b.
inline NodeVector build_nodes(const BasisSpec& fine) {
    const int d = fine.degree;
    const int E = fine.num_elements();
    const auto& x = fine.breaks;
    std::vector<double> pts;
    if (fine.closed) {
        for (int e = 0; e < E; ++e) {
            pts.push_back(x[e]);
            pts.push_back(0.5 * (x[e] + x[e + 1]));
        }
    } else {
        auto uniform = [&](int e) {
            for (int k = 0; k <= d + 1; ++k) pts.push_back(x[e] + (x[e + 1] - x[e]) * k / (d + 1.0));
        };
        uniform(0);
        if (E > 1) uniform(E - 1);
        for (int e = 1; e + 1 < E; ++e) pts.push_back(0.5 * (x[e] + x[e + 1]));
        for (int k = 1; k < E; ++k) pts.push_back(x[k]);
    }
    // A breakpoint of multiplicity m > 1 adds m - 1 functions; it gets m - 1
    // extra points in each neighbouring element so local collocation keeps full rank.
    const int nb = static_cast<int>(x.size());
    for (int k = 0; k < nb; ++k) {
        const bool seam = (k == 0 || k == nb - 1);
        if (seam && !fine.closed) continue;
        const int m = fine.mult[k];
        for (int r = 1; r < m; ++r) {
            const double f = r / (2.0 * m);
            if (k + 1 < nb) pts.push_back(x[k] + f * (x[k + 1] - x[k]));
            if (k > 0) pts.push_back(x[k] - f * (x[k] - x[k - 1]));
            if (seam && k == 0) pts.push_back(x[nb - 1] - f * (x[nb - 1] - x[nb - 2]));
        }
    }
    std::sort(pts.begin(), pts.end());
    const double tol = 1e-12 * fine.length();
    NodeVector nv;
    for (double p : pts)
        if (nv.eta.empty() || p - nv.eta.back() > tol) nv.eta.push_back(p);
    if (nv.size() < fine.dim())
        throw ConstructionError("fewer quadrature nodes than exactness functions");
    for (double p : nv.eta) nv.element.push_back(fine.element_of(p));
    return nv;
}

// Dense collocation matrix C(j, n) = B_j(eta_n).
inline Eigen::MatrixXd collocation_matrix(const BasisSpec& B, const NodeVector& nodes) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(B.dim(), nodes.size());
    for (int n = 0; n < nodes.size(); ++n)
        for (auto [j, v] : eval_basis(B, nodes.eta[n])) C(j, n) = v;
    return C;
}

// Rule sum_n w_n g(eta_n) for one weight function; only `nodes` carry weight.
struct WeightedRule {
    int index = -1;
    std::vector<int> nodes;
    std::vector<double> w;
    std::vector<int> exact;  // fine functions the rule integrates exactly
    double residual = 0.0;   // max-abs exactness defect

    template <class F>
    double apply(const std::vector<double>& eta, F&& g) const {
        double v = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) v += w[k] * g(eta[nodes[k]]);
        return v;
    }
};

// Nodes carrying weight for parent function i: interior of its support plus
// the interval ends where the function does not vanish.
inline std::vector<int> active_nodes(const BasisSpec& parent, int i, const NodeVector& nodes) {
    const double tol = 1e-12 * parent.length();
    auto arcs = support(parent, i);
    std::vector<int> out;
    for (int n = 0; n < nodes.size(); ++n) {
        const double x = nodes.eta[n];
        bool in = false;
        for (const auto& iv : arcs)
            if (x > iv.lo + tol && x < iv.hi - tol) in = true;
        if (!in && (std::abs(x - parent.a()) <= tol || std::abs(x - parent.b()) <= tol))
            in = eval_function(parent, i, x) != 0.0;
        if (in) out.push_back(n);
    }
    return out;
}

// One regular rule per parent function B_i: exact on all fine functions
// overlapping supp B_i, with weight B_i; minimum-norm weights.
inline std::vector<WeightedRule> build_regular_rules(const RefinedBasis& R, const NodeVector& nodes,
                                                     const Eigen::MatrixXd& colloc) {
    const BasisSpec& P = R.parent;
    const BasisSpec& F = R.fine;
    std::vector<WeightedRule> rules(P.dim());
    for (int i = 0; i < P.dim(); ++i) {
        WeightedRule& r = rules[i];
        r.index = i;
        r.nodes = active_nodes(P, i, nodes);
        r.exact = overlapping_functions(F, P, i);
        const int nj = static_cast<int>(r.exact.size()), nn = static_cast<int>(r.nodes.size());
        Eigen::MatrixXd M(nj, nn);
        Eigen::VectorXd mu(nj);
        for (int a = 0; a < nj; ++a) {
            mu[a] = product_integral(F, r.exact[a], P, i);
            for (int c = 0; c < nn; ++c) M(a, c) = colloc(r.exact[a], r.nodes[c]);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
        if (cod.rank() < nj)
            throw ConstructionError("rank-deficient local collocation matrix for regular rule " + std::to_string(i));
        Eigen::VectorXd w = cod.solve(mu);
        r.residual = (M * w - mu).cwiseAbs().maxCoeff();
        r.w.assign(w.data(), w.data() + w.size());
    }
    return rules;
}

inline std::vector<WeightedRule> build_regular_rules(const RefinedBasis& R, const NodeVector& nodes) {
    return build_regular_rules(R, nodes, collocation_matrix(R.fine, nodes));
}

// Log-singular rules: row nu of W holds weights w^{sigma_nu} over all nodes,
// exact for int_I ln|t - sigma_nu| B_j(t) dt on every fine function.
struct SingularRules {
    std::vector<double> sigma;
    Eigen::MatrixXd W;          // n_sigma x N_quad
    Eigen::VectorXd residual;   // max-abs exactness defect per sigma
};

// One factorization of the full collocation matrix serves every sigma.
inline SingularRules build_singular_rules(const BasisSpec& fine, const NodeVector& nodes,
                                          const std::vector<double>& sigma, const Eigen::MatrixXd& colloc,
                                          const LogKernel& kernel = {}) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(colloc);
    if (cod.rank() < fine.dim())
        throw ConstructionError("collocation matrix violates Schoenberg-Whitney (rank " +
                                std::to_string(cod.rank()) + " < " + std::to_string(fine.dim()) + ")");
    Eigen::MatrixXd mom = moment_table(fine, sigma, kernel);
    Eigen::MatrixXd W = cod.solve(mom);
    SingularRules out;
    out.sigma = sigma;
    out.residual = (colloc * W - mom).cwiseAbs().colwise().maxCoeff().transpose();
    out.W = W.transpose();
    return out;
}

inline SingularRules build_singular_rules(const BasisSpec& fine, const NodeVector& nodes,
                                          const std::vector<double>& sigma, const LogKernel& kernel = {}) {
    return build_singular_rules(fine, nodes, sigma, collocation_matrix(fine, nodes), kernel);
}

// Aggregate error sum (Q - I)^2 / sum Q^2 over all abscissae.
inline double quad_error_ERR(const Eigen::VectorXd& Q, const Eigen::VectorXd& exact) {
    if (Q.size() != exact.size()) throw UsageError("ERR: size mismatch");
    const double den = Q.squaredNorm();
    if (!(den > 0.0)) throw MetricError("ERR undefined: all quadrature values are zero");
    return (Q - exact).squaredNorm() / den;
}

}  // namespace igabem
