#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "error.hpp"
#include "moments.hpp"
#include "problems.hpp"
#include "quadrature.hpp"
#include "solver.hpp"

namespace igabem {

struct RunConfig {
    std::string problem = "parabola";
    std::string curve_file;          // optional custom geometry (see io.hpp)
    std::vector<int> degrees{2};
    std::vector<int> hinv{5};        // h = 1/k; N_h = k * |I|
    int nref = 1;
    std::string strategy = "weighted";  // weighted | element
    int ng = 32;
    int b2_gauss = 16;
    int geometry_mult = 0;           // 0: problem default
    bool symmetrize = false;
    std::string out_dir = ".";
    bool dump_rules = false;
    bool svg = false;
};

struct RunResult {
    std::string problem, strategy, kind;
    int d = 0, hinv = 0, nh = 0, nref = 1, ng = 0, dof = 0, nquad = 0, geometry_mult = 1;
    bool symmetrized = false;
    double cond = 0, E_R = 0, E_M = 0, residual = 0, symmetry_defect = 0;
    long long kernel_evals = 0, integrand_evals = 0, near_kernel_evals = 0, far_pairs = 0, near_pairs = 0;
    double seconds_rules = 0, seconds_matrix = 0, seconds_rhs = 0, seconds_solve = 0;
    double assembly_seconds() const { return seconds_rules + seconds_matrix + seconds_rhs; }
};

inline int elements_for(const BoundaryCurve& c, int hinv) {
    double n = c.length() * hinv;
    int k = static_cast<int>(std::lround(n));
    if (k < 1 || std::abs(n - k) > 1e-9) throw ConfigError("h = 1/" + std::to_string(hinv) + " does not divide the parameter interval");
    return k;
}

// Everything produced by one (d, h) cell, kept for post-processing.
struct CellOutput {
    RunResult row;
    BoundarySolution solution;
    AssembledSystem system;
};

inline CellOutput run_cell(const Problem& P, int d, int hinv, const RunConfig& cfg) {
    const int nh = elements_for(P.curve, hinv);
    const int gm = cfg.geometry_mult > 0 ? cfg.geometry_mult : P.geometry_mult;
    BasisSpec basis = discretization_basis(P.curve, d, nh, gm);
    CellOutput out;
    RunResult& r = out.row;
    r.problem = P.name;
    r.strategy = cfg.strategy;
    r.kind = to_string(P.kind);
    r.d = d;
    r.hinv = hinv;
    r.nh = nh;
    r.nref = cfg.nref;
    r.ng = cfg.ng;
    r.geometry_mult = gm;
    r.dof = basis.dim();
    const bool direct = P.kind == BieKind::DirectInterior;

    if (cfg.strategy == "weighted") {
        Discretization D = build_discretization(P.curve, basis, cfg.nref);
        out.system = assemble_weighted(D, cfg.symmetrize);
        auto t0 = std::chrono::steady_clock::now();
        std::vector<double> u(D.num_nodes());
        for (int n = 0; n < D.num_nodes(); ++n) u[n] = P.u_D(D.nodes.eta[n]);
        Eigen::VectorXd b1 = assemble_b1(D, u);
        if (direct)
            out.system.rhs = 0.5 * b1 - assemble_b2(D, cfg.b2_gauss, P.u_D) / (2.0 * std::numbers::pi);
        else
            out.system.rhs = b1;
        out.system.seconds_rhs = detail::seconds_since(t0);
        r.nquad = D.num_nodes();
    } else if (cfg.strategy == "element") {
        BaselineOptions bo;
        bo.ng = cfg.ng;
        out.system = assemble_baseline(P.curve, basis, bo);
        if (cfg.symmetrize) {
            out.system.A = 0.5 * (out.system.A + out.system.A.transpose()).eval();
            out.system.symmetrized = true;
        }
        auto t0 = std::chrono::steady_clock::now();
        out.system.rhs = direct ? assemble_rhs_gauss(P.curve, basis, cfg.ng, P.u_D, 0.5, -0.5 / std::numbers::pi,
                                                     cfg.b2_gauss)
                                : assemble_rhs_gauss(P.curve, basis, cfg.ng, P.u_D, 1.0);
        out.system.seconds_rhs = detail::seconds_since(t0);
    } else {
        throw ConfigError("unknown strategy '" + cfg.strategy + "' (expected weighted or element)");
    }
    auto t1 = std::chrono::steady_clock::now();
    out.solution = solve(out.system, basis);
    r.seconds_solve = detail::seconds_since(t1);
    ErrorReport er = error_metrics(out.solution, P.exact);
    r.cond = condition_number(out.system.A);
    r.E_R = er.E_R;
    r.E_M = er.E_M;
    r.residual = out.solution.residual;
    r.symmetry_defect = out.system.symmetry_defect;
    r.symmetrized = out.system.symmetrized;
    const auto& c = out.system.counters;
    r.kernel_evals = c.kernel_evals;
    r.integrand_evals = c.integrand_evals;
    r.near_kernel_evals = c.near_kernel_evals;
    r.far_pairs = c.far_pairs;
    r.near_pairs = c.near_pairs;
    r.seconds_rules = out.system.seconds_rules;
    r.seconds_matrix = out.system.seconds_matrix;
    r.seconds_rhs = out.system.seconds_rhs;
    return out;
}

inline std::vector<RunResult> run_convergence(const Problem& P, const RunConfig& cfg) {
    std::vector<RunResult> rows;
    for (int d : cfg.degrees)
        for (int k : cfg.hinv) rows.push_back(run_cell(P, d, k, cfg).row);
    return rows;
}

namespace detail {
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}
}  // namespace detail

inline const char* convergence_header() {
    return "problem,kind,strategy,d,h,N_h,N_ref,N_G,geometry_mult,symmetrized,DoF,N_quad,cond,E_R,E_M,"
           "residual,symmetry_defect,kernel_evals,integrand_evals,near_kernel_evals,far_pairs,near_pairs,"
           "rule_seconds,matrix_seconds,rhs_seconds,assembly_seconds,solve_seconds";
}

inline std::string convergence_row(const RunResult& r) {
    using detail::fmt;
    std::ostringstream o;
    o << r.problem << ',' << r.kind << ',' << r.strategy << ',' << r.d << ",1/" << r.hinv << ',' << r.nh << ','
      << r.nref << ',' << r.ng << ',' << r.geometry_mult << ',' << (r.symmetrized ? 1 : 0) << ',' << r.dof << ','
      << r.nquad << ',' << fmt(r.cond) << ',' << fmt(r.E_R) << ',' << fmt(r.E_M) << ',' << fmt(r.residual) << ','
      << fmt(r.symmetry_defect) << ',' << r.kernel_evals << ',' << r.integrand_evals << ',' << r.near_kernel_evals
      << ',' << r.far_pairs << ',' << r.near_pairs << ',' << fmt(r.seconds_rules) << ',' << fmt(r.seconds_matrix)
      << ',' << fmt(r.seconds_rhs) << ',' << fmt(r.assembly_seconds()) << ',' << fmt(r.seconds_solve);
    return o.str();
}

inline void write_convergence_csv(const std::string& path, const std::vector<RunResult>& rows) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    f << convergence_header() << '\n';
    for (const auto& r : rows) f << convergence_row(r) << '\n';
}

// ---------------------------------------------------------------------------
// Singular-quadrature benchmark.

struct QuadBenchRow {
    int d = 0, nh = 0, nref = 1, nquad = 0;
    double regular_residual = 0;   // max exactness defect, regular rules
    double singular_residual = 0;  // max exactness defect, singular rules
    double monomial_d_error = 0;   // max |Q^s[t^d] - I| / max |I|
    double err_bspline = 0, err_monomial = 0, err_sqrt = 0;          // sum (Q-I)^2 / sum Q^2
    double maxabs_bspline = 0, maxabs_monomial = 0, maxabs_sqrt = 0; // max |Q - I|
    double seconds = 0;
};

inline double sqrt_benchmark(double t) { return std::sqrt(std::max(0.0, 1.0 - t * t)) / (t * t + 25.0); }

inline double sqrt_benchmark_exact(double s) {
    const double pi = std::numbers::pi, r26 = std::sqrt(26.0);
    return pi * std::log(2.0) + pi * r26 / 5.0 * std::log(std::sqrt(25.0 + s * s) / (5.0 + r26));
}

inline QuadBenchRow run_quad_cell(int d, int nh, int nref) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> br(nh + 1);
    for (int k = 0; k <= nh; ++k) br[k] = -1.0 + 2.0 * k / nh;
    br.back() = 1.0;
    BasisSpec parent = make_open_basis(d, br);
    RefinedBasis R = refine_uniform(parent, nref);
    NodeVector nodes = build_nodes(R.fine);
    Eigen::MatrixXd C = collocation_matrix(R.fine, nodes);
    auto reg = build_regular_rules(R, nodes, C);
    SingularRules S = build_singular_rules(R.fine, nodes, nodes.eta, C);
    QuadBenchRow row;
    row.d = d;
    row.nh = nh;
    row.nref = nref;
    row.nquad = nodes.size();
    for (const auto& r : reg) row.regular_residual = std::max(row.regular_residual, r.residual);
    row.singular_residual = S.residual.maxCoeff();

    const int nq = nodes.size();
    BasisSpec up = make_open_basis(d + 1, br);
    Eigen::VectorXd vd(nq), vb(nq), vm(nq), vs(nq);
    for (int n = 0; n < nq; ++n) {
        const double t = nodes.eta[n];
        vd[n] = std::pow(t, d);
        vb[n] = eval_function(up, d + 1, t);
        vm[n] = std::pow(t, d + 1);
        vs[n] = sqrt_benchmark(t);
    }
    Eigen::VectorXd Qd = S.W * vd, Qb = S.W * vb, Qm = S.W * vm, Qs = S.W * vs;
    Eigen::VectorXd Id(nq), Ib(nq), Im(nq), Is(nq);
    for (int n = 0; n < nq; ++n) {
        const double s = nodes.eta[n];
        Id[n] = log_moment_monomial(d, -1.0, 1.0, s);
        Ib[n] = modified_moments(up, s)[d + 1];
        Im[n] = log_moment_monomial(d + 1, -1.0, 1.0, s);
        Is[n] = sqrt_benchmark_exact(s);
    }
    row.monomial_d_error = (Qd - Id).cwiseAbs().maxCoeff() / Id.cwiseAbs().maxCoeff();
    row.err_bspline = quad_error_ERR(Qb, Ib);
    row.err_monomial = quad_error_ERR(Qm, Im);
    row.err_sqrt = quad_error_ERR(Qs, Is);
    row.maxabs_bspline = (Qb - Ib).cwiseAbs().maxCoeff();
    row.maxabs_monomial = (Qm - Im).cwiseAbs().maxCoeff();
    row.maxabs_sqrt = (Qs - Is).cwiseAbs().maxCoeff();
    row.seconds = detail::seconds_since(t0);
    return row;
}

inline const char* quadbench_header() {
    return "d,N_h,N_ref,N_quad,regular_residual,singular_residual,monomial_d_rel_error,"
           "ERR_bspline,ERR_monomial,ERR_sqrt,rootERR_bspline,rootERR_monomial,rootERR_sqrt,"
           "maxabs_bspline,maxabs_monomial,maxabs_sqrt,seconds";
}

inline std::string quadbench_row(const QuadBenchRow& r) {
    using detail::fmt;
    std::ostringstream o;
    o << r.d << ',' << r.nh << ',' << r.nref << ',' << r.nquad << ',' << fmt(r.regular_residual) << ','
      << fmt(r.singular_residual) << ',' << fmt(r.monomial_d_error) << ',' << fmt(r.err_bspline) << ','
      << fmt(r.err_monomial) << ',' << fmt(r.err_sqrt) << ',' << fmt(std::sqrt(r.err_bspline)) << ','
      << fmt(std::sqrt(r.err_monomial)) << ',' << fmt(std::sqrt(r.err_sqrt)) << ',' << fmt(r.maxabs_bspline) << ','
      << fmt(r.maxabs_monomial) << ',' << fmt(r.maxabs_sqrt) << ',' << fmt(r.seconds);
    return o.str();
}

// ---------------------------------------------------------------------------
// Debug dumps and plots.

inline void dump_rules_csv(const std::string& dir, const Discretization& D) {
    std::ofstream f(dir + "/regular_rules.csv");
    if (!f) throw ConfigError("cannot write rule dump in " + dir);
    f << "rule,node,eta,weight\n";
    for (const auto& r : D.reg)
        for (std::size_t k = 0; k < r.nodes.size(); ++k)
            f << r.index << ',' << r.nodes[k] << ',' << detail::fmt(D.nodes.eta[r.nodes[k]]) << ','
              << detail::fmt(r.w[k]) << '\n';
    std::ofstream g(dir + "/singular_rules.csv");
    g << "sigma_index,sigma,node,eta,weight\n";
    for (int v = 0; v < static_cast<int>(D.sing.sigma.size()); ++v)
        for (int n = 0; n < D.num_nodes(); ++n)
            g << v << ',' << detail::fmt(D.sing.sigma[v]) << ',' << n << ',' << detail::fmt(D.nodes.eta[n]) << ','
              << detail::fmt(D.sing.W(v, n)) << '\n';
    std::ofstream m(dir + "/moments.csv");
    m << "sigma_index,sigma,function,moment\n";
    Eigen::MatrixXd M = moment_table(D.ref.fine, D.sing.sigma, log_kernel(D.curve));
    for (int v = 0; v < M.cols(); ++v)
        for (int j = 0; j < M.rows(); ++j)
            m << v << ',' << detail::fmt(D.sing.sigma[v]) << ',' << j << ',' << detail::fmt(M(j, v)) << '\n';
}

// Log-log plot of E_R against DoF (left) and assembly seconds (right), one
// polyline per degree.
inline void write_convergence_svg(const std::string& path, const std::vector<RunResult>& rows) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    const double W = 420, H = 320, pad = 50;
    auto panel = [&](double x0, auto xval, const char* xlabel) {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& r : rows) {
            double x = xval(r), y = r.E_R;
            if (!(x > 0 && y > 0)) continue;
            xmin = std::min(xmin, std::log10(x)), xmax = std::max(xmax, std::log10(x));
            ymin = std::min(ymin, std::log10(y)), ymax = std::max(ymax, std::log10(y));
        }
        if (xmax <= xmin) xmax = xmin + 1;
        if (ymax <= ymin) ymax = ymin + 1;
        auto px = [&](double x) { return x0 + pad + (std::log10(x) - xmin) / (xmax - xmin) * (W - 2 * pad); };
        auto py = [&](double y) { return H - pad - (std::log10(y) - ymin) / (ymax - ymin) * (H - 2 * pad); };
        f << "<rect x='" << x0 + pad << "' y='" << pad << "' width='" << W - 2 * pad << "' height='" << H - 2 * pad
          << "' fill='none' stroke='black'/>\n";
        f << "<text x='" << x0 + W / 2 << "' y='" << H - 10 << "' text-anchor='middle'>" << xlabel << "</text>\n";
        f << "<text x='" << x0 + 12 << "' y='" << H / 2 << "'>E_R</text>\n";
        const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
        std::vector<int> degs;
        for (const auto& r : rows)
            if (std::find(degs.begin(), degs.end(), r.d) == degs.end()) degs.push_back(r.d);
        for (std::size_t k = 0; k < degs.size(); ++k) {
            f << "<polyline fill='none' stroke='" << colors[k % 6] << "' points='";
            for (const auto& r : rows)
                if (r.d == degs[k] && xval(r) > 0 && r.E_R > 0) f << px(xval(r)) << ',' << py(r.E_R) << ' ';
            f << "'/>\n";
            f << "<text x='" << x0 + W - pad - 40 << "' y='" << pad + 15 * (k + 1) << "' fill='" << colors[k % 6]
              << "'>d=" << degs[k] << "</text>\n";
        }
    };
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << 2 * W << "' height='" << H << "' font-size='12'>\n";
    panel(0, [](const RunResult& r) { return static_cast<double>(r.dof); }, "DoF (log)");
    panel(W, [](const RunResult& r) { return r.assembly_seconds(); }, "assembly seconds (log)");
    f << "</svg>\n";
}

}  // namespace igabem
