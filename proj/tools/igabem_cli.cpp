#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "igabem/igabem.hpp"

namespace fs = std::filesystem;
using namespace igabem;

namespace {

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

struct SolveArgs {
    std::string config, problem, curve, degree, h, strategy, out;
    int nref = 0, ng = 0, b2_gauss = 0, geometry_mult = -1;
    bool symmetrize = false, dump_rules = false, svg = false;
};

int run_solve(const SolveArgs& a) {
    RunConfig cfg;
    if (!a.config.empty()) apply_config(read_json_file(a.config), cfg);
    if (!a.problem.empty()) cfg.problem = a.problem;
    if (!a.curve.empty()) cfg.curve_file = a.curve;
    if (!a.degree.empty()) cfg.degrees = parse_int_list(a.degree);
    if (!a.h.empty()) cfg.hinv = parse_h_list(a.h);
    if (a.nref > 0) cfg.nref = a.nref;
    if (a.ng > 0) cfg.ng = a.ng;
    if (a.b2_gauss > 0) cfg.b2_gauss = a.b2_gauss;
    if (a.geometry_mult >= 0) cfg.geometry_mult = a.geometry_mult;
    if (a.symmetrize) cfg.symmetrize = true;
    if (a.dump_rules) cfg.dump_rules = true;
    if (a.svg) cfg.svg = true;
    if (!a.out.empty()) cfg.out_dir = a.out;
    std::vector<std::string> strategies = split(a.strategy.empty() ? cfg.strategy : a.strategy);
    for (const auto& s : strategies) {
        cfg.strategy = s;
        validate(cfg);
    }

    Problem P = problem_for(cfg);
    fs::create_directories(cfg.out_dir);
    std::vector<RunResult> rows;
    std::cout << convergence_header() << '\n';
    for (const auto& s : strategies) {
        cfg.strategy = s;
        for (int d : cfg.degrees)
            for (int k : cfg.hinv) {
                CellOutput cell = run_cell(P, d, k, cfg);
                rows.push_back(cell.row);
                std::cout << convergence_row(cell.row) << std::endl;
                if (cfg.dump_rules && s == "weighted") {
                    const int nh = elements_for(P.curve, k);
                    const int gm = cfg.geometry_mult > 0 ? cfg.geometry_mult : P.geometry_mult;
                    Discretization D =
                        build_discretization(P.curve, discretization_basis(P.curve, d, nh, gm), cfg.nref);
                    fs::path dir = fs::path(cfg.out_dir) / ("rules_d" + std::to_string(d) + "_h" + std::to_string(k));
                    fs::create_directories(dir);
                    dump_rules_csv(dir.string(), D);
                }
            }
    }
    const std::string csv = (fs::path(cfg.out_dir) / "convergence.csv").string();
    write_convergence_csv(csv, rows);
    if (cfg.svg) write_convergence_svg((fs::path(cfg.out_dir) / "convergence.svg").string(), rows);
    return 0;
}

struct QuadArgs {
    std::string degrees = "2:5", nh = "10,20,40,80,100", out = ".";
    int nref = 2;
};

int run_quadbench(const QuadArgs& a) {
    std::vector<int> degs = parse_int_list(a.degrees), nhs = parse_int_list(a.nh);
    if (a.nref < 1) throw ConfigError("nref must be >= 1");
    for (int d : degs)
        if (d < 0 || d > kMaxDegree - 1) throw ConfigError("degree out of range: " + std::to_string(d));
    for (int n : nhs)
        if (n < 1) throw ConfigError("N_h must be >= 1");
    fs::create_directories(a.out);
    const std::string path = (fs::path(a.out) / "quadbench.csv").string();
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    f << quadbench_header() << '\n';
    std::cout << quadbench_header() << '\n';
    for (int d : degs)
        for (int n : nhs) {
            std::string row = quadbench_row(run_quad_cell(d, n, a.nref));
            f << row << '\n';
            std::cout << row << std::endl;
        }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D Laplace isogeometric symmetric Galerkin BEM with weighted quadrature"};
    app.require_subcommand(1);

    SolveArgs sa;
    app.set_help_flag("--help", "print help");
    auto* solve = app.add_subcommand("solve", "convergence sweep over degrees and mesh sizes");
    solve->set_help_flag("--help", "print help");
    solve->add_option("--config", sa.config, "JSON config file; flags override its keys");
    solve->add_option("--problem", sa.problem, "parabola | closed-smooth");
    solve->add_option("--curve", sa.curve, "custom curve JSON (overrides --problem)");
    solve->add_option("--degree", sa.degree, "degrees, e.g. 2 or 2,3 or 2:5");
    solve->add_option("--h", sa.h, "mesh sizes, e.g. 1/5,1/10");
    solve->add_option("--nref", sa.nref, "refinement factor of the quadrature space");
    solve->add_option("--strategy", sa.strategy, "weighted | element | weighted,element");
    solve->add_option("--ng", sa.ng, "Gauss points per element for the element strategy");
    solve->add_option("--b2-gauss", sa.b2_gauss, "inner Gauss order for the double-layer RHS");
    solve->add_option("--geometry-mult", sa.geometry_mult, "knot multiplicity at geometry breakpoints (0 = default)");
    solve->add_flag("--symmetrize", sa.symmetrize, "average A with its transpose before solving");
    solve->add_flag("--dump-rules", sa.dump_rules, "write quadrature rules and moments as CSV");
    solve->add_flag("--svg", sa.svg, "write convergence.svg");
    solve->add_option("--out", sa.out, "output directory");

    QuadArgs qa;
    auto* quad = app.add_subcommand("quadbench", "singular quadrature benchmark");
    quad->add_option("--degrees", qa.degrees, "degrees, e.g. 2:5")->capture_default_str();
    quad->add_option("--nh", qa.nh, "element counts")->capture_default_str();
    quad->add_option("--nref", qa.nref, "refinement factor")->capture_default_str();
    quad->add_option("--out", qa.out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        json j{{"status", "error"}, {"kind", "usage"}, {"message", e.what()}};
        std::cerr << j.dump() << '\n';
        return 2;
    }
    try {
        if (*solve) return run_solve(sa);
        return run_quadbench(qa);
    } catch (const std::exception& e) {
        std::cerr << error_record(e).dump() << '\n';
        return 1;
    }
}
