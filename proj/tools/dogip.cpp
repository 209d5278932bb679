// Command-line front end: bench, verify, solve, quad, tables.

#include "dogip/cli.hpp"

#include <CLI11.hpp>

namespace
{

void add_mesh_options(CLI::App& cmd, dogip::RunConfig& cfg, std::string& mesh)
{
    cmd.add_option("--mesh", mesh, "structured lattice or perturbed interior vertices")
        ->check(CLI::IsMember({"structured", "perturbed"}));
    cmd.add_option("--jitter", cfg.jitter, "perturbation amplitude as a fraction of h, in [0, 0.5)");
    cmd.add_option("--seed", cfg.seed, "seed for perturbation and random probes");
}

void add_problem_options(CLI::App& cmd, dogip::RunConfig& cfg, std::string& problem)
{
    cmd.add_option("--d", cfg.d, "spatial dimension")->check(CLI::IsMember({2, 3}));
    cmd.add_option("--problem", problem, "wp or elliptic")->check(CLI::IsMember({"wp", "elliptic"}));
    cmd.add_option("--m", cfg.m, "scalar weight, polynomial in x,y,z");
    cmd.add_option("--M", cfg.M, "matrix coefficient: identity | diag:a,b[,c] | iso:EXPR | rotated:l1,l2[,l3]:angle");
    cmd.add_option("--quad-degree", cfg.quad_degree, "override the quadrature degree")->check(CLI::NonNegativeNumber);
    cmd.add_flag("--serial", cfg.serial, "single-threaded deterministic execution");
}

} // namespace

int main(int argc, char** argv)
{
    dogip::RunConfig cfg;
    std::string      problem;
    std::string      pairs;
    std::string      mesh;
    std::string      count = "values";

    CLI::App app{"Matrix-free DoGIP operators on simplex meshes"};
    app.require_subcommand(1);

    auto* bench = app.add_subcommand("bench", "memory and cost comparison against the assembled matrix");
    add_problem_options(*bench, cfg, problem);
    add_mesh_options(*bench, cfg, mesh);
    bench->add_option("--pairs", pairs, "N:k[,N:k...]")->required();
    bench->add_option("--out", cfg.out, "write the table to this file");
    bench->add_option("--format", cfg.format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
    bench->add_option("--count", count, "nnz A from thresholded values or from the sparsity pattern")
        ->check(CLI::IsMember({"values", "pattern"}));
    bench->add_option("--mem-cap", cfg.mem_cap, "refuse runs whose element-block entry bound exceeds this")->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "compare matrix-free products with the assembled matrix");
    add_problem_options(*verify, cfg, problem);
    add_mesh_options(*verify, cfg, mesh);
    verify->add_option("--k", cfg.k_list, "polynomial orders")->delimiter(',');
    verify->add_option("--N", cfg.N_list, "subdivisions")->delimiter(',');
    verify->add_option("--tolerance", cfg.tolerance, "maximum relative discrepancy");
    verify->add_option("--samples", cfg.samples, "random vectors per configuration")->check(CLI::PositiveNumber);
    verify->add_option("--inject-fault", cfg.inject_fault, "add this to one stored weight (negative control)");

    auto* solve = app.add_subcommand("solve", "solve the weighted projection or elliptic problem with CG");
    add_problem_options(*solve, cfg, problem);
    add_mesh_options(*solve, cfg, mesh);
    solve->add_option("--N", cfg.N_list, "subdivisions")->expected(1);
    solve->add_option("--k", cfg.k_list, "polynomial order")->expected(1);
    solve->add_option("--f", cfg.f, "source term");
    solve->add_option("--dirichlet", cfg.dirichlet, "boundary values (elliptic default 0)");
    solve->add_option("--exact", cfg.exact, "exact solution for nodal error reporting");
    solve->add_option("--operator", cfg.operator_path, "csr, dogip or both")->check(CLI::IsMember({"csr", "dogip", "both"}));
    solve->add_option("--cg-tol", cfg.cg_tolerance, "relative residual tolerance");
    solve->add_option("--maxit", cfg.max_iterations, "iteration cap");

    auto* quad = app.add_subcommand("quad", "Grundmann-Moller rule exactness report");
    quad->add_option("--d", cfg.d, "spatial dimension")->check(CLI::IsMember({2, 3}));
    quad->add_option("--degree", cfg.degree, "requested degree")->required();

    auto* tables = app.add_subcommand("tables", "print reference interpolation tables");
    tables->add_option("--d", cfg.d, "spatial dimension")->check(CLI::IsMember({2, 3}));
    tables->add_option("--k", cfg.k_list, "polynomial order")->expected(1);
    tables->add_option("--problem", problem, "wp or elliptic")->check(CLI::IsMember({"wp", "elliptic"}));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return dogip::exit_config;
    }

    // verify defaults to the exact lattice, bench and solve to the perturbed mesh
    cfg.mesh = !mesh.empty() ? mesh : verify->parsed() ? "structured" : "perturbed";

    cfg.command = app.get_subcommands().front()->get_name();
    try
    {
        if (!problem.empty())
            cfg.problem = dogip::parse_problem(problem);
        if (!pairs.empty())
            cfg.pairs = dogip::parse_pairs(pairs);
        cfg.count_model = dogip::parse_count_model(count);
    }
    catch (const dogip::Error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return dogip::exit_config;
    }
    return dogip::run_command(cfg);
}
