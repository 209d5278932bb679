#pragma once

/// @file cli.hpp
/// Subcommands of the dogip tool, independent of argument parsing so they
/// can be driven from tests. Each returns a process exit code:
///   0 success, 1 check or solve failure, 2 configuration error,
///   3 refused because the estimated matrix size exceeds the cap.

#include "dogip/metrics.hpp"
#include "dogip/report_io.hpp"
#include "dogip/solver.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace dogip
{

enum ExitCode : int
{
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_resource = 3,
};

struct RunConfig
{
    std::string command;

    std::optional<int>               d;
    std::vector<std::pair<int, int>> pairs;  // bench: (N, k)
    std::vector<int>                 N_list; // verify/solve
    std::vector<int>                 k_list;
    std::optional<Problem>           problem;
    std::optional<std::string>       m;      // scalar weight expression
    std::optional<std::string>       M;      // matrix coefficient spec
    std::optional<int>               quad_degree;
    std::string                      out;
    std::string                      format = "text";
    bool                             serial = false;
    GlobalIndex                      mem_cap = 200'000'000;
    CountModel                       count_model = CountModel::values;

    std::string   mesh = "perturbed";
    Real          jitter = 0.2;
    std::uint64_t seed = 20181;

    Real tolerance = 1e-10;
    int  samples = 10;
    Real inject_fault = 0;

    std::string                operator_path = "both";
    std::string                f = "0";
    std::optional<std::string> dirichlet;
    std::optional<std::string> exact;
    Real                       cg_tolerance = 1e-12;
    std::optional<int>         max_iterations;

    int degree = 1;
};

/// "1200:1,2:3" -> {(1200,1),(2,3)}
inline std::vector<std::pair<int, int>> parse_pairs(std::string_view text)
{
    std::vector<std::pair<int, int>> out;
    std::stringstream                ss{std::string(text)};
    std::string                      item;
    while (std::getline(ss, item, ','))
    {
        const auto colon = item.find(':');
        require(colon != std::string::npos, ErrorCode::parse_error, "pair \"" + item + "\" is not N:k");
        const auto n = detail::parse_int(item.substr(0, colon));
        const auto k = detail::parse_int(item.substr(colon + 1));
        out.emplace_back(static_cast<int>(n), static_cast<int>(k));
    }
    require(!out.empty(), ErrorCode::parse_error, "empty pair list");
    return out;
}

namespace detail
{

inline std::vector<Real> split_reals(std::string_view text)
{
    std::vector<Real> out;
    std::stringstream ss{std::string(text)};
    std::string       item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_real(item));
    return out;
}

} // namespace detail

/// identity | diag:a,b[,c] | iso:EXPR | rotated:l1,l2[,l3]:angle
template <int Dim>
TensorField<Dim> parse_tensor_field(std::string_view spec)
{
    if (spec == "identity")
        return TensorField<Dim>::identity();
    const auto colon = spec.find(':');
    require(colon != std::string_view::npos, ErrorCode::parse_error, "unknown coefficient \"" + std::string(spec) + "\"");
    const auto kind = spec.substr(0, colon);
    const auto rest = spec.substr(colon + 1);
    if (kind == "iso")
        return TensorField<Dim>::isotropic(ScalarField<Dim>::parse(rest));
    if (kind == "diag" || kind == "rotated")
    {
        std::string_view values = rest;
        Real             angle = 0;
        if (kind == "rotated")
        {
            const auto c2 = rest.rfind(':');
            require(c2 != std::string_view::npos, ErrorCode::parse_error, "rotated needs eigenvalues and an angle");
            values = rest.substr(0, c2);
            angle = detail::parse_real(std::string(rest.substr(c2 + 1)));
        }
        const auto v = detail::split_reals(values);
        require(static_cast<int>(v.size()) == Dim, ErrorCode::invalid_argument,
                "expected " + std::to_string(Dim) + " diagonal entries in \"" + std::string(spec) + "\"");
        std::array<Real, Dim> a{};
        std::copy(v.begin(), v.end(), a.begin());
        return kind == "diag" ? TensorField<Dim>::diagonal(a) : TensorField<Dim>::rotated(a, angle);
    }
    throw Error(ErrorCode::parse_error, "unknown coefficient kind \"" + std::string(kind) + "\"");
}

template <int Dim>
Mesh<Dim> make_mesh(const RunConfig& cfg, int n)
{
    auto mesh = build_structured_mesh<Dim>(n);
    if (cfg.mesh == "perturbed")
        perturb_interior_vertices(mesh, cfg.jitter, cfg.seed);
    else
        require(cfg.mesh == "structured", ErrorCode::invalid_argument, "mesh must be structured or perturbed");
    return mesh;
}

inline std::string mesh_description(const RunConfig& cfg)
{
    if (cfg.mesh == "perturbed" && cfg.jitter > 0)
    {
        std::ostringstream os;
        os << "perturbed(" << cfg.jitter << ";" << cfg.seed << ")";
        return os.str();
    }
    return "structured";
}

inline GlobalIndex element_count(int d, int n)
{
    return d == 2 ? 2 * ipow(n, 2) : 6 * ipow(n, 3);
}

/// Emits text to cfg.out if set, else to the given stream.
inline void emit(const RunConfig& cfg, std::ostream& os, const std::string& text)
{
    if (cfg.out.empty())
    {
        os << text;
        return;
    }
    std::ofstream file(cfg.out);
    require(static_cast<bool>(file), ErrorCode::invalid_argument, "cannot write " + cfg.out);
    file << text;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

template <int Dim>
EfficiencyReport bench_case(const RunConfig& cfg, Problem problem, int n, int k)
{
    const auto mesh = make_mesh<Dim>(cfg, n);
    auto       dofs = std::make_shared<const DofMap<Dim>>(build_continuous_dofmap(mesh, k));
    EfficiencyReport r;
    if (problem == Problem::wp)
    {
        const auto m = ScalarField<Dim>::parse(cfg.m.value_or("1"));
        const auto rule = grundmann_moller<Dim>(cfg.quad_degree.value_or(wp_rule_degree(k, m.degree())));
        const auto  op = build_wp_dogip(mesh, dofs, m, rule);
        Diagnostics diag;
        const auto  a = assemble_wp_matrix(mesh, *dofs, m, rule, &diag);
        r = build_report(mesh, a, op, problem, m.description(), diag.pattern_nnz, cfg.count_model);
    }
    else
    {
        const auto M = parse_tensor_field<Dim>(cfg.M.value_or("identity"));
        const auto rule = grundmann_moller<Dim>(cfg.quad_degree.value_or(elliptic_rule_degree(k, M.degree())));
        const auto  op = build_elliptic_dogip(mesh, dofs, M, rule);
        Diagnostics diag;
        const auto  a = assemble_elliptic_matrix(mesh, *dofs, M, rule, &diag);
        r = build_report(mesh, a, op, problem, M.description(), diag.pattern_nnz, cfg.count_model);
    }
    r.mesh = mesh_description(cfg);
    return r;
}

inline int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try
    {
        const int d = cfg.d.value_or(2);
        require(d == 2 || d == 3, ErrorCode::invalid_dimension, "dimension must be 2 or 3");
        require(!cfg.pairs.empty(), ErrorCode::invalid_argument, "bench needs --pairs");
        require(cfg.format == "text" || cfg.format == "csv" || cfg.format == "json", ErrorCode::invalid_argument,
                "format must be text, csv or json");
        const Problem problem = cfg.problem.value_or(Problem::wp);
        for (const auto& [n, k] : cfg.pairs)
        {
            require(n >= 1, ErrorCode::invalid_size, "N must be positive");
            require(k >= 1 && k <= (d == 2 ? max_primal_order<2>() : max_primal_order<3>()), ErrorCode::invalid_argument,
                    "k = " + std::to_string(k) + " outside the supported range");
        }
        for (const auto& [n, k] : cfg.pairs)
        {
            const GlobalIndex vt = polynomial_space_dim(d, k);
            const GlobalIndex bound = element_count(d, n) * vt * vt;
            if (bound > cfg.mem_cap)
            {
                err << "refusing N=" << n << " k=" << k << ": up to " << bound << " matrix entries exceed the cap of " << cfg.mem_cap
                    << " (raise --mem-cap)\n";
                return exit_resource;
            }
        }
        set_serial(cfg.serial);

        std::vector<EfficiencyReport> rows;
        for (const auto& [n, k] : cfg.pairs)
            rows.push_back(d == 2 ? bench_case<2>(cfg, problem, n, k) : bench_case<3>(cfg, problem, n, k));

        if (cfg.format == "csv")
            emit(cfg, out, reports_to_csv(rows));
        else if (cfg.format == "json")
            emit(cfg, out, reports_to_json(rows).dump(2) + "\n");
        else
            emit(cfg, out, reports_to_text(rows));
        return exit_ok;
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyCase
{
    int         d = 2;
    int         N = 2;
    int         k = 1;
    Problem     problem = Problem::wp;
    std::string coefficient;
    Real        discrepancy = 0;
    bool        pass = false;
};

/// max over random u of ||A u - Op u||_inf / ||A u||_inf.
template <typename Op>
Real max_relative_discrepancy(const CsrMatrix& a, const Op& op, int samples, std::uint64_t seed)
{
    std::mt19937_64                  rng(seed);
    std::uniform_real_distribution<> dist(-1, 1);
    Real                             worst = 0;
    std::vector<Real>                u(static_cast<std::size_t>(a.ncols));
    for (int s = 0; s < samples; ++s)
    {
        for (auto& x : u)
            x = dist(rng);
        const auto av = csr_matvec(a, u);
        const auto dv = op.apply(u);
        Real       num = 0, den = 0;
        for (std::size_t i = 0; i < av.size(); ++i)
        {
            num = std::max(num, std::abs(av[i] - dv[i]));
            den = std::max(den, std::abs(av[i]));
        }
        worst = std::max(worst, den > 0 ? num / den : num);
    }
    return worst;
}

template <int Dim>
VerifyCase verify_case(const RunConfig& cfg, Problem problem, int n, int k, const std::string& coefficient)
{
    const auto mesh = make_mesh<Dim>(cfg, n);
    auto       dofs = std::make_shared<const DofMap<Dim>>(build_continuous_dofmap(mesh, k));
    VerifyCase c{Dim, n, k, problem, coefficient, 0, false};
    const auto seed = cfg.seed + static_cast<std::uint64_t>(1000 * n + 10 * k + Dim);
    if (problem == Problem::wp)
    {
        const auto m = ScalarField<Dim>::parse(coefficient);
        const auto rule = grundmann_moller<Dim>(cfg.quad_degree.value_or(wp_rule_degree(k, m.degree())));
        auto       op = build_wp_dogip(mesh, dofs, m, rule);
        if (cfg.inject_fault != 0)
            op.inject_fault(cfg.inject_fault);
        c.discrepancy = max_relative_discrepancy(assemble_wp_matrix(mesh, *dofs, m, rule), op, cfg.samples, seed);
    }
    else
    {
        const auto M = parse_tensor_field<Dim>(coefficient);
        const auto rule = grundmann_moller<Dim>(cfg.quad_degree.value_or(elliptic_rule_degree(k, M.degree())));
        auto       op = build_elliptic_dogip(mesh, dofs, M, rule);
        if (cfg.inject_fault != 0)
            op.inject_fault(cfg.inject_fault);
        c.discrepancy = max_relative_discrepancy(assemble_elliptic_matrix(mesh, *dofs, M, rule), op, cfg.samples, seed);
    }
    c.pass = c.discrepancy <= cfg.tolerance;
    return c;
}

/// Default coefficient sweep: one constant and one varying coefficient.
inline std::vector<std::string> default_coefficients(int d, Problem problem)
{
    if (problem == Problem::wp)
        return d == 2 ? std::vector<std::string>{"1", "1+x+y"} : std::vector<std::string>{"1", "1+x+y+z"};
    return d == 2 ? std::vector<std::string>{"identity", "diag:1,2", "rotated:1,3:0.5", "iso:1+x*y"}
                  : std::vector<std::string>{"identity", "diag:1,2,3", "rotated:1,2,3:0.5", "iso:1+x*y*z"};
}

inline std::vector<VerifyCase> run_verify_sweep(const RunConfig& cfg)
{
    const std::vector<int> dims = cfg.d ? std::vector<int>{*cfg.d} : std::vector<int>{2, 3};
    const std::vector<Problem> problems = cfg.problem ? std::vector<Problem>{*cfg.problem} : std::vector<Problem>{Problem::wp, Problem::elliptic};
    const std::vector<int> ns = cfg.N_list.empty() ? std::vector<int>{2, 3} : cfg.N_list;

    std::vector<VerifyCase> cases;
    for (int d : dims)
    {
        require(d == 2 || d == 3, ErrorCode::invalid_dimension, "dimension must be 2 or 3");
        std::vector<int> ks = cfg.k_list;
        if (ks.empty())
            for (int k = 1; k <= (d == 2 ? 4 : 3); ++k)
                ks.push_back(k);
        for (Problem p : problems)
        {
            std::vector<std::string> coeffs;
            if (p == Problem::wp && cfg.m)
                coeffs = {*cfg.m};
            else if (p == Problem::elliptic && cfg.M)
                coeffs = {*cfg.M};
            else
                coeffs = default_coefficients(d, p);
            for (int k : ks)
                for (int n : ns)
                    for (const auto& coeff : coeffs)
                        cases.push_back(d == 2 ? verify_case<2>(cfg, p, n, k, coeff) : verify_case<3>(cfg, p, n, k, coeff));
        }
    }
    return cases;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    std::vector<VerifyCase> cases;
    try
    {
        set_serial(cfg.serial);
        cases = run_verify_sweep(cfg);
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
    bool ok = true;
    for (const auto& c : cases)
    {
        out << (c.pass ? "PASS" : "FAIL") << "  d=" << c.d << " k=" << c.k << " N=" << c.N << " problem=" << to_string(c.problem)
            << " coefficient=" << c.coefficient << "  max rel discrepancy " << c.discrepancy << '\n';
        ok = ok && c.pass;
    }
    if (!ok)
        for (const auto& c : cases)
            if (!c.pass)
                err << "identity violated for (d=" << c.d << ", k=" << c.k << ", N=" << c.N << ", " << to_string(c.problem) << ")\n";
    out << cases.size() << " configurations, " << (ok ? "all passed" : "FAILURES") << '\n';
    return ok ? exit_ok : exit_failure;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveSummary
{
    std::string       path;
    CgResult          result;
    Real              max_nodal_error = -1;
};

template <int Dim>
std::vector<SolveSummary> solve_case(const RunConfig& cfg, Problem problem, int n, int k)
{
    const auto mesh = make_mesh<Dim>(cfg, n);
    auto       dofs = std::make_shared<const DofMap<Dim>>(build_continuous_dofmap(mesh, k));
    const auto f = ScalarField<Dim>::parse(cfg.f);

    std::optional<CsrMatrix>                  a;
    std::optional<DogipWpOperator<Dim>>       wp;
    std::optional<DogipEllipticOperator<Dim>> ell;
    int                                       op_degree = 0;
    if (problem == Problem::wp)
    {
        const auto m = ScalarField<Dim>::parse(cfg.m.value_or("1"));
        op_degree = cfg.quad_degree.value_or(wp_rule_degree(k, m.degree()));
        const auto rule = grundmann_moller<Dim>(op_degree);
        a = assemble_wp_matrix(mesh, *dofs, m, rule);
        wp = build_wp_dogip(mesh, dofs, m, rule);
    }
    else
    {
        const auto M = parse_tensor_field<Dim>(cfg.M.value_or("identity"));
        op_degree = cfg.quad_degree.value_or(elliptic_rule_degree(k, M.degree()));
        const auto rule = grundmann_moller<Dim>(op_degree);
        a = assemble_elliptic_matrix(mesh, *dofs, M, rule);
        ell = build_elliptic_dogip(mesh, dofs, M, rule);
    }
    const auto b = assemble_rhs(mesh, *dofs, f, grundmann_moller<Dim>(std::max(op_degree, k + f.degree())));

    BcSpec bc;
    if (cfg.dirichlet || problem == Problem::elliptic)
    {
        const auto g = ScalarField<Dim>::parse(cfg.dirichlet.value_or("0"));
        for (Index i : dofs->boundary_dofs())
        {
            bc.indices.push_back(i);
            bc.values.push_back(g(dofs->coord(i)));
        }
    }

    std::vector<std::pair<std::string, LinearOperator>> paths;
    if (cfg.operator_path == "csr" || cfg.operator_path == "both")
        paths.emplace_back("csr", make_operator(*a));
    if (cfg.operator_path == "dogip" || cfg.operator_path == "both")
        paths.emplace_back("dogip", wp ? make_operator(*wp) : make_operator(*ell));
    require(!paths.empty(), ErrorCode::invalid_argument, "operator must be csr, dogip or both");

    std::optional<ScalarField<Dim>> exact;
    if (cfg.exact)
        exact = ScalarField<Dim>::parse(*cfg.exact);

    std::vector<SolveSummary> out;
    for (const auto& [name, op] : paths)
    {
        const auto   sys = apply_dirichlet(op, b, bc);
        SolveSummary s{name, cg_solve(sys.op, sys.rhs, cfg.cg_tolerance, cfg.max_iterations.value_or(10 * op.dim + 100), sys.lift), -1};
        if (exact)
        {
            s.max_nodal_error = 0;
            for (Index i = 0; i < dofs->dim(); ++i)
                s.max_nodal_error = std::max(s.max_nodal_error, std::abs(s.result.x[static_cast<std::size_t>(i)] - (*exact)(dofs->coord(i))));
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    std::vector<SolveSummary> runs;
    try
    {
        const int d = cfg.d.value_or(2);
        require(d == 2 || d == 3, ErrorCode::invalid_dimension, "dimension must be 2 or 3");
        const int n = cfg.N_list.empty() ? 4 : cfg.N_list.front();
        const int k = cfg.k_list.empty() ? 1 : cfg.k_list.front();
        set_serial(cfg.serial);
        const Problem p = cfg.problem.value_or(Problem::wp);
        runs = d == 2 ? solve_case<2>(cfg, p, n, k) : solve_case<3>(cfg, p, n, k);
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
    bool ok = true;
    for (const auto& r : runs)
    {
        out << r.path << ": status=" << to_string(r.result.status) << " iterations=" << r.result.iterations
            << " relative_residual=" << r.result.history.back();
        if (r.max_nodal_error >= 0)
            out << " max_nodal_error=" << r.max_nodal_error;
        out << '\n';
        ok = ok && r.result.status == CgStatus::converged;
    }
    if (runs.size() == 2)
    {
        Real diff = 0;
        for (std::size_t i = 0; i < runs[0].result.x.size(); ++i)
            diff = std::max(diff, std::abs(runs[0].result.x[i] - runs[1].result.x[i]));
        out << "max |x_csr - x_dogip| = " << diff << '\n';
    }
    if (!ok)
        err << "solver did not converge\n";
    return ok ? exit_ok : exit_failure;
}

// ---------------------------------------------------------------------------
// quad, tables
// ---------------------------------------------------------------------------

template <int Dim>
int quad_report(const RunConfig& cfg, std::ostream& out)
{
    const auto rule = grundmann_moller<Dim>(cfg.degree);
    const Real error = max_moment_error(rule);
    Real       wsum = 0;
    for (Real w : rule.weights)
        wsum += w;
    out << "d=" << Dim << " requested_degree=" << cfg.degree << " exact_degree=" << rule.degree << " points=" << rule.num_points()
        << " weight_sum=" << detail::format_real(wsum) << " negative_weights=" << (rule.has_negative_weights() ? "yes" : "no")
        << " max_rel_moment_error=" << error << '\n';
    return error <= 1e-12 ? exit_ok : exit_failure;
}

inline int cmd_quad(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try
    {
        const int d = cfg.d.value_or(2);
        require(d == 2 || d == 3, ErrorCode::invalid_dimension, "dimension must be 2 or 3");
        require(cfg.degree >= 0, ErrorCode::invalid_argument, "degree must be non-negative");
        return d == 2 ? quad_report<2>(cfg, out) : quad_report<3>(cfg, out);
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
}

template <int Dim>
void print_tables(const RunConfig& cfg, std::ostream& out)
{
    const int     k = cfg.k_list.empty() ? 1 : cfg.k_list.front();
    const Problem p = cfg.problem.value_or(Problem::wp);
    out << std::setprecision(17);
    if (p == Problem::wp)
    {
        const auto t = build_interp_wp<Dim>(k);
        out << "wp d=" << Dim << " k=" << k << " W_T=" << t->rows() << " V_T=" << t->cols() << " nnz=" << nnz_with_threshold(t->values())
            << " nnz_pm1=" << nnz_pm1(t->values()) << '\n';
        out << t->B << '\n';
    }
    else
    {
        const auto t = build_interp_elliptic<Dim>(k);
        out << "elliptic d=" << Dim << " k=" << k << " W_T=" << t->rows() << " V_T=" << t->cols()
            << " nnz=" << nnz_with_threshold(t->values()) << " nnz_pm1=" << nnz_pm1(t->values()) << '\n';
        for (int r = 0; r < Dim; ++r)
        {
            out << "r=" << r << '\n';
            for (Index i = 0; i < t->rows(); ++i)
            {
                for (Index l = 0; l < t->cols(); ++l)
                    out << (l ? " " : "") << t->B(r, i, l);
                out << '\n';
            }
        }
    }
}

inline int cmd_tables(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try
    {
        const int d = cfg.d.value_or(2);
        require(d == 2 || d == 3, ErrorCode::invalid_dimension, "dimension must be 2 or 3");
        const int k = cfg.k_list.empty() ? 1 : cfg.k_list.front();
        require(k >= 1 && k <= (d == 2 ? 8 : 4), ErrorCode::invalid_argument, "k outside the supported range");
        if (d == 2)
            print_tables<2>(cfg, out);
        else
            print_tables<3>(cfg, out);
        return exit_ok;
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
}

inline int run_command(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    if (cfg.command == "bench")
        return cmd_bench(cfg, out, err);
    if (cfg.command == "verify")
        return cmd_verify(cfg, out, err);
    if (cfg.command == "solve")
        return cmd_solve(cfg, out, err);
    if (cfg.command == "quad")
        return cmd_quad(cfg, out, err);
    if (cfg.command == "tables")
        return cmd_tables(cfg, out, err);
    err << "error: unknown command \"" << cfg.command << "\"\n";
    return exit_config;
}

} // namespace dogip
