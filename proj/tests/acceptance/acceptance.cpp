// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance [criterion...]   (default: 1..8)
// Exit status is 0 iff every selected criterion passed.

#include "dogip/cli.hpp"
#include "oracles.hpp"

#include <sys/resource.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>

using namespace dogip;

namespace
{

struct Outcome
{
    bool        pass = true;
    std::string summary;
};

struct Stopwatch
{
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    [[nodiscard]] double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

double peak_rss_mb()
{
    rusage u{};
    getrusage(RUSAGE_SELF, &u);
    return static_cast<double>(u.ru_maxrss) / 1024.0;
}

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Detail lines go to stdout ahead of the verdict, indented.
void detail(const std::string& s) { std::cout << "    " << s << '\n'; }

int kmax(int d) { return d == 2 ? 8 : 4; }

std::vector<int> table_orders(int d) { return d == 2 ? std::vector<int>{1, 2, 3, 4, 5, 6, 8} : std::vector<int>{1, 2, 3, 4}; }

RunConfig base_config()
{
    RunConfig cfg;
    cfg.serial = false;
    return cfg;
}

EfficiencyReport bench(const RunConfig& cfg, int d, Problem p, int n, int k)
{
    return d == 2 ? bench_case<2>(cfg, p, n, k) : bench_case<3>(cfg, p, n, k);
}

// --------------------------------------------------------------------------

Outcome decomposition_identity()
{
    Stopwatch  clock;
    auto       cfg = base_config();
    const auto cases = run_verify_sweep(cfg);
    Real       worst = 0;
    int        failed = 0;
    for (const auto& c : cases)
    {
        worst = std::max(worst, c.discrepancy);
        if (!c.pass)
        {
            ++failed;
            detail(fmt("d=%d k=%d N=%d %s %s: %.3e", c.d, c.k, c.N, std::string(to_string(c.problem)).c_str(), c.coefficient.c_str(),
                       c.discrepancy));
        }
    }
    return {failed == 0, fmt("%zu configurations (10 vectors each), max rel discrepancy %.2e <= 1e-10, %.1f s", cases.size(), worst,
                             clock.seconds())};
}

struct Columns
{
    GlobalIndex mem_t, dogip_t, bhat;
};

Outcome table_columns()
{
    const std::map<std::pair<int, Problem>, std::map<int, Columns>> expected{
        {{2, Problem::wp},
         {{1, {9, 6, 9}}, {2, {36, 15, 39}}, {3, {100, 28, 115}}, {4, {225, 45, 270}}, {5, {441, 66, 546}}, {6, {784, 91, 994}},
          {8, {2025, 153, 2655}}}},
        {{3, Problem::wp}, {{1, {16, 10, 16}}, {2, {100, 35, 116}}, {3, {400, 84, 520}}, {4, {1225, 165, 1729}}}},
        {{2, Problem::elliptic},
         {{1, {9, 4, 4}}, {2, {36, 24, 44}}, {3, {100, 60, 212}}, {4, {225, 112, 612}}, {5, {441, 180, 1516}}, {6, {784, 264, 2992}},
          {8, {2025, 480, 9232}}}},
        {{3, Problem::elliptic}, {{1, {16, 9, 6}}, {2, {100, 90, 126}}, {3, {400, 315, 1014}}, {4, {1225, 756, 4590}}}},
    };
    Stopwatch clock;
    int       rows = 0, mismatches = 0;
    for (const auto& [key, table] : expected)
        for (const auto& [k, want] : table)
        {
            const auto r = bench(base_config(), key.first, key.second, 2, k);
            ++rows;
            if (r.mem_A_T != want.mem_t || r.mem_A_dogip_T != want.dogip_t || r.nnz_Bhat != want.bhat)
            {
                ++mismatches;
                detail(fmt("d=%d %s k=%d: got %lld/%lld/%lld want %lld/%lld/%lld", key.first, std::string(to_string(key.second)).c_str(),
                           k, static_cast<long long>(r.mem_A_T), static_cast<long long>(r.mem_A_dogip_T),
                           static_cast<long long>(r.nnz_Bhat), static_cast<long long>(want.mem_t), static_cast<long long>(want.dogip_t),
                           static_cast<long long>(want.bhat)));
            }
        }
    return {mismatches == 0, fmt("%d rows of mem A_T / mem A_T^DoGIP / nnz B^ match exactly (%d mismatches), %.1f s", rows, mismatches,
                                 clock.seconds())};
}

Outcome full_scale_rows()
{
    struct Row
    {
        int         d, n;
        Problem     p;
        GlobalIndex mem_a, mem_dogip; // 0: not checked
        Real        mem_eff, comp_eff;
    };
    const std::vector<Row> rows{
        {2, 1200, Problem::wp, 21'616'803, 17'280'000, 0.80, 5.14},
        {2, 1200, Problem::elliptic, 21'616'803, 11'520'000, 0.53, 1.14},
        {3, 96, Problem::wp, 27'843'551, 0, 1.91, 13.40},
        {3, 96, Problem::elliptic, 27'843'551, 0, 1.72, 3.55},
    };
    Stopwatch clock;
    bool      ok = true;
    for (const auto& row : rows)
    {
        Stopwatch  t;
        const auto r = bench(base_config(), row.d, row.p, row.n, 1);
        const bool mem_ok = r.mem_A == row.mem_a;
        const bool dogip_ok = row.mem_dogip == 0 || r.mem_A_dogip == row.mem_dogip;
        const bool eff_ok = std::abs(r.memory_efficiency - row.mem_eff) <= 0.01 + 1e-12 &&
                            std::abs(r.computational_efficiency - row.comp_eff) <= 0.01 + 1e-12;
        const bool pass = mem_ok && dogip_ok && eff_ok;
        ok = ok && pass;
        detail(fmt("%s d=%d N=%d k=1 %-8s mem A %lld (want %lld) mem A^DoGIP %lld  eff %.4f/%.4f (want %.2f/%.2f)  %.1f s",
                   pass ? "ok  " : "BAD ", row.d, row.n, std::string(to_string(row.p)).c_str(), static_cast<long long>(r.mem_A),
                   static_cast<long long>(row.mem_a), static_cast<long long>(r.mem_A_dogip), r.memory_efficiency,
                   r.computational_efficiency, row.mem_eff, row.comp_eff, t.seconds()));
    }
    const double rss = peak_rss_mb();
    ok = ok && rss < 2048;
    return {ok, fmt("k=1 rows at 2D N=1200 and 3D N=96, peak RSS %.0f MB (< 2048), %.1f s", rss, clock.seconds())};
}

Outcome dof_counts()
{
    Stopwatch clock;
    bool      ok = true;
    auto      ipow_ll = [](long long b, int e) {
        long long r = 1;
        while (e-- > 0)
            r *= b;
        return r;
    };
    const std::map<int, int> n2{{1, 1200}, {2, 600}, {3, 400}, {4, 300}, {5, 240}, {6, 200}, {8, 150}};
    const std::map<int, int> n3{{1, 96}, {2, 48}, {3, 32}, {4, 24}};
    for (const auto& [k, n] : n2)
        ok = ok && ipow_ll(static_cast<long long>(k) * n + 1, 2) == 1'442'401;
    for (const auto& [k, n] : n3)
        ok = ok && ipow_ll(static_cast<long long>(k) * n + 1, 3) == 912'673;

    // constructed spaces agree with the formula
    int built = 0;
    for (int n = 1; n <= 3; ++n)
    {
        const auto m2 = build_structured_mesh<2>(n);
        for (int k = 1; k <= kmax(2); ++k, ++built)
            ok = ok && build_continuous_dofmap(m2, k).dim() == ipow_ll(k * n + 1, 2);
        const auto m3 = build_structured_mesh<3>(n);
        for (int k = 1; k <= kmax(3); ++k, ++built)
            ok = ok && build_continuous_dofmap(m3, k).dim() == ipow_ll(k * n + 1, 3);
    }
    const auto big2 = build_continuous_dofmap(build_structured_mesh<2>(600), 2).dim();
    const auto big3 = build_continuous_dofmap(build_structured_mesh<3>(32), 3).dim();
    ok = ok && big2 == 1'442'401 && big3 == 912'673;
    ++built;
    ++built;
    return {ok, fmt("(kN+1)^d = 1442401 / 912673 for all table pairs; %d constructed spaces match, incl. 2D (600,2) -> %lld and 3D (32,3) "
                    "-> %lld, %.1f s",
                    built, static_cast<long long>(big2), static_cast<long long>(big3), clock.seconds())};
}

template <int D>
Real rule_error(const QuadratureRule<D>& rule)
{
    Real worst = 0;
    for (int total = 0; total <= rule.degree; ++total)
        for (const auto& alpha : simplex_lattice<D>(total))
        {
            long double q = 0;
            for (std::size_t p = 0; p < rule.points.size(); ++p)
            {
                long double v = rule.weights[p];
                for (int i = 0; i < D; ++i)
                    v *= std::pow(static_cast<long double>(rule.points[p][i]), alpha[i]);
                q += v;
            }
            const auto exact = static_cast<long double>(oracle::monomial_moment<D>(alpha));
            worst = std::max(worst, static_cast<Real>(std::abs(q - exact) / exact));
        }
    return worst;
}

// Every rule degree requested by assembly, the verify sweep and load vectors.
std::set<int> degrees_in_use(int d)
{
    std::set<int> out;
    for (int k = 1; k <= kmax(d); ++k)
        for (int c = 0; c <= d; ++c)
        {
            out.insert(wp_rule_degree(k, c));
            out.insert(elliptic_rule_degree(k, c));
            out.insert(k + c);
        }
    return out;
}

Outcome quadrature_exactness()
{
    Stopwatch clock;
    Real      worst = 0;
    int       rules = 0;
    for (int deg : degrees_in_use(2))
    {
        const auto rule = grundmann_moller<2>(deg);
        worst = std::max(worst, rule.degree >= deg ? rule_error(rule) : Real(1));
        ++rules;
    }
    for (int deg : degrees_in_use(3))
    {
        const auto rule = grundmann_moller<3>(deg);
        worst = std::max(worst, rule.degree >= deg ? rule_error(rule) : Real(1));
        ++rules;
    }
    return {worst <= 1e-12, fmt("%d rules, every monomial up to the rule degree, max rel error %.2e <= 1e-12, %.1f s", rules, worst,
                                clock.seconds())};
}

Outcome metric_consistency()
{
    Stopwatch clock;
    bool      ok = true;
    int       pairs = 0;
    for (int d : {2, 3})
        for (Problem p : {Problem::wp, Problem::elliptic})
            for (int k : table_orders(d))
            {
                const auto a = bench(base_config(), d, p, 2, k), b = bench(base_config(), d, p, 4, k);
                ++pairs;
                const bool same = a.mem_A_T == b.mem_A_T && a.mem_A_dogip_T == b.mem_A_dogip_T && a.nnz_Bhat == b.nnz_Bhat &&
                                  a.nnz_pm1_Bhat == b.nnz_pm1_Bhat && a.w_T == b.w_T;
                bool formulas = true;
                for (const auto& r : {a, b})
                {
                    const Real mem = static_cast<Real>(r.mem_A_dogip) / static_cast<Real>(r.mem_A);
                    const Real comp = static_cast<Real>((2 * (r.nnz_Bhat - r.nnz_pm1_Bhat) + r.mem_A_dogip_T) * r.num_elements) /
                                      static_cast<Real>(r.nnz_A);
                    formulas = formulas && mem == r.memory_efficiency && comp == r.computational_efficiency &&
                               r.mem_A == 2 * r.nnz_A + r.dim_v && r.mem_A_dogip == r.mem_A_dogip_T * r.num_elements;
                }
                if (!same || !formulas)
                    detail(fmt("d=%d %s k=%d: per-element %s, formulas %s", d, std::string(to_string(p)).c_str(), k, same ? "ok" : "DIFFER",
                               formulas ? "ok" : "MISMATCH"));
                ok = ok && same && formulas;
            }
    return {ok, fmt("%d (d, problem, k) pairs: per-element fields equal for N=2 and N=4, efficiencies recomputed exactly, %.1f s", pairs,
                    clock.seconds())};
}

std::string poly_of_degree(int d, int k)
{
    switch (k)
    {
    case 1: return d == 2 ? "1+x-2*y" : "1+x-2*y+0.5*z";
    case 2: return "1+x*y-x*x" + std::string(d == 3 ? "+y*z" : "");
    default: return "2+x*x*y-y*y*y" + std::string(d == 3 ? "+x*y*z" : "");
    }
}

Outcome functional_correctness()
{
    Stopwatch clock;
    Real      proj = 0, harmonic = 0, agree = 0;
    bool      converged = true;
    for (int d : {2, 3})
        for (int k = 1; k <= (d == 2 ? 3 : 2); ++k)
        {
            const int n = d == 2 ? 4 : 2;
            auto      cfg = base_config();
            cfg.f = poly_of_degree(d, k);
            cfg.exact = cfg.f;
            cfg.cg_tolerance = 1e-13;
            const auto wp = d == 2 ? solve_case<2>(cfg, Problem::wp, n, k) : solve_case<3>(cfg, Problem::wp, n, k);
            for (const auto& s : wp)
            {
                converged = converged && s.result.status == CgStatus::converged;
                proj = std::max(proj, s.max_nodal_error);
            }

            cfg = base_config();
            cfg.dirichlet = "x";
            cfg.exact = "x";
            cfg.cg_tolerance = 1e-13;
            const auto ell = d == 2 ? solve_case<2>(cfg, Problem::elliptic, n, k) : solve_case<3>(cfg, Problem::elliptic, n, k);
            for (const auto& s : ell)
            {
                converged = converged && s.result.status == CgStatus::converged;
                harmonic = std::max(harmonic, s.max_nodal_error);
            }

            for (Problem p : {Problem::wp, Problem::elliptic})
            {
                cfg = base_config();
                cfg.f = "1+x*y";
                cfg.m = "1+x";
                cfg.M = d == 2 ? "diag:1,2" : "diag:1,2,3";
                const auto both = d == 2 ? solve_case<2>(cfg, p, n, k) : solve_case<3>(cfg, p, n, k);
                converged = converged && both[0].result.status == CgStatus::converged && both[1].result.status == CgStatus::converged;
                agree = std::max(agree, oracle::max_abs_diff(both[0].result.x, both[1].result.x));
            }
        }
    const bool ok = converged && proj <= 1e-9 && harmonic <= 1e-9 && agree <= 1e-8;
    return {ok, fmt("projection of P_k data err %.1e <= 1e-9, harmonic u=x err %.1e <= 1e-9, CSR vs DoGIP %.1e <= 1e-8%s, %.1f s", proj,
                    harmonic, agree, converged ? "" : " (CG did not converge)", clock.seconds())};
}

template <int D>
void basis_properties(Real& delta, Real& unity, Real& grad_sum, Real& fd)
{
    for (int k = 1; k <= kmax(D); ++k)
    {
        const auto basis = build_lagrange_basis<D>(k);
        const Eigen::MatrixXd at_nodes = basis.eval(basis.nodes());
        delta = std::max(delta, (at_nodes - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff());

        const auto wp = build_interp_wp<D>(k);
        unity = std::max(unity, (wp->B.rowwise().sum().array() - 1).abs().maxCoeff());
        const auto& g = build_interp_elliptic<D>(k)->B;
        for (Index r = 0; r < g.extent(0); ++r)
            for (Index i = 0; i < g.extent(1); ++i)
            {
                Real s = 0;
                for (Index l = 0; l < g.extent(2); ++l)
                    s += g(r, i, l);
                grad_sum = std::max(grad_sum, std::abs(s));
            }

        const auto pts = oracle::random_interior_points<D>(5, 700 + k);
        const auto grad = basis.eval_grad(pts);
        const Real h = 1e-6;
        for (std::size_t p = 0; p < pts.size(); ++p)
            for (int r = 0; r < D; ++r)
            {
                std::vector<Point<D>> pm{pts[p], pts[p]};
                pm[0][r] += h;
                pm[1][r] -= h;
                const Eigen::MatrixXd v = basis.eval(pm);
                for (Index i = 0; i < basis.size(); ++i)
                    fd = std::max(fd, std::abs((v(0, i) - v(1, i)) / (2 * h) - grad(static_cast<Index>(p), i, r)));
            }
    }
}

Outcome basis_interpolation()
{
    Stopwatch clock;
    Real      delta = 0, unity = 0, grad_sum = 0, fd = 0;
    basis_properties<2>(delta, unity, grad_sum, fd);
    basis_properties<3>(delta, unity, grad_sum, fd);
    const bool ok = delta <= 1e-8 && unity <= 1e-12 && grad_sum <= 1e-10 && fd <= 1e-6;
    return {ok, fmt("k<=8 (2D), k<=4 (3D): delta %.1e, WP row sums-1 %.1e, gradient row sums %.1e, FD mismatch %.1e <= 1e-6, %.1f s",
                    delta, unity, grad_sum, fd, clock.seconds())};
}

} // namespace

int main(int argc, char** argv)
{
    const std::map<int, std::pair<const char*, Outcome (*)()>> criteria{
        {1, {"decomposition identity", decomposition_identity}},
        {2, {"per-element table columns", table_columns}},
        {3, {"full-scale k=1 rows", full_scale_rows}},
        {4, {"dof counts", dof_counts}},
        {5, {"quadrature exactness", quadrature_exactness}},
        {6, {"metric self-consistency", metric_consistency}},
        {7, {"functional correctness", functional_correctness}},
        {8, {"basis and interpolation properties", basis_interpolation}},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (const auto& [id, _] : criteria)
            selected.push_back(id);

    bool all = true;
    for (int id : selected)
    {
        const auto it = criteria.find(id);
        if (it == criteria.end())
        {
            std::cerr << "unknown criterion " << id << '\n';
            return 2;
        }
        Outcome o;
        try
        {
            o = it->second.second();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << it->second.first << "): " << o.summary << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
