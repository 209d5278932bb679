#include "dogip/assembly.hpp"
#include "dogip/report_io.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace dogip;

namespace
{

template <int D>
EfficiencyReport report(Problem p, int n, int k, CountModel model = CountModel::values)
{
    const auto mesh = build_structured_mesh<D>(n);
    auto       dofs = std::make_shared<const DofMap<D>>(build_continuous_dofmap(mesh, k));
    Diagnostics diag;
    if (p == Problem::wp)
    {
        const auto m = ScalarField<D>::constant(1);
        const auto rule = grundmann_moller<D>(2 * k);
        const auto a = assemble_wp_matrix(mesh, *dofs, m, rule, &diag);
        return build_report(mesh, a, build_wp_dogip(mesh, dofs, m, rule), p, "1", diag.pattern_nnz, model);
    }
    const auto M = TensorField<D>::identity();
    const auto rule = grundmann_moller<D>(2 * (k - 1));
    const auto a = assemble_elliptic_matrix(mesh, *dofs, M, rule, &diag);
    return build_report(mesh, a, build_elliptic_dogip(mesh, dofs, M, rule), p, "identity", diag.pattern_nnz, model);
}

} // namespace

TEST_CASE("threshold counts", "[metrics]")
{
    // only the unit entry reaches the threshold
    CHECK(nnz_with_threshold(std::vector<Real>{1, 0, 1e-15}) == 1);
    CHECK(nnz_with_threshold(std::vector<Real>{1, -1e-14, 1e-15}) == 2);
    CHECK(nnz_with_threshold(std::vector<Real>{}) == 0);
    CHECK(nnz_with_threshold(build_interp_wp<2>(1)->values()) == 9);
    CHECK(nnz_pm1(std::vector<Real>{0.5, -1, 1, 2}) == 2);
    CHECK(nnz_pm1(build_interp_wp<2>(1)->values()) == 3);
    CHECK(nnz_pm1(build_interp_elliptic<2>(1)->values()) == 4);
}

TEST_CASE("efficiency formulas", "[metrics]")
{
    EfficiencyReport r;
    r.num_elements = 100;
    r.nnz_A = 500;
    r.mem_A = 1100;
    r.nnz_A_pattern = 600;
    r.mem_A_pattern = 1300;
    r.mem_A_dogip_T = 6;
    r.mem_A_dogip = 600;
    r.nnz_Bhat = 9;
    r.nnz_pm1_Bhat = 3;
    CHECK(memory_efficiency(r) == 600.0 / 1100);
    CHECK(computational_efficiency(r) == 1800.0 / 500);
    r.count_model = CountModel::pattern;
    CHECK(memory_efficiency(r) == 600.0 / 1300);
    CHECK(computational_efficiency(r) == 1800.0 / 600);

    CHECK(round_half_up(0.125) == 0.13);
    CHECK(round_half_up(5.135) == 5.14);
    CHECK(round_half_up(1.7159) == 1.72);
}

TEST_CASE("per-element fields", "[metrics]")
{
    struct Row
    {
        int         d, k;
        Problem     p;
        GlobalIndex mem_t, dogip_t, bhat;
    };
    const std::vector<Row> rows{{2, 1, Problem::wp, 9, 6, 9},         {2, 2, Problem::wp, 36, 15, 39},
                                {2, 1, Problem::elliptic, 9, 4, 4},   {2, 2, Problem::elliptic, 36, 24, 44},
                                {3, 1, Problem::wp, 16, 10, 16},      {3, 1, Problem::elliptic, 16, 9, 6}};
    for (const auto& row : rows)
    {
        const auto r = row.d == 2 ? report<2>(row.p, 2, row.k) : report<3>(row.p, 2, row.k);
        CHECK(r.mem_A_T == row.mem_t);
        CHECK(r.mem_A_dogip_T == row.dogip_t);
        CHECK(r.nnz_Bhat == row.bhat);
    }
}

TEMPLATE_TEST_CASE_SIG("reports are self-consistent and scale-free", "[metrics]", ((int D), D), 2, 3)
{
    for (Problem p : {Problem::wp, Problem::elliptic})
        for (int k = 1; k <= 2; ++k)
        {
            const auto r2 = report<D>(p, 2, k), r4 = report<D>(p, 4, k);
            for (const auto& r : {r2, r4})
            {
                CHECK(r.memory_efficiency == memory_efficiency(r));
                CHECK(r.computational_efficiency == computational_efficiency(r));
                CHECK(r.mem_A_dogip == r.mem_A_dogip_T * r.num_elements);
                CHECK(r.mem_A == 2 * r.nnz_A + r.dim_v);
                CHECK(r.dim_v == ipow(k * r.N + 1, D));
                CHECK(r.nnz_A <= r.nnz_A_pattern);
            }
            CHECK(r2.mem_A_T == r4.mem_A_T);
            CHECK(r2.mem_A_dogip_T == r4.mem_A_dogip_T);
            CHECK(r2.nnz_Bhat == r4.nnz_Bhat);
            CHECK(r2.nnz_pm1_Bhat == r4.nnz_pm1_Bhat);
            CHECK(r2.w_T == r4.w_T);
        }
}

TEST_CASE("pattern count model", "[metrics]")
{
    const auto values = report<2>(Problem::elliptic, 3, 2);
    const auto pattern = report<2>(Problem::elliptic, 3, 2, CountModel::pattern);
    CHECK(values.nnz_A < values.nnz_A_pattern);
    CHECK(pattern.nnz_A_pattern == values.nnz_A_pattern);
    CHECK(pattern.memory_efficiency < values.memory_efficiency);
    CHECK(pattern.memory_efficiency == static_cast<Real>(pattern.mem_A_dogip) / static_cast<Real>(pattern.mem_A_pattern));
}

TEST_CASE("report accounting requires full storage", "[metrics]")
{
    const auto mesh = build_structured_mesh<2>(2);
    auto       dofs = std::make_shared<const DofMap<2>>(build_continuous_dofmap(mesh, 1));
    const auto m = ScalarField<2>::constant(1);
    const auto rule = grundmann_moller<2>(2);
    const auto a = assemble_wp_matrix(mesh, *dofs, m, rule);
    CHECK_THROWS_AS(build_report(mesh, a, build_wp_dogip(mesh, dofs, m, rule, DogipStorage::compact), Problem::wp, "1"), Error);
}

TEST_CASE("csv and json round trips", "[metrics][io]")
{
    std::vector<EfficiencyReport> rows{report<2>(Problem::wp, 2, 2), report<3>(Problem::elliptic, 2, 1, CountModel::pattern)};
    rows[0].coefficient = "1+x, \"quoted\"";
    rows[0].mesh = "perturbed(0.2;20181)";

    CHECK(reports_from_csv(reports_to_csv(rows)) == rows);
    CHECK(reports_from_json(reports_to_json(rows)) == rows);
    CHECK(reports_from_json(nlohmann::json::parse(reports_to_json(rows).dump())) == rows);

    const auto j = reports_to_json(rows);
    for (const char* key : {"d", "N", "k", "problem", "dim_v", "mem_a", "mem_a_t", "mem_a_dogip", "mem_a_dogip_t", "nnz_bhat",
                            "nnz_pm1_bhat", "memory_efficiency", "computational_efficiency"})
        CHECK(j[0].contains(key));

    CHECK_THROWS_AS(reports_from_csv("d,N\n2"), Error);
    CHECK_THROWS_AS(reports_from_json(nlohmann::json::object()), Error);

    const auto text = reports_to_text(rows);
    CHECK(text.find("mem A") != std::string::npos);
}
