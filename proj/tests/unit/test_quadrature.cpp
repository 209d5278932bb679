#include "dogip/quadrature.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace dogip;
using Catch::Approx;

namespace
{

// relative error of every monomial of degree <= deg against the exact rational moment
template <int D>
Real worst_monomial_error(const QuadratureRule<D>& rule, int deg)
{
    Real worst = 0;
    for (int total = 0; total <= deg; ++total)
        for (const auto& alpha : simplex_lattice<D>(total))
        {
            if (std::accumulate(alpha.begin(), alpha.end(), 0) != total)
                continue;
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

} // namespace

TEST_CASE("low-order rules", "[quadrature]")
{
    const auto r1 = grundmann_moller<2>(1);
    REQUIRE(r1.num_points() == 1);
    CHECK(r1.weights[0] == Approx(0.5).margin(1e-15));
    CHECK((r1.points[0] - Point<2>(1.0 / 3, 1.0 / 3)).norm() <= 1e-15);

    const auto r2 = grundmann_moller<2>(2);
    Real       xx = 0;
    for (std::size_t p = 0; p < r2.points.size(); ++p)
        xx += r2.weights[p] * r2.points[p][0] * r2.points[p][0];
    CHECK(xx == Approx(1.0 / 12).margin(1e-12));

    CHECK(worst_monomial_error(grundmann_moller<3>(5), 5) <= 1e-12);
}

TEST_CASE("simplex moments", "[quadrature]")
{
    CHECK(static_cast<double>(simplex_moment<2>({2, 0})) == Approx(1.0 / 12));
    CHECK(static_cast<double>(simplex_moment<3>({1, 1, 1})) == Approx(1.0 / 720));
    for (const auto& a : simplex_lattice<3>(4))
        CHECK(static_cast<double>(simplex_moment<3>(a)) == Approx(static_cast<double>(oracle::monomial_moment<3>(a))).epsilon(1e-15));
}

// every degree requested by assembly for k up to the caps and coefficient degree up to 3
TEMPLATE_TEST_CASE_SIG("exactness sweep over the degrees in use", "[quadrature]", ((int D), D), 2, 3)
{
    const int kmax = D == 2 ? 8 : 4;
    for (int deg = 0; deg <= 2 * kmax + 3; ++deg)
    {
        const auto rule = grundmann_moller<D>(deg);
        CHECK(rule.degree >= deg);
        INFO("degree " << deg);
        CHECK(worst_monomial_error(rule, deg) <= 1e-12);
        CHECK(max_moment_error(rule) <= 1e-12);
        const Real sum = std::accumulate(rule.weights.begin(), rule.weights.end(), Real(0));
        CHECK(sum == Approx(1.0 / factorial(D)).margin(1e-13));
    }
}

TEST_CASE("negative weights are reported", "[quadrature]")
{
    // the family has negative weights from degree 3 on; exactness is unaffected
    CHECK_FALSE(grundmann_moller<2>(1).has_negative_weights());
    CHECK(grundmann_moller<2>(3).has_negative_weights());
}

TEST_CASE("integration on physical elements", "[quadrature]")
{
    Mesh<2> ref(1, {Point<2>(0, 0), Point<2>(1, 0), Point<2>(0, 1)}, {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    const auto rule = grundmann_moller<2>(4);
    CHECK(integrate_on_element(rule, affine_map(ref, 0), [](const Point<2>& x) { return x[0]; }) == Approx(1.0 / 6).margin(1e-14));

    Mesh<2> tri(1, {Point<2>(0, 0), Point<2>(1, 0), Point<2>(1, 1)}, {{0, 0}, {1, 0}, {1, 1}}, {{0, 1, 2}});
    CHECK(integrate_on_element(rule, affine_map(tri, 0), [](const Point<2>& x) { return x[0] * x[1]; }) ==
          Approx(1.0 / 8).margin(1e-12));

    auto mesh = build_structured_mesh<3>(2);
    perturb_interior_vertices(mesh, 0.3, 2);
    for (Index t = 0; t < mesh.num_elements(); ++t)
    {
        const auto map = affine_map(mesh, t);
        CHECK(integrate_on_element(grundmann_moller<3>(1), map, [](const Point<3>&) { return 1.0; }) ==
              Approx(map.jacobian() / 6).margin(1e-15));
    }
}

TEST_CASE("rule construction errors", "[quadrature]")
{
    CHECK_THROWS_AS(grundmann_moller<2>(-1), Error);
}
