#include "dogip/dofmap.hpp"
#include "dogip/reference_element.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

using namespace dogip;
using Catch::Approx;

namespace
{

template <int D>
void check_continuous(int n, int k)
{
    auto mesh = build_structured_mesh<D>(n);
    const auto dofs = build_continuous_dofmap(mesh, k);
    CHECK(dofs.dim() == ipow(k * n + 1, D));
    CHECK(dofs.local_size() == binomial(k + D, D));

    const auto nodes = reference_nodes<D>(k);
    std::vector<char> seen(static_cast<std::size_t>(dofs.dim()), 0);
    for (Index t = 0; t < mesh.num_elements(); ++t)
    {
        const auto l = dofs.element_dofs(t);
        std::set<Index> unique(l.begin(), l.end());
        CHECK(unique.size() == l.size());
        const auto map = affine_map(mesh, t);
        for (std::size_t i = 0; i < l.size(); ++i)
        {
            CHECK((dofs.coord(l[i]) - map(nodes[i])).norm() <= 1e-12);
            seen[static_cast<std::size_t>(l[i])] = 1;
        }
    }
    CHECK(std::count(seen.begin(), seen.end(), 1) == dofs.dim());

    // shared facets: the physical position of each DOF determines its index
    std::map<std::vector<long>, Index> by_position;
    for (Index t = 0; t < mesh.num_elements(); ++t)
    {
        const auto map = affine_map(mesh, t);
        const auto l = dofs.element_dofs(t);
        for (std::size_t i = 0; i < l.size(); ++i)
        {
            const Point<D>    x = map(nodes[i]);
            std::vector<long> key;
            for (int a = 0; a < D; ++a)
                key.push_back(std::lround(x[a] * n * k));
            const auto [it, inserted] = by_position.emplace(key, l[i]);
            if (!inserted)
                CHECK(it->second == l[i]);
        }
    }
    CHECK(static_cast<Index>(by_position.size()) == dofs.dim());
}

} // namespace

TEST_CASE("continuous map: counts, injectivity, conformity", "[dofmap]")
{
    for (int n = 1; n <= 4; ++n)
        for (int k = 1; k <= 4; ++k)
        {
            check_continuous<2>(n, k);
            check_continuous<3>(n, k);
        }
}

TEST_CASE("continuous map dimensions", "[dofmap]")
{
    CHECK(build_continuous_dofmap(build_structured_mesh<2>(1), 2).dim() == 9);
    CHECK(build_continuous_dofmap(build_structured_mesh<2>(1200), 1).dim() == 1'442'401);
    CHECK(build_continuous_dofmap(build_structured_mesh<3>(96), 1).dim() == 912'673);
}

TEST_CASE("continuous map numbering is lexicographic", "[dofmap]")
{
    const auto dofs = build_continuous_dofmap(build_structured_mesh<2>(2), 2);
    for (Index i = 0; i < dofs.dim(); ++i)
    {
        const auto p = dofs.lattice_position(i);
        CHECK(i == p[0] + 5 * p[1]);
    }
    const auto b = dofs.boundary_dofs();
    CHECK(b.size() == 16);
}

TEST_CASE("continuous map on a perturbed mesh", "[dofmap]")
{
    auto mesh = build_structured_mesh<3>(3);
    perturb_interior_vertices(mesh, 0.2, 1);
    const auto dofs = build_continuous_dofmap(mesh, 2);
    CHECK(dofs.dim() == 343);
    const auto nodes = reference_nodes<3>(2);
    for (Index t = 0; t < mesh.num_elements(); ++t)
    {
        const auto map = affine_map(mesh, t);
        const auto l = dofs.element_dofs(t);
        for (std::size_t i = 0; i < l.size(); ++i)
            CHECK((dofs.coord(l[i]) - map(nodes[i])).norm() <= 1e-12);
    }
}

TEST_CASE("discontinuous map", "[dofmap]")
{
    const auto d0 = build_discontinuous_dofmap(build_structured_mesh<2>(1), 0);
    CHECK(d0.dim() == 2);
    CHECK(d0.kind() == SpaceKind::discontinuous);

    const auto d2 = build_discontinuous_dofmap(build_structured_mesh<2>(5), 2);
    CHECK(d2.dim() == 300);
    const auto d3 = build_discontinuous_dofmap(build_structured_mesh<3>(2), 1);
    CHECK(d3.dim() == 192);

    // element-major and disjoint
    for (Index t = 0; t < d2.num_elements(); ++t)
    {
        const auto l = d2.element_dofs(t);
        for (std::size_t i = 0; i < l.size(); ++i)
            CHECK(l[i] == t * 6 + static_cast<Index>(i));
    }
}

TEMPLATE_TEST_CASE_SIG("nodal interpolation reproduces global polynomials", "[dofmap]", ((int D), D), 2, 3)
{
    auto mesh = build_structured_mesh<D>(3);
    perturb_interior_vertices(mesh, 0.2, 3);
    for (int k = 1; k <= 3; ++k)
    {
        const auto dofs = build_continuous_dofmap(mesh, k);
        const auto basis = build_lagrange_basis<D>(k);
        // x^k + (y - x)^(k-1) z-free mixture, degree exactly k
        auto f = [k](const Point<D>& x) { return std::pow(x[0], k) + std::pow(x[1] - 0.3 * x[0], k - 1) + x[D - 1]; };
        std::vector<Real> u(static_cast<std::size_t>(dofs.dim()));
        for (Index i = 0; i < dofs.dim(); ++i)
            u[static_cast<std::size_t>(i)] = f(dofs.coord(i));
        const auto pts = oracle::random_interior_points<D>(10, 17);
        const auto phi = basis.eval(pts);
        for (Index t = 0; t < mesh.num_elements(); ++t)
        {
            const auto map = affine_map(mesh, t);
            const auto l = dofs.element_dofs(t);
            for (std::size_t p = 0; p < pts.size(); ++p)
            {
                Real v = 0;
                for (std::size_t i = 0; i < l.size(); ++i)
                    v += phi(p, i) * u[static_cast<std::size_t>(l[i])];
                CHECK(v == Approx(f(map(pts[p]))).margin(1e-10));
            }
        }
    }
}
