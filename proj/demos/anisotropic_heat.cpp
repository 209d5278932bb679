// Stationary heat conduction with a rotated anisotropic conductivity on a
// distorted mesh of the unit square, solved twice: once with the assembled
// CSR matrix and once with the matrix-free DoGIP operator.
//
//   anisotropic_heat [N] [k]     (defaults: 64 3)

#include "dogip/assembly.hpp"
#include "dogip/operator.hpp"
#include "dogip/solver.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

using namespace dogip;

int main(int argc, char** argv)
{
    const int n = argc > 1 ? std::atoi(argv[1]) : 64;
    const int k = argc > 2 ? std::atoi(argv[2]) : 3;

    auto mesh = build_structured_mesh<2>(n);
    perturb_interior_vertices(mesh, 0.2, 7);
    auto dofs = std::make_shared<const DofMap<2>>(build_continuous_dofmap(mesh, k));

    // conductivity 1 along a 30 degree axis, 0.01 across it
    const auto M = TensorField<2>::rotated({1.0, 0.01}, 0.5235987755982988);
    const auto rule = grundmann_moller<2>(elliptic_rule_degree(k, M.degree()));

    const auto a = assemble_elliptic_matrix(mesh, *dofs, M, rule);
    const auto op = build_elliptic_dogip(mesh, dofs, M, rule);

    // unit heat source, cold boundary
    const auto b = assemble_rhs(mesh, *dofs, [](const Point<2>&) { return 1.0; }, grundmann_moller<2>(k));
    BcSpec     bc;
    for (Index i : dofs->boundary_dofs())
    {
        bc.indices.push_back(i);
        bc.values.push_back(0.0);
    }

    std::printf("N=%d k=%d: %lld elements, %lld unknowns\n", n, k, static_cast<long long>(mesh.num_elements()),
                static_cast<long long>(dofs->dim()));
    std::printf("stored numbers: CSR %lld, DoGIP %lld\n", static_cast<long long>(a.memory()),
                static_cast<long long>(op.stored_entries_per_element() * mesh.num_elements()));

    std::vector<Real> x[2];
    const char*       names[2] = {"csr", "dogip"};
    for (int path = 0; path < 2; ++path)
    {
        const auto lin = path == 0 ? make_operator(a) : make_operator(op);
        const auto sys = apply_dirichlet(lin, b, bc);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = cg_solve(sys.op, sys.rhs, 1e-10, 20 * lin.dim, sys.lift);
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        Real       peak = 0;
        for (Real v : r.x)
            peak = std::max(peak, v);
        std::printf("%-6s %-14s %5d iterations  %8.1f ms  max temperature %.6f\n", names[path], std::string(to_string(r.status)).c_str(),
                    r.iterations, ms, peak);
        x[path] = r.x;
    }

    Real diff = 0;
    for (std::size_t i = 0; i < x[0].size(); ++i)
        diff = std::max(diff, std::abs(x[0][i] - x[1][i]));
    std::printf("max |x_csr - x_dogip| = %.2e\n", diff);
    return diff <= 1e-6 ? 0 : 1;
}
