#pragma once

/// @file lattice.hpp
/// Integer lattices on the reference simplex.
///
/// The order-k lattice holds every multi-index alpha in N^Dim with
/// |alpha| <= k; the matching reference point is alpha / k. The barycentric
/// form prepends lambda_0 = k - |alpha|. Ordering is lexicographic with the
/// first coordinate running fastest.

#include "dogip/core.hpp"

#include <numeric>
#include <vector>

namespace dogip
{

template <int Dim>
using MultiIndex = std::array<int, Dim>;

template <int Dim>
std::vector<MultiIndex<Dim>> simplex_lattice(int order)
{
    check_dimension<Dim>();
    std::vector<MultiIndex<Dim>> out;
    out.reserve(static_cast<std::size_t>(polynomial_space_dim(Dim, order)));
    if constexpr (Dim == 2)
    {
        for (int j = 0; j <= order; ++j)
            for (int i = 0; i + j <= order; ++i)
                out.push_back({i, j});
    }
    else
    {
        for (int l = 0; l <= order; ++l)
            for (int j = 0; j + l <= order; ++j)
                for (int i = 0; i + j + l <= order; ++i)
                    out.push_back({i, j, l});
    }
    return out;
}

/// Barycentric integer coordinates (lambda_0, ..., lambda_Dim) summing to order.
template <int Dim>
std::array<int, Dim + 1> barycentric_index(const MultiIndex<Dim>& alpha, int order)
{
    std::array<int, Dim + 1> lam{};
    lam[0] = order - std::accumulate(alpha.begin(), alpha.end(), 0);
    for (int i = 0; i < Dim; ++i)
        lam[i + 1] = alpha[i];
    return lam;
}

/// Reference coordinates of the order-k lattice; order 0 gives the barycentre.
template <int Dim>
std::vector<Point<Dim>> reference_nodes(int order)
{
    check_dimension<Dim>();
    require(order >= 0, ErrorCode::invalid_argument, "polynomial order must be non-negative");
    std::vector<Point<Dim>> nodes;
    if (order == 0)
    {
        nodes.push_back(Point<Dim>::Constant(Real(1) / (Dim + 1)));
        return nodes;
    }
    for (const auto& alpha : simplex_lattice<Dim>(order))
    {
        Point<Dim> p;
        for (int i = 0; i < Dim; ++i)
            p[i] = Real(alpha[i]) / order;
        nodes.push_back(p);
    }
    return nodes;
}

/// Barycentric coordinates of a reference point.
template <int Dim>
std::array<Real, Dim + 1> barycentric(const Point<Dim>& x)
{
    std::array<Real, Dim + 1> lam{};
    lam[0] = Real(1) - x.sum();
    for (int i = 0; i < Dim; ++i)
        lam[i + 1] = x[i];
    return lam;
}

} // namespace dogip
