#pragma once

/// @file dofmap.hpp
/// Local-to-global numbering l_T for continuous and discontinuous Lagrange
/// spaces.
///
/// Continuous DOFs are keyed by their position on the global integer lattice
/// {0..kN}^Dim: the local node with barycentric index lambda on an element
/// with integer vertex coordinates p_0..p_Dim sits at sum_i lambda_i p_i.
/// Global ids are lexicographic in that lattice (x fastest), so shared nodes
/// match bit-exactly and numbering is independent of element order.

#include "dogip/lattice.hpp"
#include "dogip/mesh.hpp"

#include <span>
#include <vector>

namespace dogip
{

enum class SpaceKind
{
    continuous,
    discontinuous,
};

template <int Dim>
class DofMap
{
public:
    DofMap(SpaceKind kind, int order, Index dim, Index local_size, std::vector<Index> l, std::vector<Point<Dim>> coords,
           int lattice_extent)
        : kind_(kind), order_(order), dim_(dim), local_size_(local_size), l_(std::move(l)), coords_(std::move(coords)),
          lattice_extent_(lattice_extent)
    {}

    [[nodiscard]] SpaceKind kind() const noexcept { return kind_; }
    [[nodiscard]] int       order() const noexcept { return order_; }
    [[nodiscard]] Index     dim() const noexcept { return dim_; }
    [[nodiscard]] Index     local_size() const noexcept { return local_size_; }
    [[nodiscard]] Index     num_elements() const noexcept { return static_cast<Index>(l_.size() / static_cast<std::size_t>(local_size_)); }

    [[nodiscard]] std::span<const Index> element_dofs(Index t) const
    {
        return {l_.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(local_size_), static_cast<std::size_t>(local_size_)};
    }
    [[nodiscard]] const std::vector<Index>&      table() const noexcept { return l_; }
    [[nodiscard]] const std::vector<Point<Dim>>& coords() const noexcept { return coords_; }
    [[nodiscard]] const Point<Dim>&              coord(Index i) const { return coords_[static_cast<std::size_t>(i)]; }

    /// Global lattice position of a continuous DOF.
    [[nodiscard]] std::array<int, Dim> lattice_position(Index i) const
    {
        require(kind_ == SpaceKind::continuous, ErrorCode::invalid_argument, "lattice positions exist only for continuous spaces");
        std::array<int, Dim> g{};
        for (int a = 0; a < Dim; ++a)
        {
            g[a] = i % (lattice_extent_ + 1);
            i /= (lattice_extent_ + 1);
        }
        return g;
    }

    /// DOFs on the boundary of the unit square/cube (continuous spaces only).
    [[nodiscard]] std::vector<Index> boundary_dofs() const
    {
        std::vector<Index> out;
        for (Index i = 0; i < dim_; ++i)
        {
            const auto g = lattice_position(i);
            if (std::any_of(g.begin(), g.end(), [this](int c) { return c == 0 || c == lattice_extent_; }))
                out.push_back(i);
        }
        return out;
    }

private:
    SpaceKind               kind_;
    int                     order_;
    Index                   dim_;
    Index                   local_size_;
    std::vector<Index>      l_;
    std::vector<Point<Dim>> coords_;
    int                     lattice_extent_;
};

template <int Dim>
DofMap<Dim> build_continuous_dofmap(const Mesh<Dim>& mesh, int k)
{
    require(k >= 1, ErrorCode::invalid_argument, "continuous spaces need order >= 1");
    const int   extent = k * mesh.subdivisions();
    const auto  dim_wide = ipow(extent + 1, Dim);
    require(dim_wide <= std::numeric_limits<Index>::max(), ErrorCode::invalid_size, "DOF count exceeds the index range");
    const auto  dim = static_cast<Index>(dim_wide);
    const auto  local = simplex_lattice<Dim>(k);
    const auto  nodes = reference_nodes<Dim>(k);
    const auto  vt = static_cast<Index>(local.size());

    std::vector<Index>      l(static_cast<std::size_t>(mesh.num_elements()) * static_cast<std::size_t>(vt));
    std::vector<Point<Dim>> coords(static_cast<std::size_t>(dim));
    for (Index t = 0; t < mesh.num_elements(); ++t)
    {
        const auto& el = mesh.element(t);
        const auto  map = affine_map(mesh, t);
        for (Index j = 0; j < vt; ++j)
        {
            const auto lam = barycentric_index<Dim>(local[static_cast<std::size_t>(j)], k);
            Index      id = 0;
            for (int a = Dim - 1; a >= 0; --a)
            {
                int g = 0;
                for (int i = 0; i <= Dim; ++i)
                    g += lam[i] * mesh.lattice_coord(el[i])[a];
                id = id * (extent + 1) + g;
            }
            l[static_cast<std::size_t>(t) * vt + j] = id;
            coords[static_cast<std::size_t>(id)] = map(nodes[static_cast<std::size_t>(j)]);
        }
    }
    return DofMap<Dim>(SpaceKind::continuous, k, dim, vt, std::move(l), std::move(coords), extent);
}

template <int Dim>
DofMap<Dim> build_discontinuous_dofmap(const Mesh<Dim>& mesh, int k)
{
    require(k >= 0, ErrorCode::invalid_argument, "polynomial order must be non-negative");
    const auto nodes = reference_nodes<Dim>(k);
    const auto vt = static_cast<Index>(nodes.size());
    const auto dim_wide = static_cast<GlobalIndex>(mesh.num_elements()) * vt;
    require(dim_wide <= std::numeric_limits<Index>::max(), ErrorCode::invalid_size, "DOF count exceeds the index range");

    std::vector<Index>      l(static_cast<std::size_t>(dim_wide));
    std::vector<Point<Dim>> coords(static_cast<std::size_t>(dim_wide));
    for (Index t = 0; t < mesh.num_elements(); ++t)
    {
        const auto map = affine_map(mesh, t);
        for (Index j = 0; j < vt; ++j)
        {
            const auto id = static_cast<std::size_t>(t) * vt + j;
            l[id] = static_cast<Index>(id);
            coords[id] = map(nodes[static_cast<std::size_t>(j)]);
        }
    }
    return DofMap<Dim>(SpaceKind::discontinuous, k, static_cast<Index>(dim_wide), vt, std::move(l), std::move(coords), 0);
}

} // namespace dogip
