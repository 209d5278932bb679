#pragma once

/// @file mesh.hpp
/// Structured simplicial meshes of the unit square / unit cube.
///
/// Each lattice cell is split into Dim! simplices: two triangles sharing the
/// (0,0)-(1,1) diagonal in 2D, six Kuhn tetrahedra sharing the main diagonal
/// in 3D. Vertices are numbered lexicographically (x fastest). Every vertex
/// keeps its integer lattice coordinate, so topology-derived numbering stays
/// exact even after the coordinates are perturbed.

#include "dogip/core.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <vector>

namespace dogip
{

template <int Dim>
struct AffineMap
{
    Mat<Dim>   R;
    Point<Dim> S;
    Mat<Dim>   Rinv;
    Real       detR = 0;

    [[nodiscard]] Point<Dim> operator()(const Point<Dim>& xhat) const { return R * xhat + S; }
    [[nodiscard]] Real       jacobian() const { return std::abs(detR); }
};

template <int Dim>
class Mesh
{
public:
    using Element = std::array<Index, Dim + 1>;
    using Lattice = std::array<int, Dim>;

    Mesh(int n, std::vector<Point<Dim>> vertices, std::vector<Lattice> lattice, std::vector<Element> elements)
        : n_(n), vertices_(std::move(vertices)), lattice_(std::move(lattice)), elements_(std::move(elements))
    {}

    static constexpr int dim() noexcept { return Dim; }
    [[nodiscard]] int    subdivisions() const noexcept { return n_; }
    [[nodiscard]] Index  num_vertices() const noexcept { return static_cast<Index>(vertices_.size()); }
    [[nodiscard]] Index  num_elements() const noexcept { return static_cast<Index>(elements_.size()); }

    [[nodiscard]] const std::vector<Point<Dim>>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] const std::vector<Element>&    elements() const noexcept { return elements_; }
    [[nodiscard]] const Element&                 element(Index t) const { return elements_[static_cast<std::size_t>(t)]; }
    [[nodiscard]] const Point<Dim>&              vertex(Index v) const { return vertices_[static_cast<std::size_t>(v)]; }
    /// Integer coordinate of a vertex on the {0..N}^Dim lattice.
    [[nodiscard]] const Lattice& lattice_coord(Index v) const { return lattice_[static_cast<std::size_t>(v)]; }

    [[nodiscard]] bool on_boundary(Index v) const
    {
        const auto& p = lattice_coord(v);
        return std::any_of(p.begin(), p.end(), [&](int c) { return c == 0 || c == n_; });
    }

    std::vector<Point<Dim>>& mutable_vertices() noexcept { return vertices_; }

private:
    int                     n_;
    std::vector<Point<Dim>> vertices_;
    std::vector<Lattice>    lattice_;
    std::vector<Element>    elements_;
};

template <int Dim>
Mesh<Dim> build_structured_mesh(int n)
{
    check_dimension<Dim>();
    require(n >= 1, ErrorCode::invalid_size, "mesh needs at least one subdivision per axis");

    const int  np = n + 1;
    const auto vid = [np](const std::array<int, Dim>& c) {
        Index id = 0;
        for (int a = Dim - 1; a >= 0; --a)
            id = id * np + c[a];
        return id;
    };

    std::vector<Point<Dim>>            vertices;
    std::vector<std::array<int, Dim>>  lattice;
    const auto                         nv = static_cast<std::size_t>(ipow(np, Dim));
    vertices.reserve(nv);
    lattice.reserve(nv);
    for (std::size_t id = 0; id < nv; ++id)
    {
        std::array<int, Dim> c{};
        auto                 rest = id;
        for (int a = 0; a < Dim; ++a)
        {
            c[a] = static_cast<int>(rest % np);
            rest /= np;
        }
        Point<Dim> x;
        for (int a = 0; a < Dim; ++a)
            x[a] = Real(c[a]) / n;
        vertices.push_back(x);
        lattice.push_back(c);
    }

    // Kuhn simplices of the unit cell: walk from the origin corner to the far
    // corner along the axes in every order.
    std::array<int, Dim> perm{};
    for (int a = 0; a < Dim; ++a)
        perm[a] = a;
    std::vector<std::array<int, Dim>> orders;
    do
        orders.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<typename Mesh<Dim>::Element> elements;
    elements.reserve(static_cast<std::size_t>(ipow(n, Dim)) * orders.size());
    const auto ncell = static_cast<std::size_t>(ipow(n, Dim));
    for (std::size_t cell = 0; cell < ncell; ++cell)
    {
        std::array<int, Dim> base{};
        auto                 rest = cell;
        for (int a = 0; a < Dim; ++a)
        {
            base[a] = static_cast<int>(rest % n);
            rest /= n;
        }
        for (const auto& order : orders)
        {
            typename Mesh<Dim>::Element el{};
            auto                        c = base;
            el[0] = vid(c);
            for (int step = 0; step < Dim; ++step)
            {
                ++c[order[step]];
                el[step + 1] = vid(c);
            }
            if constexpr (Dim == 2)
            {
                // (0,0),(1,1),(0,1): counter-clockwise like the first triangle
                if (order[0] == 1)
                    std::swap(el[1], el[2]);
            }
            elements.push_back(el);
        }
    }
    return Mesh<Dim>(n, std::move(vertices), std::move(lattice), std::move(elements));
}

template <int Dim>
AffineMap<Dim> affine_map(const Mesh<Dim>& mesh, Index t)
{
    require(t >= 0 && t < mesh.num_elements(), ErrorCode::index_out_of_range, "element index");
    const auto&    el = mesh.element(t);
    AffineMap<Dim> map;
    map.S = mesh.vertex(el[0]);
    for (int i = 0; i < Dim; ++i)
        map.R.col(i) = mesh.vertex(el[i + 1]) - map.S;
    map.detR = map.R.determinant();
    map.Rinv = map.R.inverse();
    return map;
}

/// Moves every vertex coordinate that is not pinned to a face of the unit
/// square/cube by a uniform random offset in [-amplitude/2, amplitude/2] * h
/// (h = 1/N). Boundary vertices therefore slide within their face or edge,
/// corners stay, the domain and the lattice topology are kept. Throws if any
/// element would flip or degenerate.
template <int Dim>
void perturb_interior_vertices(Mesh<Dim>& mesh, Real amplitude, std::uint64_t seed)
{
    require(amplitude >= 0 && amplitude < 0.5, ErrorCode::invalid_argument, "perturbation amplitude must lie in [0, 0.5)");
    if (amplitude == 0)
        return;

    std::vector<Real> sign_before;
    sign_before.reserve(static_cast<std::size_t>(mesh.num_elements()));
    for (Index t = 0; t < mesh.num_elements(); ++t)
        sign_before.push_back(affine_map(mesh, t).detR);

    const Real                       h = Real(1) / mesh.subdivisions();
    std::mt19937_64                  rng(seed);
    std::uniform_real_distribution<> offset(-0.5 * amplitude * h, 0.5 * amplitude * h);
    auto&                            verts = mesh.mutable_vertices();
    const int                        n = mesh.subdivisions();
    for (Index v = 0; v < mesh.num_vertices(); ++v)
        for (int a = 0; a < Dim; ++a)
        {
            const Real delta = offset(rng);
            const int  c = mesh.lattice_coord(v)[a];
            if (c != 0 && c != n)
                verts[static_cast<std::size_t>(v)][a] += delta;
        }

    const Real cell_volume = std::pow(h, Dim);
    for (Index t = 0; t < mesh.num_elements(); ++t)
    {
        const Real det = affine_map(mesh, t).detR;
        require(det * sign_before[static_cast<std::size_t>(t)] > 0 && std::abs(det) > 1e-3 * cell_volume,
                ErrorCode::invalid_argument, "perturbation degenerates element " + std::to_string(t));
    }
}

template <int Dim>
Real total_volume(const Mesh<Dim>& mesh)
{
    Real vol = 0;
    for (Index t = 0; t < mesh.num_elements(); ++t)
        vol += affine_map(mesh, t).jacobian();
    return vol / static_cast<Real>(factorial(Dim));
}

template <int Dim>
nlohmann::json mesh_to_json(const Mesh<Dim>& mesh)
{
    nlohmann::json j;
    j["d"] = Dim;
    j["N"] = mesh.subdivisions();
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (const auto& v : mesh.vertices())
    {
        auto row = nlohmann::json::array();
        for (int a = 0; a < Dim; ++a)
            row.push_back(v[a]);
        verts.push_back(std::move(row));
    }
    auto& els = j["elements"] = nlohmann::json::array();
    for (const auto& e : mesh.elements())
        els.push_back(e);
    return j;
}

} // namespace dogip
