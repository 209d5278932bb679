#pragma once

/// @file reference_element.hpp
/// Lagrange P_k bases on the reference simplex conv{0, e_1, ..., e_Dim} and the
/// reference interpolation tables that map primal nodal values onto a
/// double-grid lattice.
///
/// Runtime evaluation goes through a generalized Vandermonde matrix expressed
/// in the orthonormal collapsed-coordinate (Dubiner) basis. The interpolation
/// tables are instead evaluated in exact rational arithmetic from the
/// barycentric product form of the equispaced Lagrange basis: their entries
/// sit on lattice points where many values vanish exactly, and nnz counts
/// must not depend on round-off.

#include "dogip/lattice.hpp"
#include "dogip/tensor.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace dogip
{

namespace detail
{

/// Orthonormal Jacobi polynomial P_n^{(a,b)} on [-1, 1].
inline Real jacobi(Real x, Real a, Real b, int n)
{
    const Real gamma0 = std::pow(2.0, a + b + 1) / (a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1)
                      / std::tgamma(a + b + 1);
    Real p0 = 1 / std::sqrt(gamma0);
    if (n == 0)
        return p0;
    const Real gamma1 = (a + 1) * (b + 1) / (a + b + 3) * gamma0;
    Real       p1 = ((a + b + 2) * x / 2 + (a - b) / 2) / std::sqrt(gamma1);
    Real       aold = 2 / (2 + a + b) * std::sqrt((a + 1) * (b + 1) / (a + b + 3));
    for (int i = 1; i < n; ++i)
    {
        const Real h1 = 2 * i + a + b;
        const Real anew = 2 / (h1 + 2) * std::sqrt((i + 1) * (i + 1 + a + b) * (i + 1 + a) * (i + 1 + b) / (h1 + 1) / (h1 + 3));
        const Real bnew = -(a * a - b * b) / h1 / (h1 + 2);
        const Real p2 = (-aold * p0 + (x - bnew) * p1) / anew;
        p0 = p1;
        p1 = p2;
        aold = anew;
    }
    return p1;
}

inline Real jacobi_derivative(Real x, Real a, Real b, int n)
{
    if (n == 0)
        return 0;
    return std::sqrt(n * (n + a + b + 1)) * jacobi(x, a + 1, b + 1, n - 1);
}

inline Real pow_int(Real base, int e)
{
    Real r = 1;
    for (int i = 0; i < e; ++i)
        r *= base;
    return r;
}

/// Value and gradient (w.r.t. unit-simplex coordinates) of one orthonormal mode.
template <int Dim>
struct ModeValue
{
    Real       value;
    Point<Dim> grad;
};

inline ModeValue<2> dubiner_mode(const Point<2>& x, const MultiIndex<2>& mode)
{
    const Real r = 2 * x[0] - 1, s = 2 * x[1] - 1;
    Real       a = (std::abs(1 - s) > 1e-15) ? 2 * (1 + r) / (1 - s) - 1 : -1;
    a = std::clamp(a, Real(-1), Real(1));
    const Real b = s;
    const int  i = mode[0], j = mode[1];

    const Real fa = jacobi(a, 0, 0, i), dfa = jacobi_derivative(a, 0, 0, i);
    const Real gb = jacobi(b, 2 * i + 1, 0, j), dgb = jacobi_derivative(b, 2 * i + 1, 0, j);
    const Real hb = 0.5 * (1 - b);

    Real dr = dfa * gb;
    Real ds = dfa * gb * 0.5 * (1 + a);
    if (i > 0)
    {
        dr *= pow_int(hb, i - 1);
        ds *= pow_int(hb, i - 1);
    }
    Real tmp = dgb * pow_int(hb, i);
    if (i > 0)
        tmp -= 0.5 * i * gb * pow_int(hb, i - 1);
    ds += fa * tmp;

    const Real scale = std::pow(2.0, i + 0.5);
    ModeValue<2> out;
    out.value = scale * fa * gb * pow_int(hb, i);
    // d/dx = 2 d/dr on the unit simplex
    out.grad = Point<2>(2 * scale * dr, 2 * scale * ds);
    return out;
}

inline ModeValue<3> dubiner_mode(const Point<3>& x, const MultiIndex<3>& mode)
{
    const Real r = 2 * x[0] - 1, s = 2 * x[1] - 1, t = 2 * x[2] - 1;
    Real       a = (std::abs(s + t) > 1e-15) ? 2 * (1 + r) / (-s - t) - 1 : -1;
    Real       b = (std::abs(1 - t) > 1e-15) ? 2 * (1 + s) / (1 - t) - 1 : -1;
    a = std::clamp(a, Real(-1), Real(1));
    b = std::clamp(b, Real(-1), Real(1));
    const Real c = t;
    const int  i = mode[0], j = mode[1], l = mode[2];

    const Real fa = jacobi(a, 0, 0, i), dfa = jacobi_derivative(a, 0, 0, i);
    const Real gb = jacobi(b, 2 * i + 1, 0, j), dgb = jacobi_derivative(b, 2 * i + 1, 0, j);
    const Real hc = jacobi(c, 2 * (i + j) + 2, 0, l), dhc = jacobi_derivative(c, 2 * (i + j) + 2, 0, l);
    const Real hb = 0.5 * (1 - b), hcc = 0.5 * (1 - c);

    Real dr = dfa * gb * hc;
    if (i > 0)
        dr *= pow_int(hb, i - 1);
    if (i + j > 0)
        dr *= pow_int(hcc, i + j - 1);

    Real ds = 0.5 * (1 + a) * dr;
    Real tmp = dgb * pow_int(hb, i);
    if (i > 0)
        tmp += -0.5 * i * gb * pow_int(hb, i - 1);
    if (i + j > 0)
        tmp *= pow_int(hcc, i + j - 1);
    tmp = fa * tmp * hc;
    ds += tmp;

    Real dt = 0.5 * (1 + a) * dr + 0.5 * (1 + b) * tmp;
    tmp = dhc * pow_int(hcc, i + j);
    if (i + j > 0)
        tmp -= 0.5 * (i + j) * hc * pow_int(hcc, i + j - 1);
    tmp = fa * gb * tmp * pow_int(hb, i);
    dt += tmp;

    const Real scale = std::pow(2.0, 2 * i + j + 1.5);
    ModeValue<3> out;
    out.value = scale * fa * gb * pow_int(hb, i) * hc * pow_int(hcc, i + j);
    out.grad = Point<3>(2 * scale * dr, 2 * scale * ds, 2 * scale * dt);
    return out;
}

template <int Dim>
bool inside_reference_simplex(const Point<Dim>& x, Real tol = 1e-12)
{
    const auto lam = barycentric<Dim>(x);
    return std::all_of(lam.begin(), lam.end(), [tol](Real l) { return l >= -tol; });
}

template <int Dim>
void check_points(std::span<const Point<Dim>> points)
{
    for (const auto& p : points)
        require(inside_reference_simplex<Dim>(p), ErrorCode::point_outside_simplex, "evaluation point outside the reference simplex");
}

} // namespace detail

/// Intended use of a basis; double-grid bases may go to twice the primal cap.
enum class BasisRole
{
    primal,
    double_grid,
};

template <int Dim>
constexpr int max_primal_order() noexcept
{
    return Dim == 2 ? 8 : 4;
}

inline constexpr Real max_vandermonde_condition = 1e12;

/// Nodal Lagrange basis phi_j(x_i) = delta_ij on the equispaced lattice.
template <int Dim>
class ReferenceBasis
{
public:
    ReferenceBasis(int order, std::vector<Point<Dim>> nodes, std::vector<MultiIndex<Dim>> modes, Eigen::MatrixXd coeffs,
                   Real condition)
        : order_(order), nodes_(std::move(nodes)), modes_(std::move(modes)), coeffs_(std::move(coeffs)), condition_(condition)
    {}

    [[nodiscard]] int   order() const noexcept { return order_; }
    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(nodes_.size()); }
    [[nodiscard]] const std::vector<Point<Dim>>& nodes() const noexcept { return nodes_; }
    /// Column j holds phi_j in the orthonormal modal basis.
    [[nodiscard]] const Eigen::MatrixXd& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] Real vandermonde_condition() const noexcept { return condition_; }

    /// Phi(p, i) = phi_i(points[p]).
    [[nodiscard]] Eigen::MatrixXd eval(std::span<const Point<Dim>> points) const
    {
        detail::check_points<Dim>(points);
        Eigen::MatrixXd modal(static_cast<Index>(points.size()), size());
        for (Index p = 0; p < static_cast<Index>(points.size()); ++p)
            for (Index m = 0; m < size(); ++m)
                modal(p, m) = detail::dubiner_mode(points[static_cast<std::size_t>(p)], modes_[static_cast<std::size_t>(m)]).value;
        return modal * coeffs_;
    }

    /// G(p, i, r) = d phi_i / d xhat_r at points[p].
    [[nodiscard]] Tensor3 eval_grad(std::span<const Point<Dim>> points) const
    {
        detail::check_points<Dim>(points);
        const auto                   np = static_cast<Index>(points.size());
        std::array<Eigen::MatrixXd, Dim> modal;
        for (auto& m : modal)
            m.resize(np, size());
        for (Index p = 0; p < np; ++p)
            for (Index m = 0; m < size(); ++m)
            {
                const auto mv = detail::dubiner_mode(points[static_cast<std::size_t>(p)], modes_[static_cast<std::size_t>(m)]);
                for (int r = 0; r < Dim; ++r)
                    modal[r](p, m) = mv.grad[r];
            }
        Tensor3 out(np, size(), Dim);
        for (int r = 0; r < Dim; ++r)
        {
            const Eigen::MatrixXd g = modal[r] * coeffs_;
            for (Index p = 0; p < np; ++p)
                for (Index i = 0; i < size(); ++i)
                    out(p, i, r) = g(p, i);
        }
        return out;
    }

private:
    int                          order_;
    std::vector<Point<Dim>>      nodes_;
    std::vector<MultiIndex<Dim>> modes_;
    Eigen::MatrixXd              coeffs_;
    Real                         condition_;
};

template <int Dim>
ReferenceBasis<Dim> build_lagrange_basis(int order, BasisRole role = BasisRole::primal)
{
    check_dimension<Dim>();
    const int cap = max_primal_order<Dim>() * (role == BasisRole::double_grid ? 2 : 1);
    require(order >= 0 && order <= cap, ErrorCode::invalid_argument,
            "order " + std::to_string(order) + " outside the supported range [0, " + std::to_string(cap) + "]");

    auto nodes = reference_nodes<Dim>(order);
    auto modes = simplex_lattice<Dim>(order);
    const auto n = static_cast<Index>(nodes.size());

    Eigen::MatrixXd vandermonde(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index m = 0; m < n; ++m)
            vandermonde(i, m) = detail::dubiner_mode(nodes[static_cast<std::size_t>(i)], modes[static_cast<std::size_t>(m)]).value;

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(vandermonde);
    const auto& sv = svd.singularValues();
    const Real  condition = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : std::numeric_limits<Real>::infinity();
    require(condition <= max_vandermonde_condition, ErrorCode::ill_conditioned_basis,
            "Vandermonde condition " + std::to_string(condition) + " at order " + std::to_string(order));

    Eigen::MatrixXd coeffs = vandermonde.partialPivLu().inverse();
    return ReferenceBasis<Dim>(order, std::move(nodes), std::move(modes), std::move(coeffs), condition);
}

// ---------------------------------------------------------------------------
// Exact interpolation tables
// ---------------------------------------------------------------------------

using Rational = boost::multiprecision::cpp_rational;

namespace detail
{

/// f_a(lambda) = prod_{j<a} (k lambda - j) / (j + 1), the 1D factor of the
/// barycentric product form of the order-k equispaced Lagrange basis.
inline Rational silvester_factor(int a, int k, const Rational& lambda)
{
    Rational v = 1;
    for (int j = 0; j < a; ++j)
        v *= (k * lambda - j) / Rational(j + 1);
    return v;
}

inline Rational silvester_factor_derivative(int a, int k, const Rational& lambda)
{
    Rational total = 0;
    for (int m = 0; m < a; ++m)
    {
        Rational term = Rational(k) / Rational(m + 1);
        for (int j = 0; j < a; ++j)
            if (j != m)
                term *= (k * lambda - j) / Rational(j + 1);
        total += term;
    }
    return total;
}

template <int Dim>
std::vector<std::array<Rational, Dim + 1>> exact_lattice_points(int order)
{
    std::vector<std::array<Rational, Dim + 1>> pts;
    if (order == 0)
    {
        std::array<Rational, Dim + 1> p;
        p.fill(Rational(1, Dim + 1));
        pts.push_back(p);
        return pts;
    }
    for (const auto& alpha : simplex_lattice<Dim>(order))
    {
        const auto                    bary = barycentric_index<Dim>(alpha, order);
        std::array<Rational, Dim + 1> p;
        for (int i = 0; i <= Dim; ++i)
            p[i] = Rational(bary[i], order);
        pts.push_back(p);
    }
    return pts;
}

template <typename T>
std::shared_ptr<const T> cached(int key, const auto& build)
{
    static std::mutex                                mutex;
    static std::map<int, std::shared_ptr<const T>>   cache;
    std::lock_guard                                  lock(mutex);
    auto&                                            slot = cache[key];
    if (!slot)
        slot = std::make_shared<const T>(build());
    return slot;
}

} // namespace detail

/// Values of the order-k basis at the order-2k lattice: B(j, l) = phi_l(x_W^j).
template <int Dim>
struct InterpTableWP
{
    int             order = 0;
    Eigen::MatrixXd B;

    [[nodiscard]] Index rows() const noexcept { return static_cast<Index>(B.rows()); }
    [[nodiscard]] Index cols() const noexcept { return static_cast<Index>(B.cols()); }
    [[nodiscard]] std::span<const Real> values() const noexcept { return {B.data(), static_cast<std::size_t>(B.size())}; }
};

/// Reference gradients of the order-k basis at the order-2(k-1) lattice:
/// B(r, i, l) = d phi_l / d xhat_r (x_W^i).
template <int Dim>
struct InterpTableElliptic
{
    int     order = 0;
    Tensor3 B;

    [[nodiscard]] Index rows() const noexcept { return B.extent(1); }
    [[nodiscard]] Index cols() const noexcept { return B.extent(2); }
    [[nodiscard]] std::span<const Real> values() const noexcept { return B.values(); }
};

template <int Dim>
InterpTableWP<Dim> compute_interp_wp(int k)
{
    require(k >= 1, ErrorCode::invalid_argument, "interpolation table needs order >= 1");
    const auto primal = simplex_lattice<Dim>(k);
    const auto points = detail::exact_lattice_points<Dim>(2 * k);

    InterpTableWP<Dim> table;
    table.order = k;
    table.B.resize(static_cast<Index>(points.size()), static_cast<Index>(primal.size()));
    for (std::size_t j = 0; j < points.size(); ++j)
        for (std::size_t l = 0; l < primal.size(); ++l)
        {
            const auto alpha = barycentric_index<Dim>(primal[l], k);
            Rational   v = 1;
            for (int i = 0; i <= Dim; ++i)
                v *= detail::silvester_factor(alpha[i], k, points[j][i]);
            table.B(static_cast<Index>(j), static_cast<Index>(l)) = v.convert_to<Real>();
        }
    return table;
}

template <int Dim>
InterpTableElliptic<Dim> compute_interp_elliptic(int k)
{
    require(k >= 1, ErrorCode::invalid_argument, "interpolation table needs order >= 1");
    const auto primal = simplex_lattice<Dim>(k);
    const auto points = detail::exact_lattice_points<Dim>(2 * (k - 1));

    InterpTableElliptic<Dim> table;
    table.order = k;
    table.B = Tensor3(Dim, static_cast<Index>(points.size()), static_cast<Index>(primal.size()));
    for (std::size_t j = 0; j < points.size(); ++j)
        for (std::size_t l = 0; l < primal.size(); ++l)
        {
            const auto alpha = barycentric_index<Dim>(primal[l], k);
            std::array<Rational, Dim + 1> f, df;
            for (int i = 0; i <= Dim; ++i)
            {
                f[i] = detail::silvester_factor(alpha[i], k, points[j][i]);
                df[i] = detail::silvester_factor_derivative(alpha[i], k, points[j][i]);
            }
            // d/d lambda_i of the product
            std::array<Rational, Dim + 1> dlam;
            for (int i = 0; i <= Dim; ++i)
            {
                dlam[i] = df[i];
                for (int q = 0; q <= Dim; ++q)
                    if (q != i)
                        dlam[i] *= f[q];
            }
            // lambda_0 = 1 - sum(x), lambda_{r+1} = x_r
            for (int r = 0; r < Dim; ++r)
                table.B(r, static_cast<Index>(j), static_cast<Index>(l)) = Rational(dlam[r + 1] - dlam[0]).convert_to<Real>();
        }
    return table;
}

/// Cached reference tables; safe to call concurrently.
template <int Dim>
std::shared_ptr<const InterpTableWP<Dim>> build_interp_wp(int k)
{
    return detail::cached<InterpTableWP<Dim>>(k, [k] { return compute_interp_wp<Dim>(k); });
}

template <int Dim>
std::shared_ptr<const InterpTableElliptic<Dim>> build_interp_elliptic(int k)
{
    return detail::cached<InterpTableElliptic<Dim>>(k, [k] { return compute_interp_elliptic<Dim>(k); });
}

} // namespace dogip
