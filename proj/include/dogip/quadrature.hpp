#pragma once

/// @file quadrature.hpp
/// Grundmann–Möller rules on the reference simplex and pullback integration.
///
/// The rule with parameter s is exact for degree 2s+1. Weights alternate in
/// sign between levels once s >= 1, which is harmless for exactness but is
/// reported through has_negative_weights(). Rules are generated in long
/// double so that degree-20 rules still hit moments to about 1e-13.

#include "dogip/lattice.hpp"
#include "dogip/mesh.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace dogip
{

template <int Dim>
struct QuadratureRule
{
    int                     degree = 0;
    std::vector<Point<Dim>> points;
    std::vector<Real>       weights;

    [[nodiscard]] Index num_points() const noexcept { return static_cast<Index>(points.size()); }
    [[nodiscard]] bool  has_negative_weights() const noexcept
    {
        return std::any_of(weights.begin(), weights.end(), [](Real w) { return w < 0; });
    }
};

namespace detail
{

/// Calls f(beta) for every beta in N^n with |beta| == total.
template <typename F>
void for_each_composition(int n, int total, F&& f)
{
    std::vector<int> beta(static_cast<std::size_t>(n), 0);
    const std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n - 1)
        {
            beta[static_cast<std::size_t>(pos)] = left;
            f(beta);
            return;
        }
        for (int b = left; b >= 0; --b)
        {
            beta[static_cast<std::size_t>(pos)] = b;
            rec(pos + 1, left - b);
        }
    };
    rec(0, total);
}

inline long double factorial_ld(int n)
{
    long double r = 1;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

} // namespace detail

/// Rule exact for all polynomials of total degree <= max(degree, 1), rounded
/// up to the next odd degree.
template <int Dim>
QuadratureRule<Dim> grundmann_moller(int degree)
{
    check_dimension<Dim>();
    require(degree >= 0, ErrorCode::invalid_argument, "quadrature degree must be non-negative");
    const int s = degree / 2; // smallest s with 2s+1 >= degree

    QuadratureRule<Dim> rule;
    rule.degree = 2 * s + 1;
    for (int i = 0; i <= s; ++i)
    {
        // level weights already sum to the reference volume 1/Dim!
        const int   denom = Dim + 2 * s + 1 - 2 * i;
        long double w = std::pow(2.0L, -2 * s) * std::pow(static_cast<long double>(denom), 2 * s + 1)
                      / (detail::factorial_ld(i) * detail::factorial_ld(denom + i));
        if (i % 2 == 1)
            w = -w;
        detail::for_each_composition(Dim + 1, s - i, [&](const std::vector<int>& beta) {
            Point<Dim> x;
            for (int a = 0; a < Dim; ++a)
                x[a] = static_cast<Real>(static_cast<long double>(2 * beta[static_cast<std::size_t>(a + 1)] + 1) / denom);
            rule.points.push_back(x);
            rule.weights.push_back(static_cast<Real>(w));
        });
    }
    return rule;
}

/// Exact integral of x^alpha over the reference simplex.
template <int Dim>
long double simplex_moment(const std::array<int, Dim>& alpha)
{
    long double num = 1;
    int         total = 0;
    for (int a : alpha)
    {
        num *= detail::factorial_ld(a);
        total += a;
    }
    return num / detail::factorial_ld(total + Dim);
}

/// Largest relative error over all monomials of degree <= rule.degree.
template <int Dim>
Real max_moment_error(const QuadratureRule<Dim>& rule)
{
    Real worst = 0;
    for (int p = 0; p <= rule.degree; ++p)
        for (const auto& alpha : simplex_lattice<Dim>(p))
        {
            long double q = 0;
            for (Index i = 0; i < rule.num_points(); ++i)
            {
                long double m = rule.weights[static_cast<std::size_t>(i)];
                for (int a = 0; a < Dim; ++a)
                    m *= std::pow(static_cast<long double>(rule.points[static_cast<std::size_t>(i)][a]), alpha[a]);
                q += m;
            }
            const long double exact = simplex_moment<Dim>(alpha);
            worst = std::max(worst, static_cast<Real>(std::abs(q - exact) / exact));
        }
    return worst;
}

/// |det R| * sum_q w_q f(F_T(xhat_q)).
template <int Dim, typename F>
Real integrate_on_element(const QuadratureRule<Dim>& rule, const AffineMap<Dim>& map, F&& f)
{
    Real sum = 0;
    for (Index q = 0; q < rule.num_points(); ++q)
        sum += rule.weights[static_cast<std::size_t>(q)] * f(map(rule.points[static_cast<std::size_t>(q)]));
    return map.jacobian() * sum;
}

} // namespace dogip
