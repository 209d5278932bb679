#pragma once

/// @file coefficient.hpp
/// Scalar weights m(x) and symmetric matrix coefficients M(x).
///
/// Each field carries a declared polynomial degree used to pick quadrature
/// rules. Non-polynomial callables may declare any degree; integration is
/// then only as exact as the rule allows.

#include "dogip/polynomial.hpp"

#include <functional>
#include <optional>

namespace dogip
{

template <int Dim>
class ScalarField
{
public:
    using Fn = std::function<Real(const Point<Dim>&)>;

    static ScalarField constant(Real value)
    {
        return ScalarField([value](const Point<Dim>&) { return value; }, 0, value, std::to_string(value));
    }

    static ScalarField polynomial(const Polynomial& p)
    {
        require(p.variables_used() <= Dim, ErrorCode::invalid_argument,
                "coefficient \"" + p.to_string() + "\" uses a coordinate beyond dimension " + std::to_string(Dim));
        std::optional<Real> c;
        if (p.is_constant())
            c = p(std::array<Real, 3>{0, 0, 0});
        return ScalarField([p](const Point<Dim>& x) { return p(x); }, p.degree(), c, p.to_string());
    }

    static ScalarField parse(std::string_view expr) { return polynomial(parse_polynomial(expr)); }

    static ScalarField function(Fn f, int declared_degree, std::string description = "function")
    {
        return ScalarField(std::move(f), declared_degree, std::nullopt, std::move(description));
    }

    Real operator()(const Point<Dim>& x) const { return f_(x); }

    [[nodiscard]] int                 degree() const noexcept { return degree_; }
    [[nodiscard]] std::optional<Real> constant_value() const noexcept { return constant_; }
    [[nodiscard]] const std::string&  description() const noexcept { return description_; }

private:
    ScalarField(Fn f, int degree, std::optional<Real> constant, std::string description)
        : f_(std::move(f)), degree_(degree), constant_(constant), description_(std::move(description))
    {}

    Fn                  f_;
    int                 degree_;
    std::optional<Real> constant_;
    std::string         description_;
};

template <int Dim>
class TensorField
{
public:
    using Fn = std::function<Mat<Dim>(const Point<Dim>&)>;

    static TensorField identity() { return constant(Mat<Dim>::Identity(), "identity"); }

    static TensorField diagonal(const std::array<Real, Dim>& d)
    {
        Mat<Dim>    m = Mat<Dim>::Zero();
        std::string desc = "diag:";
        for (int a = 0; a < Dim; ++a)
        {
            m(a, a) = d[static_cast<std::size_t>(a)];
            desc += (a ? "," : "") + std::to_string(d[static_cast<std::size_t>(a)]);
        }
        return constant(m, desc);
    }

    static TensorField constant(const Mat<Dim>& m, std::string description = "constant")
    {
        require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(Real(1), m.cwiseAbs().maxCoeff()),
                ErrorCode::non_symmetric_coefficient, "coefficient matrix is not symmetric");
        TensorField t([m](const Point<Dim>&) { return m; }, 0, std::move(description));
        t.constant_ = m;
        return t;
    }

    /// Q diag(eigenvalues) Q^T with Q a rotation by angle about the z axis
    /// (the only rotation in 2D).
    static TensorField rotated(const std::array<Real, Dim>& eigenvalues, Real angle)
    {
        Mat<Dim> q = Mat<Dim>::Identity();
        q(0, 0) = std::cos(angle);
        q(0, 1) = -std::sin(angle);
        q(1, 0) = std::sin(angle);
        q(1, 1) = std::cos(angle);
        Mat<Dim> d = Mat<Dim>::Zero();
        for (int a = 0; a < Dim; ++a)
            d(a, a) = eigenvalues[static_cast<std::size_t>(a)];
        return constant(q * d * q.transpose(), "rotated");
    }

    /// m(x) I; enables the reduced per-element storage.
    static TensorField isotropic(ScalarField<Dim> m)
    {
        auto        scale = m;
        TensorField t([scale](const Point<Dim>& x) { return Mat<Dim>(scale(x) * Mat<Dim>::Identity()); }, m.degree(),
                      "iso:" + m.description());
        if (const auto c = m.constant_value())
            t.constant_ = Mat<Dim>(*c * Mat<Dim>::Identity());
        t.isotropic_ = std::move(m);
        return t;
    }

    /// Entry-wise polynomials; entries(p, q) and entries(q, p) must agree.
    static TensorField polynomial(const std::array<std::array<Polynomial, Dim>, Dim>& entries)
    {
        int deg = 0;
        for (int p = 0; p < Dim; ++p)
            for (int q = 0; q < Dim; ++q)
            {
                const auto& e = entries[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
                require(e.variables_used() <= Dim, ErrorCode::invalid_argument, "coefficient uses a coordinate beyond the dimension");
                require(e.terms() == entries[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)].terms(),
                        ErrorCode::non_symmetric_coefficient, "coefficient matrix is not symmetric");
                deg = std::max(deg, e.degree());
            }
        return TensorField(
            [entries](const Point<Dim>& x) {
                Mat<Dim> m;
                for (int p = 0; p < Dim; ++p)
                    for (int q = 0; q < Dim; ++q)
                        m(p, q) = entries[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)](x);
                return m;
            },
            deg, "polynomial");
    }

    /// Arbitrary callable; symmetry is checked where it is sampled.
    static TensorField function(Fn f, int declared_degree, std::string description = "function")
    {
        return TensorField(std::move(f), declared_degree, std::move(description));
    }

    Mat<Dim> operator()(const Point<Dim>& x) const { return f_(x); }

    [[nodiscard]] int                            degree() const noexcept { return degree_; }
    [[nodiscard]] const std::optional<Mat<Dim>>& constant_value() const noexcept { return constant_; }
    [[nodiscard]] const std::optional<ScalarField<Dim>>& isotropic_scale() const noexcept { return isotropic_; }
    [[nodiscard]] bool                           is_isotropic() const noexcept { return isotropic_.has_value(); }
    [[nodiscard]] const std::string&             description() const noexcept { return description_; }

private:
    TensorField(Fn f, int degree, std::string description)
        : f_(std::move(f)), degree_(degree), description_(std::move(description))
    {}

    Fn                               f_;
    int                              degree_;
    std::string                      description_;
    std::optional<Mat<Dim>>          constant_;
    std::optional<ScalarField<Dim>>  isotropic_;
};

/// Symmetric within 1e-12 (relative) and positive definite.
template <int Dim>
void check_spd_sample(const Mat<Dim>& m)
{
    const Real scale = std::max(Real(1), m.cwiseAbs().maxCoeff());
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorCode::non_symmetric_coefficient,
            "sampled coefficient matrix is not symmetric");
    require(Eigen::LLT<Mat<Dim>>(m).info() == Eigen::Success, ErrorCode::invalid_argument,
            "sampled coefficient matrix is not positive definite");
}

} // namespace dogip
