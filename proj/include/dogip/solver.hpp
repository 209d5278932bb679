#pragma once

/// @file solver.hpp
/// Unpreconditioned conjugate gradients over a type-erased linear operator,
/// and Dirichlet constraints by symmetric elimination.

#include "dogip/csr.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

namespace dogip
{

struct LinearOperator
{
    Index                                                   dim = 0;
    std::function<std::vector<Real>(std::span<const Real>)> apply;

    std::vector<Real> operator()(std::span<const Real> u) const { return apply(u); }
};

/// Wraps a CSR matrix or any object with dim() and apply(); the wrapped
/// object must outlive the returned operator.
inline LinearOperator make_operator(const CsrMatrix& a)
{
    return {a.nrows, [&a](std::span<const Real> u) { return csr_matvec(a, u); }};
}

template <typename Op>
LinearOperator make_operator(const Op& op)
{
    return {op.dim(), [&op](std::span<const Real> u) { return op.apply(u); }};
}

enum class CgStatus
{
    converged,
    max_iterations,
    breakdown,
};

inline std::string_view to_string(CgStatus s) noexcept
{
    switch (s)
    {
    case CgStatus::converged: return "converged";
    case CgStatus::max_iterations: return "max-iterations";
    case CgStatus::breakdown: return "breakdown";
    }
    return "unknown";
}

struct CgResult
{
    std::vector<Real> x;
    int               iterations = 0;
    CgStatus          status = CgStatus::converged;
    /// ||b - A x_i|| / ||b|| after each iteration, starting with the initial guess.
    std::vector<Real> history;
};

inline Real dot(std::span<const Real> a, std::span<const Real> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), Real(0));
}

/// Stops when ||b - A x|| <= tol ||b||. Reports breakdown if p^T A p <= 0.
inline CgResult cg_solve(const LinearOperator& op, std::span<const Real> b, Real tol, int max_iterations,
                         std::span<const Real> x0 = {})
{
    require(static_cast<Index>(b.size()) == op.dim, ErrorCode::dimension_mismatch, "right-hand side length");
    require(x0.empty() || static_cast<Index>(x0.size()) == op.dim, ErrorCode::dimension_mismatch, "initial guess length");
    const auto n = b.size();

    CgResult res;
    res.x.assign(n, 0);
    if (!x0.empty())
        std::copy(x0.begin(), x0.end(), res.x.begin());

    const Real bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0)
    {
        std::fill(res.x.begin(), res.x.end(), 0);
        res.history.push_back(0);
        return res;
    }

    std::vector<Real> r(b.begin(), b.end());
    if (!x0.empty())
    {
        const auto ax = op(res.x);
        for (std::size_t i = 0; i < n; ++i)
            r[i] -= ax[i];
    }
    std::vector<Real> p = r;
    Real              rr = dot(r, r);
    res.history.push_back(std::sqrt(rr) / bnorm);
    while (res.history.back() > tol)
    {
        if (res.iterations >= max_iterations)
        {
            res.status = CgStatus::max_iterations;
            return res;
        }
        const auto ap = op(p);
        const Real pap = dot(p, ap);
        if (!(pap > 0))
        {
            res.status = CgStatus::breakdown;
            return res;
        }
        const Real alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i)
        {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const Real rr_new = dot(r, r);
        for (std::size_t i = 0; i < n; ++i)
            p[i] = r[i] + (rr_new / rr) * p[i];
        rr = rr_new;
        ++res.iterations;
        res.history.push_back(std::sqrt(rr) / bnorm);
    }
    return res;
}

/// Prescribed values on a set of DOFs.
struct BcSpec
{
    std::vector<Index> indices;
    std::vector<Real>  values;

    void validate(Index dim) const
    {
        require(indices.size() == values.size(), ErrorCode::dimension_mismatch, "one value per constrained DOF");
        std::vector<char> seen(static_cast<std::size_t>(dim), 0);
        for (Index i : indices)
        {
            require(i >= 0 && i < dim, ErrorCode::index_out_of_range, "constrained DOF " + std::to_string(i));
            require(!seen[static_cast<std::size_t>(i)], ErrorCode::invalid_argument, "constrained DOF listed twice: " + std::to_string(i));
            seen[static_cast<std::size_t>(i)] = 1;
        }
    }
};

struct ConstrainedSystem
{
    LinearOperator    op;
    std::vector<Real> rhs;
    /// Prescribed values on constrained DOFs, zero elsewhere; a good initial guess.
    std::vector<Real> lift;
};

/// Replaces constrained rows and columns by the identity and moves the known
/// values to the right-hand side, so the operator stays symmetric.
inline ConstrainedSystem apply_dirichlet(const LinearOperator& op, std::span<const Real> b, const BcSpec& bc)
{
    require(static_cast<Index>(b.size()) == op.dim, ErrorCode::dimension_mismatch, "right-hand side length");
    bc.validate(op.dim);
    if (bc.indices.empty())
        return {op, std::vector<Real>(b.begin(), b.end()), std::vector<Real>(b.size(), 0)};

    auto mask = std::make_shared<std::vector<char>>(b.size(), 0);
    std::vector<Real> lift(b.size(), 0);
    for (std::size_t c = 0; c < bc.indices.size(); ++c)
    {
        (*mask)[static_cast<std::size_t>(bc.indices[c])] = 1;
        lift[static_cast<std::size_t>(bc.indices[c])] = bc.values[c];
    }

    std::vector<Real> rhs(b.begin(), b.end());
    const auto        al = op(lift);
    for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = (*mask)[i] ? lift[i] : rhs[i] - al[i];

    LinearOperator constrained{op.dim, [base = op, mask](std::span<const Real> u) {
                                   std::vector<Real> free(u.begin(), u.end());
                                   for (std::size_t i = 0; i < free.size(); ++i)
                                       if ((*mask)[i])
                                           free[i] = 0;
                                   auto y = base(free);
                                   for (std::size_t i = 0; i < y.size(); ++i)
                                       if ((*mask)[i])
                                           y[i] = u[i];
                                   return y;
                               }};
    return {std::move(constrained), std::move(rhs), std::move(lift)};
}

} // namespace dogip
