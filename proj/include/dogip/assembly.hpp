#pragma once

/// @file assembly.hpp
/// Conventional sparse assembly of the weighted-projection and elliptic
/// system matrices, used as the oracle for the matrix-free operators.
///
/// The sparsity pattern is built first from the dof-to-element adjacency,
/// then element blocks are added in place and entries below the zero
/// threshold are dropped. Each worker owns a contiguous block of rows and
/// visits the elements touching them in ascending order, so every entry is
/// summed in element order whatever the worker count.

#include "dogip/coefficient.hpp"
#include "dogip/csr.hpp"
#include "dogip/dofmap.hpp"
#include "dogip/parallel.hpp"
#include "dogip/quadrature.hpp"
#include "dogip/reference_element.hpp"

#include <string>
#include <vector>

namespace dogip
{

/// Non-fatal findings and side counts collected during assembly.
struct Diagnostics
{
    std::vector<std::string> warnings;
    /// Entries of the sparsity pattern before threshold dropping.
    GlobalIndex pattern_nnz = 0;
};

inline int wp_rule_degree(int k, int coefficient_degree) { return 2 * k + coefficient_degree; }
inline int elliptic_rule_degree(int k, int coefficient_degree) { return 2 * (k - 1) + coefficient_degree; }

/// Fatal when diag is null, otherwise recorded as a warning.
inline void check_rule_degree(int have, int need, Diagnostics* diag)
{
    if (have >= need)
        return;
    const std::string msg = "quadrature degree " + std::to_string(have) + " below the required " + std::to_string(need);
    if (!diag)
        throw Error(ErrorCode::rule_degree_insufficient, msg);
    diag->warnings.push_back(std::string(to_string(ErrorCode::rule_degree_insufficient)) + ": " + msg);
}

/// Elements containing each DOF, in ascending order.
struct DofAdjacency
{
    std::vector<GlobalIndex> offsets;
    std::vector<Index>       elements;

    [[nodiscard]] std::span<const Index> of(Index dof) const
    {
        const auto b = static_cast<std::size_t>(offsets[static_cast<std::size_t>(dof)]);
        const auto e = static_cast<std::size_t>(offsets[static_cast<std::size_t>(dof) + 1]);
        return {elements.data() + b, e - b};
    }
};

template <int Dim>
DofAdjacency build_dof_adjacency(const DofMap<Dim>& dofs)
{
    DofAdjacency adj;
    adj.offsets.assign(static_cast<std::size_t>(dofs.dim()) + 1, 0);
    for (Index g : dofs.table())
        ++adj.offsets[static_cast<std::size_t>(g) + 1];
    for (std::size_t i = 1; i < adj.offsets.size(); ++i)
        adj.offsets[i] += adj.offsets[i - 1];
    adj.elements.resize(dofs.table().size());
    std::vector<GlobalIndex> fill(adj.offsets.begin(), adj.offsets.end() - 1);
    for (Index t = 0; t < dofs.num_elements(); ++t)
        for (Index g : dofs.element_dofs(t))
            adj.elements[static_cast<std::size_t>(fill[static_cast<std::size_t>(g)]++)] = t;
    return adj;
}

/// Assembles sum_T l_T^T A_T l_T where kernel(t, A_T) fills the dense block.
/// The kernel must be callable concurrently.
template <int Dim, typename Kernel>
CsrMatrix assemble_from_kernel(const DofMap<Dim>& dofs, Kernel&& kernel, Diagnostics* diag = nullptr)
{
    const Index  n = dofs.dim();
    const Index  vt = dofs.local_size();
    const auto   adj = build_dof_adjacency(dofs);
    const int    workers = worker_count();

    CsrMatrix a;
    a.nrows = a.ncols = n;
    a.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);

    // pattern: row i couples to every DOF of every element containing i
    std::vector<std::vector<Index>> chunk_cols(static_cast<std::size_t>(workers));
    parallel_chunks(n, workers, [&](int w, GlobalIndex rb, GlobalIndex re) {
        auto&              cols = chunk_cols[static_cast<std::size_t>(w)];
        std::vector<Index> row;
        for (auto i = static_cast<Index>(rb); i < re; ++i)
        {
            row.clear();
            for (Index t : adj.of(i))
                for (Index g : dofs.element_dofs(t))
                    row.push_back(g);
            std::sort(row.begin(), row.end());
            row.erase(std::unique(row.begin(), row.end()), row.end());
            a.row_offsets[static_cast<std::size_t>(i) + 1] = static_cast<GlobalIndex>(row.size());
            cols.insert(cols.end(), row.begin(), row.end());
        }
    });
    for (std::size_t i = 1; i < a.row_offsets.size(); ++i)
        a.row_offsets[i] += a.row_offsets[i - 1];
    a.col_indices.reserve(static_cast<std::size_t>(a.row_offsets.back()));
    for (auto& c : chunk_cols)
    {
        a.col_indices.insert(a.col_indices.end(), c.begin(), c.end());
        std::vector<Index>().swap(c);
    }
    a.values.assign(a.col_indices.size(), 0);

    parallel_chunks(n, workers, [&](int, GlobalIndex rb, GlobalIndex re) {
        std::vector<Index> elems;
        for (auto i = static_cast<Index>(rb); i < re; ++i)
            for (Index t : adj.of(i))
                elems.push_back(t);
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());

        Eigen::MatrixXd block(vt, vt);
        for (Index t : elems)
        {
            kernel(t, block);
            const auto l = dofs.element_dofs(t);
            for (Index i = 0; i < vt; ++i)
            {
                const Index row = l[static_cast<std::size_t>(i)];
                if (row < rb || row >= re)
                    continue;
                const auto cb = a.col_indices.begin() + a.row_offsets[static_cast<std::size_t>(row)];
                const auto ce = a.col_indices.begin() + a.row_offsets[static_cast<std::size_t>(row) + 1];
                for (Index j = 0; j < vt; ++j)
                {
                    const auto pos = std::lower_bound(cb, ce, l[static_cast<std::size_t>(j)]) - a.col_indices.begin();
                    a.values[static_cast<std::size_t>(pos)] += block(i, j);
                }
            }
        }
    });

    if (diag)
        diag->pattern_nnz = a.nnz();
    a.drop_below(zero_threshold);
    return a;
}

/// Precomputed reference data for the element kernels.
template <int Dim>
struct ReferenceTabulation
{
    QuadratureRule<Dim> rule;
    Eigen::MatrixXd     phi;                 // (q, i)
    std::vector<Eigen::Matrix<Real, Eigen::Dynamic, Dim>> grad; // per q: (i, r)

    ReferenceTabulation(const ReferenceBasis<Dim>& basis, QuadratureRule<Dim> r, bool with_gradients)
        : rule(std::move(r)), phi(basis.eval(rule.points))
    {
        if (!with_gradients)
            return;
        const auto g = basis.eval_grad(rule.points);
        grad.resize(static_cast<std::size_t>(rule.num_points()));
        for (Index q = 0; q < rule.num_points(); ++q)
        {
            auto& gq = grad[static_cast<std::size_t>(q)];
            gq.resize(basis.size(), Dim);
            for (Index i = 0; i < basis.size(); ++i)
                for (int r = 0; r < Dim; ++r)
                    gq(i, r) = g(q, i, r);
        }
    }
};

/// A_ij = int m phi_j phi_i over the continuous order-k space of dofs.
template <int Dim>
CsrMatrix assemble_wp_matrix(const Mesh<Dim>& mesh, const DofMap<Dim>& dofs, const ScalarField<Dim>& m,
                             const QuadratureRule<Dim>& rule, Diagnostics* diag = nullptr)
{
    check_rule_degree(rule.degree, wp_rule_degree(dofs.order(), m.degree()), diag);
    const ReferenceTabulation<Dim> tab(build_lagrange_basis<Dim>(dofs.order()), rule, false);
    return assemble_from_kernel(dofs, [&](Index t, Eigen::MatrixXd& block) {
        const auto      map = affine_map(mesh, t);
        Eigen::VectorXd w(tab.rule.num_points());
        for (Index q = 0; q < tab.rule.num_points(); ++q)
            w(q) = tab.rule.weights[static_cast<std::size_t>(q)] * map.jacobian() * m(map(tab.rule.points[static_cast<std::size_t>(q)]));
        block.noalias() = tab.phi.transpose() * w.asDiagonal() * tab.phi;
    }, diag);
}

/// A_ij = int M grad phi_j . grad phi_i.
template <int Dim>
CsrMatrix assemble_elliptic_matrix(const Mesh<Dim>& mesh, const DofMap<Dim>& dofs, const TensorField<Dim>& M,
                                   const QuadratureRule<Dim>& rule, Diagnostics* diag = nullptr)
{
    check_rule_degree(rule.degree, elliptic_rule_degree(dofs.order(), M.degree()), diag);
    if (M.constant_value())
        check_spd_sample<Dim>(*M.constant_value());
    const ReferenceTabulation<Dim> tab(build_lagrange_basis<Dim>(dofs.order()), rule, true);
    return assemble_from_kernel(dofs, [&](Index t, Eigen::MatrixXd& block) {
        const auto map = affine_map(mesh, t);
        block.setZero();
        Eigen::Matrix<Real, Eigen::Dynamic, Dim> g(block.rows(), Dim);
        for (Index q = 0; q < tab.rule.num_points(); ++q)
        {
            const Mat<Dim> mq = M(map(tab.rule.points[static_cast<std::size_t>(q)]));
            if (!M.constant_value())
                check_spd_sample<Dim>(mq);
            // physical gradients as rows: grad phi^T = grad_hat phi^T Rinv
            g.noalias() = tab.grad[static_cast<std::size_t>(q)] * map.Rinv;
            block.noalias() += (tab.rule.weights[static_cast<std::size_t>(q)] * map.jacobian()) * (g * mq * g.transpose());
        }
    }, diag);
}

/// b_i = int f phi_i.
template <int Dim, typename F>
std::vector<Real> assemble_rhs(const Mesh<Dim>& mesh, const DofMap<Dim>& dofs, F&& f, const QuadratureRule<Dim>& rule)
{
    const ReferenceTabulation<Dim> tab(build_lagrange_basis<Dim>(dofs.order()), rule, false);
    std::vector<Real>              b(static_cast<std::size_t>(dofs.dim()), 0);
    Eigen::VectorXd                w(tab.rule.num_points());
    for (Index t = 0; t < mesh.num_elements(); ++t)
    {
        const auto map = affine_map(mesh, t);
        for (Index q = 0; q < tab.rule.num_points(); ++q)
            w(q) = tab.rule.weights[static_cast<std::size_t>(q)] * map.jacobian() * f(map(tab.rule.points[static_cast<std::size_t>(q)]));
        const Eigen::VectorXd be = tab.phi.transpose() * w;
        const auto            l = dofs.element_dofs(t);
        for (Index i = 0; i < dofs.local_size(); ++i)
            b[static_cast<std::size_t>(l[static_cast<std::size_t>(i)])] += be(i);
    }
    return b;
}

} // namespace dogip
