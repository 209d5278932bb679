#pragma once

/// @file operator.hpp
/// Matrix-free DoGIP operators A = B^T A_dogip B.
///
/// B is never formed globally: every element gathers its primal values,
/// applies the reference table Bhat, scales by its own (block-)diagonal
/// factor, applies Bhat^T and scatters back. The factors are integrals of the
/// coefficient against the double-grid basis, so the product equals the
/// assembled matrix whenever the same quadrature is used on both sides.
///
/// Storage modes:
///   full       every element stores all of its weights (the accounted layout)
///   isotropic  M = m I: W_T scalars plus the d x d matrix Rinv Rinv^T
///   compact    constant coefficient: one reference weight vector shared by
///              all elements plus one scalar (WP) or d x d matrix per element

#include "dogip/assembly.hpp"

#include <memory>

namespace dogip
{

enum class DogipStorage
{
    full,
    isotropic,
    compact,
};

inline std::string_view to_string(DogipStorage s) noexcept
{
    switch (s)
    {
    case DogipStorage::full: return "full";
    case DogipStorage::isotropic: return "isotropic";
    case DogipStorage::compact: return "compact";
    }
    return "unknown";
}

namespace detail
{

using RowMajor = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Runs body(t, v_local_acc) over all elements with per-worker output buffers
/// reduced in worker order.
template <typename Body>
std::vector<Real> element_loop(Index n_out, Index n_elements, Body&& body)
{
    const int workers = static_cast<int>(std::min<GlobalIndex>(worker_count(), std::max<Index>(1, n_elements)));
    std::vector<std::vector<Real>> out(static_cast<std::size_t>(workers));
    parallel_chunks(n_elements, workers, [&](int w, GlobalIndex b, GlobalIndex e) {
        auto& v = out[static_cast<std::size_t>(w)];
        v.assign(static_cast<std::size_t>(n_out), 0);
        body(static_cast<Index>(b), static_cast<Index>(e), v);
    });
    for (std::size_t w = 1; w < out.size(); ++w)
        for (std::size_t i = 0; i < out[0].size(); ++i)
            out[0][i] += out[w][i];
    return std::move(out[0]);
}

inline void check_length(std::span<const Real> u, Index n)
{
    require(static_cast<Index>(u.size()) == n, ErrorCode::dimension_mismatch,
            "vector of length " + std::to_string(u.size()) + " for an operator of dimension " + std::to_string(n));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Weighted projection, element-wise
// ---------------------------------------------------------------------------

template <int Dim>
class DogipWpOperator
{
public:
    DogipWpOperator(std::shared_ptr<const DofMap<Dim>> dofs, std::shared_ptr<const InterpTableWP<Dim>> table,
                    DogipStorage storage, std::vector<Real> weights, std::vector<Real> scales)
        : dofs_(std::move(dofs)), table_(std::move(table)), storage_(storage), weights_(std::move(weights)),
          scales_(std::move(scales))
    {}

    [[nodiscard]] Index        dim() const noexcept { return dofs_->dim(); }
    [[nodiscard]] int          order() const noexcept { return table_->order; }
    [[nodiscard]] Index        num_elements() const noexcept { return dofs_->num_elements(); }
    [[nodiscard]] Index        w_local() const noexcept { return table_->rows(); }
    [[nodiscard]] DogipStorage storage() const noexcept { return storage_; }
    [[nodiscard]] const DofMap<Dim>&        dofs() const noexcept { return *dofs_; }
    [[nodiscard]] const InterpTableWP<Dim>& table() const noexcept { return *table_; }

    /// Weight a_{T,j}, whatever the storage mode.
    [[nodiscard]] Real weight(Index t, Index j) const
    {
        if (storage_ == DogipStorage::compact)
            return scales_[static_cast<std::size_t>(t)] * weights_[static_cast<std::size_t>(j)];
        return weights_[static_cast<std::size_t>(t) * static_cast<std::size_t>(w_local()) + static_cast<std::size_t>(j)];
    }

    /// Numbers kept per element in full storage.
    [[nodiscard]] Index stored_entries_per_element() const noexcept { return w_local(); }

    /// Numbers actually held by this instance.
    [[nodiscard]] GlobalIndex stored_entries() const noexcept
    {
        return static_cast<GlobalIndex>(weights_.size() + scales_.size());
    }

    /// Sum over elements of the weights with |a| >= threshold.
    [[nodiscard]] GlobalIndex nnz_weights() const
    {
        GlobalIndex n = 0;
        for (Index t = 0; t < num_elements(); ++t)
            for (Index j = 0; j < w_local(); ++j)
                n += std::abs(weight(t, j)) >= zero_threshold;
        return n;
    }

    /// Test hook: adds delta to the first stored weight.
    void inject_fault(Real delta) { weights_.at(0) += delta; }

    [[nodiscard]] std::vector<Real> apply(std::span<const Real> u) const
    {
        detail::check_length(u, dim());
        const Index vt = dofs_->local_size(), wt = w_local();
        const auto& b = table_->B;
        return detail::element_loop(dim(), num_elements(), [&](Index tb, Index te, std::vector<Real>& v) {
            Eigen::VectorXd ut(vt), g(wt), vt_out(vt);
            for (Index t = tb; t < te; ++t)
            {
                const auto l = dofs_->element_dofs(t);
                for (Index i = 0; i < vt; ++i)
                    ut(i) = u[static_cast<std::size_t>(l[static_cast<std::size_t>(i)])];
                g.noalias() = b * ut;
                for (Index j = 0; j < wt; ++j)
                    g(j) *= weight(t, j);
                vt_out.noalias() = b.transpose() * g;
                for (Index i = 0; i < vt; ++i)
                    v[static_cast<std::size_t>(l[static_cast<std::size_t>(i)])] += vt_out(i);
            }
        });
    }

private:
    std::shared_ptr<const DofMap<Dim>>        dofs_;
    std::shared_ptr<const InterpTableWP<Dim>> table_;
    DogipStorage                              storage_;
    std::vector<Real>                         weights_;
    std::vector<Real>                         scales_;
};

/// a_{T,j} = int_T m phi_W^j with W the order-2k lattice basis.
template <int Dim>
DogipWpOperator<Dim> build_wp_dogip(const Mesh<Dim>& mesh, std::shared_ptr<const DofMap<Dim>> dofs, const ScalarField<Dim>& m,
                                    const QuadratureRule<Dim>& rule, DogipStorage storage = DogipStorage::full)
{
    require(dofs->kind() == SpaceKind::continuous, ErrorCode::invalid_argument, "weighted projection needs a continuous space");
    const int k = dofs->order();
    check_rule_degree(rule.degree, wp_rule_degree(k, m.degree()), nullptr);
    require(storage != DogipStorage::isotropic, ErrorCode::invalid_argument, "isotropic storage applies to the elliptic problem only");
    require(storage != DogipStorage::compact || m.constant_value(), ErrorCode::invalid_argument,
            "compact storage needs a constant coefficient");

    auto            table = build_interp_wp<Dim>(k);
    const auto      wbasis = build_lagrange_basis<Dim>(2 * k, BasisRole::double_grid);
    const auto      phi = wbasis.eval(rule.points);
    const Index     wt = wbasis.size();
    Eigen::VectorXd w(rule.num_points());

    std::vector<Real> weights, scales;
    if (storage == DogipStorage::compact)
    {
        for (Index q = 0; q < rule.num_points(); ++q)
            w(q) = rule.weights[static_cast<std::size_t>(q)];
        const Eigen::VectorXd ref = phi.transpose() * w;
        weights.assign(ref.data(), ref.data() + wt);
        scales.resize(static_cast<std::size_t>(mesh.num_elements()));
        for (Index t = 0; t < mesh.num_elements(); ++t)
            scales[static_cast<std::size_t>(t)] = affine_map(mesh, t).jacobian() * *m.constant_value();
    }
    else
    {
        weights.resize(static_cast<std::size_t>(mesh.num_elements()) * static_cast<std::size_t>(wt));
        for (Index t = 0; t < mesh.num_elements(); ++t)
        {
            const auto map = affine_map(mesh, t);
            for (Index q = 0; q < rule.num_points(); ++q)
                w(q) = rule.weights[static_cast<std::size_t>(q)] * map.jacobian() * m(map(rule.points[static_cast<std::size_t>(q)]));
            Eigen::Map<Eigen::VectorXd>(weights.data() + static_cast<std::size_t>(t) * wt, wt).noalias() = phi.transpose() * w;
        }
    }
    return DogipWpOperator<Dim>(std::move(dofs), std::move(table), storage, std::move(weights), std::move(scales));
}

template <int Dim>
DogipWpOperator<Dim> build_wp_dogip(const Mesh<Dim>& mesh, int k, const ScalarField<Dim>& m, const QuadratureRule<Dim>& rule,
                                    DogipStorage storage = DogipStorage::full)
{
    return build_wp_dogip(mesh, std::make_shared<const DofMap<Dim>>(build_continuous_dofmap(mesh, k)), m, rule, storage);
}

// ---------------------------------------------------------------------------
// Weighted projection, global diagonal on C_{N,2k}
// ---------------------------------------------------------------------------

template <int Dim>
class DogipWpGlobalOperator
{
public:
    DogipWpGlobalOperator(std::shared_ptr<const DofMap<Dim>> vdofs, DofMap<Dim> wdofs, std::shared_ptr<const InterpTableWP<Dim>> table,
                          std::vector<Real> diagonal)
        : vdofs_(std::move(vdofs)), wdofs_(std::move(wdofs)), table_(std::move(table)), diagonal_(std::move(diagonal)),
          owned_(wdofs_.table().size(), 0)
    {
        // each W dof is interpolated by the first element that contains it
        std::vector<char> seen(static_cast<std::size_t>(wdofs_.dim()), 0);
        for (std::size_t p = 0; p < wdofs_.table().size(); ++p)
        {
            const auto g = static_cast<std::size_t>(wdofs_.table()[p]);
            if (!seen[g])
                seen[g] = owned_[p] = 1;
        }
    }

    [[nodiscard]] Index                    dim() const noexcept { return vdofs_->dim(); }
    [[nodiscard]] const std::vector<Real>& diagonal() const noexcept { return diagonal_; }
    [[nodiscard]] const DofMap<Dim>&       w_dofs() const noexcept { return wdofs_; }

    [[nodiscard]] std::vector<Real> apply(std::span<const Real> u) const
    {
        detail::check_length(u, dim());
        const Index vt = vdofs_->local_size(), wt = table_->rows();
        const auto& b = table_->B;
        const Index ne = vdofs_->num_elements();

        // x = A_dogip B u on the double grid
        std::vector<Real> x(static_cast<std::size_t>(wdofs_.dim()), 0);
        {
            Eigen::VectorXd ut(vt), g(wt);
            for (Index t = 0; t < ne; ++t)
            {
                const auto l = vdofs_->element_dofs(t);
                for (Index i = 0; i < vt; ++i)
                    ut(i) = u[static_cast<std::size_t>(l[static_cast<std::size_t>(i)])];
                g.noalias() = b * ut;
                const auto lw = wdofs_.element_dofs(t);
                for (Index j = 0; j < wt; ++j)
                    if (owned_[static_cast<std::size_t>(t) * wt + j])
                    {
                        const auto gj = static_cast<std::size_t>(lw[static_cast<std::size_t>(j)]);
                        x[gj] = diagonal_[gj] * g(j);
                    }
            }
        }
        // v = B^T x
        std::vector<Real> v(static_cast<std::size_t>(dim()), 0);
        Eigen::VectorXd   h(wt), vt_out(vt);
        for (Index t = 0; t < ne; ++t)
        {
            const auto lw = wdofs_.element_dofs(t);
            for (Index j = 0; j < wt; ++j)
                h(j) = owned_[static_cast<std::size_t>(t) * wt + j] ? x[static_cast<std::size_t>(lw[static_cast<std::size_t>(j)])] : 0;
            vt_out.noalias() = b.transpose() * h;
            const auto l = vdofs_->element_dofs(t);
            for (Index i = 0; i < vt; ++i)
                v[static_cast<std::size_t>(l[static_cast<std::size_t>(i)])] += vt_out(i);
        }
        return v;
    }

private:
    std::shared_ptr<const DofMap<Dim>>        vdofs_;
    DofMap<Dim>                               wdofs_;
    std::shared_ptr<const InterpTableWP<Dim>> table_;
    std::vector<Real>                         diagonal_;
    std::vector<char>                         owned_;
};

/// Global diagonal a_i = int m phi_W^i, accumulated from the element weights.
template <int Dim>
DogipWpGlobalOperator<Dim> build_wp_dogip_global(const Mesh<Dim>& mesh, int k, const ScalarField<Dim>& m, const QuadratureRule<Dim>& rule)
{
    auto       vdofs = std::make_shared<const DofMap<Dim>>(build_continuous_dofmap(mesh, k));
    const auto local = build_wp_dogip(mesh, vdofs, m, rule);
    auto       wdofs = build_continuous_dofmap(mesh, 2 * k);
    std::vector<Real> diag(static_cast<std::size_t>(wdofs.dim()), 0);
    for (Index t = 0; t < mesh.num_elements(); ++t)
    {
        const auto lw = wdofs.element_dofs(t);
        for (Index j = 0; j < local.w_local(); ++j)
            diag[static_cast<std::size_t>(lw[static_cast<std::size_t>(j)])] += local.weight(t, j);
    }
    return DogipWpGlobalOperator<Dim>(std::move(vdofs), std::move(wdofs), build_interp_wp<Dim>(k), std::move(diag));
}

// ---------------------------------------------------------------------------
// Scalar elliptic, element-wise
// ---------------------------------------------------------------------------

template <int Dim>
class DogipEllipticOperator
{
public:
    static constexpr int block = Dim * Dim;

    DogipEllipticOperator(std::shared_ptr<const DofMap<Dim>> dofs, std::shared_ptr<const InterpTableElliptic<Dim>> table,
                          DogipStorage storage, std::vector<Real> weights, std::vector<Real> factors)
        : dofs_(std::move(dofs)), table_(std::move(table)), storage_(storage), weights_(std::move(weights)),
          factors_(std::move(factors))
    {}

    [[nodiscard]] Index        dim() const noexcept { return dofs_->dim(); }
    [[nodiscard]] int          order() const noexcept { return table_->order; }
    [[nodiscard]] Index        num_elements() const noexcept { return dofs_->num_elements(); }
    [[nodiscard]] Index        w_local() const noexcept { return table_->rows(); }
    [[nodiscard]] DogipStorage storage() const noexcept { return storage_; }
    [[nodiscard]] const DofMap<Dim>&              dofs() const noexcept { return *dofs_; }
    [[nodiscard]] const InterpTableElliptic<Dim>& table() const noexcept { return *table_; }

    /// Block A_{T,..,j} as a d x d matrix, whatever the storage mode.
    [[nodiscard]] Mat<Dim> block_at(Index t, Index j) const
    {
        const auto wt = static_cast<std::size_t>(w_local());
        switch (storage_)
        {
        case DogipStorage::full:
            return Eigen::Map<const Mat<Dim>>(weights_.data() + (static_cast<std::size_t>(t) * wt + static_cast<std::size_t>(j)) * block);
        case DogipStorage::isotropic:
            return weights_[static_cast<std::size_t>(t) * wt + static_cast<std::size_t>(j)]
                 * Eigen::Map<const Mat<Dim>>(factors_.data() + static_cast<std::size_t>(t) * block);
        case DogipStorage::compact:
            break;
        }
        return weights_[static_cast<std::size_t>(j)] * Eigen::Map<const Mat<Dim>>(factors_.data() + static_cast<std::size_t>(t) * block);
    }

    /// Numbers kept per element in full storage.
    [[nodiscard]] Index stored_entries_per_element() const noexcept { return block * w_local(); }

    [[nodiscard]] GlobalIndex stored_entries() const noexcept
    {
        return static_cast<GlobalIndex>(weights_.size() + factors_.size());
    }

    /// Sum over elements of the block entries with |a| >= threshold.
    [[nodiscard]] GlobalIndex nnz_weights() const
    {
        GlobalIndex n = 0;
        for (Index t = 0; t < num_elements(); ++t)
            for (Index j = 0; j < w_local(); ++j)
                n += (block_at(t, j).array().abs() >= zero_threshold).count();
        return n;
    }

    /// Test hook: adds delta to the first stored number.
    void inject_fault(Real delta) { weights_.at(0) += delta; }

    [[nodiscard]] std::vector<Real> apply(std::span<const Real> u) const
    {
        detail::check_length(u, dim());
        const Index vt = dofs_->local_size(), wt = w_local();
        std::array<Eigen::Map<const detail::RowMajor>, Dim> b = make_slices(vt, wt);
        return detail::element_loop(dim(), num_elements(), [&](Index tb, Index te, std::vector<Real>& v) {
            Eigen::VectorXd                               ut(vt), vt_out(vt);
            Eigen::Matrix<Real, Dim, Eigen::Dynamic>      g(Dim, wt), h(Dim, wt);
            for (Index t = tb; t < te; ++t)
            {
                const auto l = dofs_->element_dofs(t);
                for (Index i = 0; i < vt; ++i)
                    ut(i) = u[static_cast<std::size_t>(l[static_cast<std::size_t>(i)])];
                for (int s = 0; s < Dim; ++s)
                    g.row(s).noalias() = (b[static_cast<std::size_t>(s)] * ut).transpose();
                for (Index j = 0; j < wt; ++j)
                    h.col(j).noalias() = block_at(t, j) * g.col(j);
                vt_out.setZero();
                for (int r = 0; r < Dim; ++r)
                    vt_out.noalias() += b[static_cast<std::size_t>(r)].transpose() * h.row(r).transpose();
                for (Index i = 0; i < vt; ++i)
                    v[static_cast<std::size_t>(l[static_cast<std::size_t>(i)])] += vt_out(i);
            }
        });
    }

private:
    template <std::size_t... R>
    std::array<Eigen::Map<const detail::RowMajor>, Dim> make_slices_impl(Index vt, Index wt, std::index_sequence<R...>) const
    {
        return {Eigen::Map<const detail::RowMajor>(table_->B.values().data() + R * static_cast<std::size_t>(wt * vt), wt, vt)...};
    }
    std::array<Eigen::Map<const detail::RowMajor>, Dim> make_slices(Index vt, Index wt) const
    {
        return make_slices_impl(vt, wt, std::make_index_sequence<Dim>{});
    }

    std::shared_ptr<const DofMap<Dim>>              dofs_;
    std::shared_ptr<const InterpTableElliptic<Dim>> table_;
    DogipStorage                                    storage_;
    std::vector<Real>                               weights_;
    std::vector<Real>                               factors_;
};

/// A_{T,rs,j} = sum_pq Rinv_rp Rinv_sq int_T M_pq phi_W^j with W the
/// discontinuous order-2(k-1) basis.
template <int Dim>
DogipEllipticOperator<Dim> build_elliptic_dogip(const Mesh<Dim>& mesh, std::shared_ptr<const DofMap<Dim>> dofs, const TensorField<Dim>& M,
                                                const QuadratureRule<Dim>& rule, DogipStorage storage = DogipStorage::full)
{
    require(dofs->kind() == SpaceKind::continuous, ErrorCode::invalid_argument, "elliptic problem needs a continuous space");
    const int k = dofs->order();
    check_rule_degree(rule.degree, elliptic_rule_degree(k, M.degree()), nullptr);
    require(storage != DogipStorage::isotropic || M.is_isotropic(), ErrorCode::invalid_argument,
            "isotropic storage needs an isotropic coefficient");
    require(storage != DogipStorage::compact || M.constant_value(), ErrorCode::invalid_argument,
            "compact storage needs a constant coefficient");
    if (M.constant_value())
        check_spd_sample<Dim>(*M.constant_value());

    constexpr int   bs = Dim * Dim;
    auto            table = build_interp_elliptic<Dim>(k);
    const auto      wbasis = build_lagrange_basis<Dim>(2 * (k - 1), BasisRole::double_grid);
    const auto      phi = wbasis.eval(rule.points);
    const Index     wt = wbasis.size();
    const Index     ne = mesh.num_elements();

    std::vector<Real> weights, factors;
    Eigen::VectorXd   w(rule.num_points());
    if (storage == DogipStorage::full)
    {
        weights.assign(static_cast<std::size_t>(ne) * static_cast<std::size_t>(wt) * bs, 0);
        for (Index t = 0; t < ne; ++t)
        {
            const auto map = affine_map(mesh, t);
            for (Index q = 0; q < rule.num_points(); ++q)
            {
                Mat<Dim> mq = M(map(rule.points[static_cast<std::size_t>(q)]));
                if (!M.constant_value())
                    check_spd_sample<Dim>(mq);
                Mat<Dim> kq = map.Rinv * mq * map.Rinv.transpose();
                kq = Real(0.5) * (kq + kq.transpose()).eval();
                const Real wq = rule.weights[static_cast<std::size_t>(q)] * map.jacobian();
                for (Index j = 0; j < wt; ++j)
                    Eigen::Map<Mat<Dim>>(weights.data() + (static_cast<std::size_t>(t) * wt + j) * bs) += (wq * phi(q, j)) * kq;
            }
        }
    }
    else if (storage == DogipStorage::isotropic)
    {
        const auto& m = *M.isotropic_scale();
        weights.resize(static_cast<std::size_t>(ne) * static_cast<std::size_t>(wt));
        factors.resize(static_cast<std::size_t>(ne) * bs);
        for (Index t = 0; t < ne; ++t)
        {
            const auto map = affine_map(mesh, t);
            for (Index q = 0; q < rule.num_points(); ++q)
                w(q) = rule.weights[static_cast<std::size_t>(q)] * map.jacobian() * m(map(rule.points[static_cast<std::size_t>(q)]));
            Eigen::Map<Eigen::VectorXd>(weights.data() + static_cast<std::size_t>(t) * wt, wt).noalias() = phi.transpose() * w;
            Mat<Dim> c = map.Rinv * map.Rinv.transpose();
            Eigen::Map<Mat<Dim>>(factors.data() + static_cast<std::size_t>(t) * bs) = Real(0.5) * (c + c.transpose());
        }
    }
    else
    {
        for (Index q = 0; q < rule.num_points(); ++q)
            w(q) = rule.weights[static_cast<std::size_t>(q)];
        const Eigen::VectorXd ref = phi.transpose() * w;
        weights.assign(ref.data(), ref.data() + wt);
        factors.resize(static_cast<std::size_t>(ne) * bs);
        const Mat<Dim> mc = *M.constant_value();
        for (Index t = 0; t < ne; ++t)
        {
            const auto map = affine_map(mesh, t);
            Mat<Dim>   c = map.jacobian() * map.Rinv * mc * map.Rinv.transpose();
            Eigen::Map<Mat<Dim>>(factors.data() + static_cast<std::size_t>(t) * bs) = Real(0.5) * (c + c.transpose());
        }
    }
    return DogipEllipticOperator<Dim>(std::move(dofs), std::move(table), storage, std::move(weights), std::move(factors));
}

template <int Dim>
DogipEllipticOperator<Dim> build_elliptic_dogip(const Mesh<Dim>& mesh, int k, const TensorField<Dim>& M, const QuadratureRule<Dim>& rule,
                                                DogipStorage storage = DogipStorage::full)
{
    return build_elliptic_dogip(mesh, std::make_shared<const DofMap<Dim>>(build_continuous_dofmap(mesh, k)), M, rule, storage);
}

template <typename Op>
std::vector<Real> dogip_matvec(const Op& op, std::span<const Real> u)
{
    return op.apply(u);
}

} // namespace dogip
