#pragma once

/// @file csr.hpp
/// Compressed sparse row storage with the entry-count memory model
/// mem = 2 nnz + nrows (one value and one column index per nonzero plus one
/// offset per row).

#include "dogip/core.hpp"

#include <algorithm>
#include <ostream>
#include <span>
#include <vector>

namespace dogip
{

struct CsrMatrix
{
    Index                    nrows = 0;
    Index                    ncols = 0;
    std::vector<GlobalIndex> row_offsets{0};
    std::vector<Index>       col_indices;
    std::vector<Real>        values;

    [[nodiscard]] GlobalIndex nnz() const noexcept { return static_cast<GlobalIndex>(values.size()); }
    [[nodiscard]] GlobalIndex memory() const noexcept { return 2 * nnz() + nrows; }

    [[nodiscard]] std::span<const Index> row_cols(Index i) const
    {
        const auto b = static_cast<std::size_t>(row_offsets[static_cast<std::size_t>(i)]);
        const auto e = static_cast<std::size_t>(row_offsets[static_cast<std::size_t>(i) + 1]);
        return {col_indices.data() + b, e - b};
    }
    [[nodiscard]] std::span<const Real> row_values(Index i) const
    {
        const auto b = static_cast<std::size_t>(row_offsets[static_cast<std::size_t>(i)]);
        const auto e = static_cast<std::size_t>(row_offsets[static_cast<std::size_t>(i) + 1]);
        return {values.data() + b, e - b};
    }

    /// Entry (i, j), zero if not stored.
    [[nodiscard]] Real at(Index i, Index j) const
    {
        const auto cols = row_cols(i);
        const auto it = std::lower_bound(cols.begin(), cols.end(), j);
        if (it == cols.end() || *it != j)
            return 0;
        return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
    }

    /// Removes stored entries with |v| < threshold.
    void drop_below(Real threshold)
    {
        GlobalIndex out = 0, begin = 0;
        for (Index i = 0; i < nrows; ++i)
        {
            const GlobalIndex end = row_offsets[static_cast<std::size_t>(i) + 1];
            for (GlobalIndex p = begin; p < end; ++p)
                if (std::abs(values[static_cast<std::size_t>(p)]) >= threshold)
                {
                    values[static_cast<std::size_t>(out)] = values[static_cast<std::size_t>(p)];
                    col_indices[static_cast<std::size_t>(out)] = col_indices[static_cast<std::size_t>(p)];
                    ++out;
                }
            begin = end;
            row_offsets[static_cast<std::size_t>(i) + 1] = out;
        }
        values.resize(static_cast<std::size_t>(out));
        values.shrink_to_fit();
        col_indices.resize(static_cast<std::size_t>(out));
        col_indices.shrink_to_fit();
    }

    [[nodiscard]] Eigen::MatrixXd to_dense() const
    {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nrows, ncols);
        for (Index i = 0; i < nrows; ++i)
        {
            const auto c = row_cols(i);
            const auto v = row_values(i);
            for (std::size_t p = 0; p < c.size(); ++p)
                d(i, c[p]) = v[p];
        }
        return d;
    }

    static CsrMatrix from_dense(const Eigen::MatrixXd& d, Real threshold = zero_threshold)
    {
        CsrMatrix a;
        a.nrows = static_cast<Index>(d.rows());
        a.ncols = static_cast<Index>(d.cols());
        for (Index i = 0; i < a.nrows; ++i)
        {
            for (Index j = 0; j < a.ncols; ++j)
                if (std::abs(d(i, j)) >= threshold)
                {
                    a.col_indices.push_back(j);
                    a.values.push_back(d(i, j));
                }
            a.row_offsets.push_back(static_cast<GlobalIndex>(a.values.size()));
        }
        return a;
    }

    static CsrMatrix identity(Index n)
    {
        CsrMatrix a;
        a.nrows = a.ncols = n;
        for (Index i = 0; i < n; ++i)
        {
            a.col_indices.push_back(i);
            a.values.push_back(1);
            a.row_offsets.push_back(i + 1);
        }
        return a;
    }
};

inline std::vector<Real> csr_matvec(const CsrMatrix& a, std::span<const Real> u)
{
    require(static_cast<Index>(u.size()) == a.ncols, ErrorCode::dimension_mismatch,
            "vector of length " + std::to_string(u.size()) + " for a matrix with " + std::to_string(a.ncols) + " columns");
    std::vector<Real> v(static_cast<std::size_t>(a.nrows), 0);
    for (Index i = 0; i < a.nrows; ++i)
    {
        Real s = 0;
        for (GlobalIndex p = a.row_offsets[static_cast<std::size_t>(i)]; p < a.row_offsets[static_cast<std::size_t>(i) + 1]; ++p)
            s += a.values[static_cast<std::size_t>(p)] * u[static_cast<std::size_t>(a.col_indices[static_cast<std::size_t>(p)])];
        v[static_cast<std::size_t>(i)] = s;
    }
    return v;
}

/// max |A - A^T| over stored entries of either matrix.
inline Real max_asymmetry(const CsrMatrix& a)
{
    Real worst = 0;
    for (Index i = 0; i < a.nrows; ++i)
    {
        const auto c = a.row_cols(i);
        const auto v = a.row_values(i);
        for (std::size_t p = 0; p < c.size(); ++p)
            worst = std::max(worst, std::abs(v[p] - a.at(c[p], i)));
    }
    return worst;
}

/// Matrix Market coordinate format, general real.
inline void write_matrix_market(std::ostream& os, const CsrMatrix& a)
{
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.nrows << ' ' << a.ncols << ' ' << a.nnz() << '\n';
    os.precision(17);
    for (Index i = 0; i < a.nrows; ++i)
    {
        const auto c = a.row_cols(i);
        const auto v = a.row_values(i);
        for (std::size_t p = 0; p < c.size(); ++p)
            os << i + 1 << ' ' << c[p] + 1 << ' ' << v[p] << '\n';
    }
}

} // namespace dogip
