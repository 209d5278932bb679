#pragma once

#include "dogip/core.hpp"

#include <span>
#include <vector>

namespace dogip
{

/// Dense row-major 3-index array.
class Tensor3
{
public:
    Tensor3() = default;
    Tensor3(Index n0, Index n1, Index n2)
        : n0_(n0), n1_(n1), n2_(n2), data_(static_cast<std::size_t>(n0) * n1 * n2, Real(0))
    {}

    [[nodiscard]] Index extent(int axis) const noexcept { return axis == 0 ? n0_ : axis == 1 ? n1_ : n2_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    Real& operator()(Index i, Index j, Index k) noexcept { return data_[offset(i, j, k)]; }
    Real  operator()(Index i, Index j, Index k) const noexcept { return data_[offset(i, j, k)]; }

    [[nodiscard]] std::span<const Real> values() const noexcept { return data_; }
    [[nodiscard]] std::span<Real>       values() noexcept { return data_; }

private:
    [[nodiscard]] std::size_t offset(Index i, Index j, Index k) const noexcept
    {
        return (static_cast<std::size_t>(i) * n1_ + j) * n2_ + k;
    }

    Index             n0_ = 0, n1_ = 0, n2_ = 0;
    std::vector<Real> data_;
};

} // namespace dogip
