#pragma once

/// @file core.hpp
/// Shared scalar/index types, small fixed-size geometry aliases and the
/// library's exception type.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dogip
{

using Real = double;

/// Identifier of a vertex, element or degree of freedom.
using Index = std::int32_t;
/// Counts and offsets that may exceed 2^31 (nnz, CSR row offsets).
using GlobalIndex = std::int64_t;

template <int Dim>
using Point = Eigen::Matrix<Real, Dim, 1>;

template <int Dim>
using Mat = Eigen::Matrix<Real, Dim, Dim>;

/// Values below this magnitude are treated as zeros in every nnz count.
inline constexpr Real zero_threshold = 1e-14;

enum class ErrorCode
{
    invalid_dimension,
    invalid_size,
    index_out_of_range,
    ill_conditioned_basis,
    point_outside_simplex,
    dimension_mismatch,
    rule_degree_insufficient,
    non_symmetric_coefficient,
    invalid_argument,
    parse_error,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_size: return "invalid-size";
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::ill_conditioned_basis: return "ill-conditioned-basis";
    case ErrorCode::point_outside_simplex: return "point-outside-simplex";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::rule_degree_insufficient: return "rule-degree-insufficient";
    case ErrorCode::non_symmetric_coefficient: return "non-symmetric-coefficient";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::parse_error: return "parse-error";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what)
{
    if (!condition)
        throw Error(code, what);
}

template <int Dim>
constexpr void check_dimension()
{
    static_assert(Dim == 2 || Dim == 3, "only triangles and tetrahedra are supported");
}

constexpr GlobalIndex factorial(int n) noexcept
{
    GlobalIndex r = 1;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

constexpr GlobalIndex binomial(int n, int k) noexcept
{
    if (k < 0 || k > n)
        return 0;
    GlobalIndex r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

/// dim P_k on a Dim-simplex.
constexpr Index polynomial_space_dim(int dim, int order) noexcept
{
    return static_cast<Index>(binomial(order + dim, dim));
}

constexpr GlobalIndex ipow(GlobalIndex base, int exp) noexcept
{
    GlobalIndex r = 1;
    for (int i = 0; i < exp; ++i)
        r *= base;
    return r;
}

} // namespace dogip
