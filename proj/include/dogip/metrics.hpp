#pragma once

/// @file metrics.hpp
/// Entry-count memory and cost model comparing a DoGIP operator with the
/// assembled CSR matrix.
///
///   memory efficiency        = mem_A_dogip / mem_A
///   computational efficiency = (2 (nnz Bhat - nnz_pm1 Bhat) + mem_A_dogip_T) |T| / nnz A
///
/// Unit entries of Bhat cost no multiplication, hence the nnz_pm1 discount.
/// mem_A_dogip_T is the number of weights an element stores (W_T for the
/// weighted projection, d^2 W_T for the elliptic problem); their thresholded
/// count is reported separately since exact zeros among them (for instance
/// vertex integrals of quadratic Lagrange functions) are still stored.
///
/// mem_A counts stored values at or above the zero threshold. Some entries
/// of the sparsity pattern vanish identically on every element (quadratic
/// stiffness between a vertex and the opposite edge midpoint, for example),
/// so the pattern size is reported alongside; the count model selects which
/// of the two feeds the efficiencies.

#include "dogip/csr.hpp"
#include "dogip/operator.hpp"

#include <cmath>
#include <span>
#include <string>

namespace dogip
{

inline GlobalIndex nnz_with_threshold(std::span<const Real> values, Real threshold = zero_threshold)
{
    return std::count_if(values.begin(), values.end(), [threshold](Real v) { return std::abs(v) >= threshold; });
}

inline GlobalIndex nnz_pm1(std::span<const Real> values, Real threshold = zero_threshold)
{
    return std::count_if(values.begin(), values.end(), [threshold](Real v) { return std::abs(std::abs(v) - 1) < threshold; });
}

enum class Problem
{
    wp,
    elliptic,
};

inline std::string_view to_string(Problem p) noexcept { return p == Problem::wp ? "wp" : "elliptic"; }

inline Problem parse_problem(std::string_view s)
{
    if (s == "wp")
        return Problem::wp;
    if (s == "elliptic")
        return Problem::elliptic;
    throw Error(ErrorCode::invalid_argument, "unknown problem \"" + std::string(s) + "\"");
}

enum class CountModel
{
    values,  // stored values with |a| >= threshold
    pattern, // assembled sparsity pattern
};

inline std::string_view to_string(CountModel c) noexcept { return c == CountModel::values ? "values" : "pattern"; }

inline CountModel parse_count_model(std::string_view s)
{
    if (s == "values")
        return CountModel::values;
    if (s == "pattern")
        return CountModel::pattern;
    throw Error(ErrorCode::invalid_argument, "unknown count model \"" + std::string(s) + "\"");
}

struct EfficiencyReport
{
    int         d = 0;
    int         N = 0;
    int         k = 0;
    Problem     problem = Problem::wp;
    std::string coefficient;
    std::string mesh;
    GlobalIndex num_elements = 0;
    GlobalIndex dim_v = 0;
    GlobalIndex nnz_A = 0;
    GlobalIndex mem_A = 0;
    GlobalIndex nnz_A_pattern = 0;
    GlobalIndex mem_A_pattern = 0;
    CountModel  count_model = CountModel::values;
    GlobalIndex mem_A_T = 0;
    GlobalIndex mem_A_dogip = 0;
    GlobalIndex mem_A_dogip_T = 0;
    /// Thresholded count of all stored DoGIP weights (informational).
    GlobalIndex nnz_A_dogip = 0;
    GlobalIndex w_T = 0;
    GlobalIndex nnz_Bhat = 0;
    GlobalIndex nnz_pm1_Bhat = 0;
    Real        memory_efficiency = 0;
    Real        computational_efficiency = 0;

    bool operator==(const EfficiencyReport&) const = default;
};

inline Real memory_efficiency(const EfficiencyReport& r)
{
    const GlobalIndex mem = r.count_model == CountModel::values ? r.mem_A : r.mem_A_pattern;
    return static_cast<Real>(r.mem_A_dogip) / static_cast<Real>(mem);
}

inline Real computational_efficiency(const EfficiencyReport& r)
{
    const GlobalIndex nnz = r.count_model == CountModel::values ? r.nnz_A : r.nnz_A_pattern;
    const GlobalIndex per_element = 2 * (r.nnz_Bhat - r.nnz_pm1_Bhat) + r.mem_A_dogip_T;
    return static_cast<Real>(per_element * r.num_elements) / static_cast<Real>(nnz);
}

/// Rounds half away from zero at the given number of decimals.
inline Real round_half_up(Real x, int decimals = 2)
{
    const Real scale = std::pow(10.0, decimals);
    return std::round(x * scale) / scale;
}

/// Fills the raw fields from an assembled matrix and a full-storage DoGIP
/// operator of the same configuration, then derives the efficiencies.
/// pattern_nnz comes from the assembly diagnostics (0: same as nnz A).
template <int Dim, typename Op>
EfficiencyReport build_report(const Mesh<Dim>& mesh, const CsrMatrix& a, const Op& op, Problem problem, std::string coefficient,
                              GlobalIndex pattern_nnz = 0, CountModel model = CountModel::values)
{
    require(op.storage() == DogipStorage::full, ErrorCode::invalid_argument, "efficiency accounting uses full per-element storage");
    require(a.nrows == op.dim(), ErrorCode::dimension_mismatch, "matrix and operator describe different spaces");
    EfficiencyReport r;
    r.d = Dim;
    r.N = mesh.subdivisions();
    r.k = op.order();
    r.problem = problem;
    r.coefficient = std::move(coefficient);
    r.num_elements = mesh.num_elements();
    r.dim_v = a.nrows;
    r.nnz_A = a.nnz();
    r.mem_A = a.memory();
    r.nnz_A_pattern = pattern_nnz > 0 ? pattern_nnz : a.nnz();
    r.mem_A_pattern = 2 * r.nnz_A_pattern + a.nrows;
    r.count_model = model;
    const GlobalIndex vt = op.dofs().local_size();
    r.mem_A_T = vt * vt;
    r.mem_A_dogip_T = op.stored_entries_per_element();
    r.mem_A_dogip = r.mem_A_dogip_T * r.num_elements;
    r.nnz_A_dogip = op.nnz_weights();
    r.w_T = op.w_local();
    r.nnz_Bhat = nnz_with_threshold(op.table().values());
    r.nnz_pm1_Bhat = nnz_pm1(op.table().values());
    r.memory_efficiency = memory_efficiency(r);
    r.computational_efficiency = computational_efficiency(r);
    return r;
}

} // namespace dogip
