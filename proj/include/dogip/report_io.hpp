#pragma once

/// @file report_io.hpp
/// Text, CSV and JSON renderings of efficiency reports. CSV and JSON carry
/// full precision and parse back to identical reports; the text table shows
/// efficiencies rounded half-up to two decimals.

#include "dogip/metrics.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <vector>

namespace dogip
{

namespace detail
{

inline std::string format_real(Real v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

inline std::vector<std::string> csv_split(const std::string& line)
{
    std::vector<std::string> out;
    std::string              cur;
    bool                     quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        const char c = line[i];
        if (quoted)
        {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
                cur += line[++i];
            else if (c == '"')
                quoted = false;
            else
                cur += c;
        }
        else if (c == '"')
            quoted = true;
        else if (c == ',')
            out.push_back(std::exchange(cur, {}));
        else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

inline GlobalIndex parse_int(const std::string& s)
{
    GlobalIndex v = 0;
    const auto  res = std::from_chars(s.data(), s.data() + s.size(), v);
    require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorCode::parse_error, "bad integer \"" + s + "\"");
    return v;
}

inline Real parse_real(const std::string& s)
{
    std::size_t pos = 0;
    Real        v = 0;
    try
    {
        v = std::stod(s, &pos);
    }
    catch (const std::exception&)
    {
        pos = 0;
    }
    require(pos == s.size() && !s.empty(), ErrorCode::parse_error, "bad number \"" + s + "\"");
    return v;
}

/// Field table shared by the CSV and JSON codecs.
template <typename Visitor>
void visit_fields(EfficiencyReport& r, Visitor&& v)
{
    v("d", r.d);
    v("N", r.N);
    v("k", r.k);
    v("problem", r.problem);
    v("coefficient", r.coefficient);
    v("mesh", r.mesh);
    v("num_elements", r.num_elements);
    v("dim_v", r.dim_v);
    v("nnz_a", r.nnz_A);
    v("mem_a", r.mem_A);
    v("nnz_a_pattern", r.nnz_A_pattern);
    v("mem_a_pattern", r.mem_A_pattern);
    v("count_model", r.count_model);
    v("mem_a_t", r.mem_A_T);
    v("mem_a_dogip", r.mem_A_dogip);
    v("mem_a_dogip_t", r.mem_A_dogip_T);
    v("nnz_a_dogip", r.nnz_A_dogip);
    v("w_t", r.w_T);
    v("nnz_bhat", r.nnz_Bhat);
    v("nnz_pm1_bhat", r.nnz_pm1_Bhat);
    v("memory_efficiency", r.memory_efficiency);
    v("computational_efficiency", r.computational_efficiency);
}

template <typename T>
std::string field_to_string(const T& value)
{
    if constexpr (std::is_same_v<T, Problem> || std::is_same_v<T, CountModel>)
        return std::string(to_string(value));
    else if constexpr (std::is_same_v<T, std::string>)
        return value;
    else if constexpr (std::is_floating_point_v<T>)
        return format_real(value);
    else
        return std::to_string(value);
}

template <typename T>
void field_from_string(T& value, const std::string& s)
{
    if constexpr (std::is_same_v<T, Problem>)
        value = parse_problem(s);
    else if constexpr (std::is_same_v<T, CountModel>)
        value = parse_count_model(s);
    else if constexpr (std::is_same_v<T, std::string>)
        value = s;
    else if constexpr (std::is_floating_point_v<T>)
        value = parse_real(s);
    else
        value = static_cast<T>(parse_int(s));
}

} // namespace detail

inline std::string reports_to_csv(const std::vector<EfficiencyReport>& rows)
{
    std::ostringstream os;
    EfficiencyReport   probe;
    bool               first = true;
    detail::visit_fields(probe, [&](const char* name, auto&) {
        os << (first ? "" : ",") << name;
        first = false;
    });
    os << '\n';
    for (auto r : rows)
    {
        first = true;
        detail::visit_fields(r, [&](const char*, auto& value) {
            os << (first ? "" : ",") << detail::csv_quote(detail::field_to_string(value));
            first = false;
        });
        os << '\n';
    }
    return os.str();
}

inline std::vector<EfficiencyReport> reports_from_csv(const std::string& text)
{
    std::istringstream            is(text);
    std::string                   line;
    std::vector<EfficiencyReport> rows;
    require(static_cast<bool>(std::getline(is, line)), ErrorCode::parse_error, "missing CSV header");
    const auto header = detail::csv_split(line);
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        const auto cells = detail::csv_split(line);
        require(cells.size() == header.size(), ErrorCode::parse_error, "CSV row has " + std::to_string(cells.size()) + " cells");
        EfficiencyReport r;
        detail::visit_fields(r, [&](const char* name, auto& value) {
            const auto it = std::find(header.begin(), header.end(), name);
            require(it != header.end(), ErrorCode::parse_error, std::string("CSV lacks column ") + name);
            detail::field_from_string(value, cells[static_cast<std::size_t>(it - header.begin())]);
        });
        rows.push_back(std::move(r));
    }
    return rows;
}

inline nlohmann::json reports_to_json(const std::vector<EfficiencyReport>& rows)
{
    auto out = nlohmann::json::array();
    for (auto r : rows)
    {
        nlohmann::json obj = nlohmann::json::object();
        detail::visit_fields(r, [&](const char* name, auto& value) {
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, Problem> || std::is_same_v<T, CountModel>)
                obj[name] = std::string(to_string(value));
            else
                obj[name] = value;
        });
        out.push_back(std::move(obj));
    }
    return out;
}

inline std::vector<EfficiencyReport> reports_from_json(const nlohmann::json& j)
{
    require(j.is_array(), ErrorCode::parse_error, "expected a JSON array of reports");
    std::vector<EfficiencyReport> rows;
    for (const auto& obj : j)
    {
        EfficiencyReport r;
        detail::visit_fields(r, [&](const char* name, auto& value) {
            require(obj.contains(name), ErrorCode::parse_error, std::string("JSON report lacks ") + name);
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, Problem>)
                value = parse_problem(obj.at(name).template get<std::string>());
            else if constexpr (std::is_same_v<T, CountModel>)
                value = parse_count_model(obj.at(name).template get<std::string>());
            else
                value = obj.at(name).template get<T>();
        });
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Human-readable table in the layout of the reference tables.
inline std::string reports_to_text(const std::vector<EfficiencyReport>& rows)
{
    std::ostringstream os;
    os << std::setw(3) << "d" << std::setw(6) << "N" << std::setw(4) << "k" << std::setw(10) << "problem" << std::setw(12) << "dim V"
       << std::setw(14) << "mem A" << std::setw(14) << "(pattern)" << std::setw(10) << "mem A_T" << std::setw(14) << "mem A^DoGIP" << std::setw(12) << "A_T^DoGIP"
       << std::setw(6) << "W_T" << std::setw(10) << "nnz Bhat" << std::setw(9) << "nnz_pm1" << std::setw(9) << "mem eff"
       << std::setw(10) << "comp eff" << '\n';
    for (const auto& r : rows)
    {
        os << std::setw(3) << r.d << std::setw(6) << r.N << std::setw(4) << r.k << std::setw(10) << to_string(r.problem)
           << std::setw(12) << r.dim_v << std::setw(14) << r.mem_A << std::setw(14) << r.mem_A_pattern << std::setw(10) << r.mem_A_T << std::setw(14) << r.mem_A_dogip
           << std::setw(12) << r.mem_A_dogip_T << std::setw(6) << r.w_T << std::setw(10) << r.nnz_Bhat << std::setw(9) << r.nnz_pm1_Bhat
           << std::fixed << std::setprecision(2) << std::setw(9) << round_half_up(r.memory_efficiency) << std::setw(10)
           << round_half_up(r.computational_efficiency) << std::defaultfloat << '\n';
    }
    return os.str();
}

} // namespace dogip
