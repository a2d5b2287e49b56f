#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "psidolab/grid.hpp"
#include "psidolab/quantize.hpp"
#include "psidolab/schatten.hpp"

namespace psidolab {

using json = nlohmann::json;

// shortest-roundtrip-style fixed formatting so reports diff cleanly
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json grid_to_json(const GridSpec& g) {
    return json{{"dim", g.dim}, {"samples_per_axis", g.samples_per_axis},
                {"half_width", g.half_width}};
}

inline GridSpec grid_from_json(const json& j) {
    for (const char* key : {"dim", "samples_per_axis", "half_width"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("grid: missing key '") + key + "'");
    return GridSpec(j.at("dim").get<int>(), j.at("samples_per_axis").get<int>(),
                    j.at("half_width").get<double>());
}

// CSV export: one row per lattice point with index columns, coordinate
// columns, then re and im.
inline void write_sampled_csv(const SampledFunction& f, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_sampled_csv: cannot open " + path.string());
    const int axes = f.axes();
    const int n = f.grid.samples_per_axis;
    for (int a = 0; a < axes; ++a) out << "i" << a << ",";
    for (int a = 0; a < axes; ++a) out << "c" << a << ",";
    out << "re,im\n";
    std::vector<int> idx(axes);
    for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
        detail::decode_index(flat, axes, n, idx.data());
        for (int a = 0; a < axes; ++a) out << idx[a] << ",";
        for (int a = 0; a < axes; ++a) out << format_double(f.axis_coord(a, idx[a])) << ",";
        out << format_double(f.values[flat].real()) << ","
            << format_double(f.values[flat].imag()) << "\n";
    }
}

// Kernel matrix as row, col, re, im records.
inline void write_kernel_csv(const OperatorKernel& k, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_kernel_csv: cannot open " + path.string());
    out << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < k.values.rows(); ++i)
        for (Eigen::Index j = 0; j < k.values.cols(); ++j)
            out << i << "," << j << "," << format_double(k.values(i, j).real()) << ","
                << format_double(k.values(i, j).imag()) << "\n";
}

inline json bound_record_to_json(const BoundRecord& r) {
    return json{{"symbol_id", r.symbol_id}, {"tau", r.tau},     {"p", r.p},
                {"lhs", r.lhs},             {"rhs", r.rhs},     {"ratio", r.ratio},
                {"grid", grid_to_json(r.grid)},                 {"flagged", r.flagged}};
}

inline json schatten_report_to_json(const SchattenReport& r) {
    json norms = json::object();
    for (const auto& [p, v] : r.norms) norms[format_double(p)] = v;
    return json{{"symbol_id", r.symbol_id},
                {"tau", r.tau},
                {"grid", grid_to_json(r.grid)},
                {"norms", norms},
                {"singular_values", r.singular_values}};
}

// generic CSV table writer: header plus stringified rows
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

}  // namespace psidolab
