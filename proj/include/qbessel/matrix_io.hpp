#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "complex_matrix.hpp"

namespace qbessel {

using nlohmann::ordered_json;

// Matrix file format: {"dim": n, "entries": [[re, im], ...]} row-major,
// exactly dim^2 pairs.
inline ordered_json matrix_to_json(const CMatrix& m) {
    ordered_json j;
    j["dim"] = m.dim();
    ordered_json entries = ordered_json::array();
    for (int i = 0; i < m.dim(); ++i)
        for (int k = 0; k < m.dim(); ++k)
            entries.push_back({m.at(i, k).real(), m.at(i, k).imag()});
    j["entries"] = std::move(entries);
    return j;
}

inline CMatrix matrix_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
        throw NumericError(errc::config, "matrix json: need {\"dim\":n,\"entries\":[[re,im],...]}");
    int dim = j["dim"].get<int>();
    if (dim < 1 || dim > 8) throw NumericError(errc::config, "matrix json: dim out of range");
    const auto& e = j["entries"];
    if (!e.is_array() || static_cast<int>(e.size()) != dim * dim)
        throw NumericError(errc::config, "matrix json: entries must hold dim^2 pairs");
    CMatrix m(dim);
    for (int idx = 0; idx < dim * dim; ++idx) {
        const auto& pair = e[static_cast<size_t>(idx)];
        double re = 0.0, im = 0.0;
        if (pair.is_array()) {
            if (pair.empty() || pair.size() > 2)
                throw NumericError(errc::config, "matrix json: entry must be [re] or [re,im]");
            re = pair[0].get<double>();
            if (pair.size() == 2) im = pair[1].get<double>();
        } else if (pair.is_number()) {
            re = pair.get<double>();
        } else {
            throw NumericError(errc::config, "matrix json: bad entry");
        }
        m.entries()[static_cast<size_t>(idx)] = Complex(re, im);
    }
    if (!m.finite()) throw NumericError(errc::config, "matrix json: non-finite entry");
    return m;
}

// Accepts either a path to a matrix json file or an inline JSON array of rows
// (e.g. [[1]], [[1,0],[0,2]]); inline rows hold numbers or [re,im] pairs.
inline CMatrix parse_matrix_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '[') {
        ordered_json rows = ordered_json::parse(arg);
        if (!rows.is_array() || rows.empty())
            throw NumericError(errc::config, "inline matrix: expected array of rows");
        const int dim = static_cast<int>(rows.size());
        CMatrix m(dim);
        for (int i = 0; i < dim; ++i) {
            const auto& row = rows[static_cast<size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != dim)
                throw NumericError(errc::config, "inline matrix: rows must be square");
            for (int k = 0; k < dim; ++k) {
                const auto& cell = row[static_cast<size_t>(k)];
                if (cell.is_array()) {
                    double re = cell.at(0).get<double>();
                    double im = cell.size() > 1 ? cell.at(1).get<double>() : 0.0;
                    m.at(i, k) = Complex(re, im);
                } else {
                    m.at(i, k) = Complex(cell.get<double>(), 0.0);
                }
            }
        }
        return m;
    }
    std::ifstream f(arg);
    if (!f) throw NumericError(errc::config, "cannot open matrix file: " + arg);
    ordered_json j;
    f >> j;
    return matrix_from_json(j);
}

// 15 significant digits per component, the eval-subcommand print format.
inline std::string format_matrix(const CMatrix& m) {
    std::ostringstream os;
    for (int i = 0; i < m.dim(); ++i) {
        os << (i == 0 ? "[[" : " [");
        for (int k = 0; k < m.dim(); ++k) {
            char buf[80];
            const Complex c = m.at(i, k);
            if (c.imag() == 0.0)
                std::snprintf(buf, sizeof buf, "%.15g", c.real());
            else
                std::snprintf(buf, sizeof buf, "%.15g%+.15gi", c.real(), c.imag());
            os << buf << (k + 1 < m.dim() ? ", " : "");
        }
        os << (i + 1 < m.dim() ? "],\n" : "]]");
    }
    return os.str();
}

} // namespace qbessel
