#pragma once

// File formats: matrix / algebra / map JSON, verification reports, numerical
// range CSV and SVG.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "realpos/algebra.hpp"
#include "realpos/linalg.hpp"
#include "realpos/maps.hpp"
#include "realpos/numrange.hpp"
#include "realpos/report.hpp"

namespace realpos {

using json = nlohmann::ordered_json;

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("write to '" + path + "' failed");
}

inline json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(what + ": malformed JSON (" + e.what() + ")");
    }
}

// ---------------------------------------------------------------------------
// matrices

inline json entries_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline CMatrix entries_from_json(const json& rows, Eigen::Index nr, Eigen::Index nc, const std::string& what) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != nr) {
        throw InputError(what + ": expected " + std::to_string(nr) + " rows");
    }
    CMatrix m(nr, nc);
    for (Eigen::Index i = 0; i < nr; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != nc) {
            throw InputError(what + ": row " + std::to_string(i) + " must have " + std::to_string(nc) + " entries");
        }
        for (Eigen::Index j = 0; j < nc; ++j) {
            const json& e = row[static_cast<std::size_t>(j)];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw InputError(what + ": entry (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") must be a [re, im] pair of numbers");
            }
            const double re = e[0].get<double>(), im = e[1].get<double>();
            if (!std::isfinite(re) || !std::isfinite(im)) throw InputError(what + ": non-finite entry");
            m(i, j) = cplx(re, im);
        }
    }
    return m;
}

/// {"n": n, "entries": [[[re, im], ...], ...]}
inline json matrix_to_json(const CMatrix& m) {
    json j;
    j["n"] = m.rows();
    j["entries"] = entries_to_json(m);
    return j;
}

inline CMatrix matrix_from_json(const json& j, const std::string& what = "matrix") {
    if (!j.is_object() || !j.contains("n") || !j.contains("entries")) {
        throw InputError(what + ": expected an object with fields \"n\" and \"entries\"");
    }
    if (!j["n"].is_number_integer() || j["n"].get<long long>() <= 0) {
        throw InputError(what + ": \"n\" must be a positive integer");
    }
    const auto n = static_cast<Eigen::Index>(j["n"].get<long long>());
    return entries_from_json(j["entries"], n, n, what);
}

inline CMatrix read_matrix_file(const std::string& path) {
    return matrix_from_json(parse_json_text(read_text_file(path), path), path);
}

// ---------------------------------------------------------------------------
// algebras and maps

/// {"ambient_n": n, "unit": matrix | null, "basis": [matrix, ...]}
inline json algebra_to_json(const SubalgebraBasis& a) {
    json j;
    j["ambient_n"] = a.n();
    j["unit"] = a.unit() ? matrix_to_json(*a.unit()) : json(nullptr);
    json b = json::array();
    for (const auto& m : a.basis()) b.push_back(matrix_to_json(m));
    j["basis"] = std::move(b);
    return j;
}

inline SubalgebraBasis algebra_from_json(const json& j, const Tolerances& tol = {}) {
    if (!j.is_object() || !j.contains("ambient_n") || !j.contains("basis")) {
        throw InputError("algebra: expected fields \"ambient_n\" and \"basis\"");
    }
    if (!j["ambient_n"].is_number_integer() || j["ambient_n"].get<long long>() <= 0) {
        throw InputError("algebra: \"ambient_n\" must be a positive integer");
    }
    const auto n = static_cast<Eigen::Index>(j["ambient_n"].get<long long>());
    if (!j["basis"].is_array()) throw InputError("algebra: \"basis\" must be an array");
    std::vector<CMatrix> basis;
    for (const auto& m : j["basis"]) {
        basis.push_back(matrix_from_json(m, "algebra basis"));
        if (basis.back().rows() != n) throw InputError("algebra: basis element dimension differs from ambient_n");
    }
    std::optional<CMatrix> unit;
    if (j.contains("unit") && !j["unit"].is_null()) unit = matrix_from_json(j["unit"], "algebra unit");
    return SubalgebraBasis::make(AmbientContext::full(n), std::move(basis), unit, tol);
}

/// {"domain": algebra, "codomain": algebra, "action": {"rows", "cols", "entries"}, "full_domain": bool}
inline json map_to_json(const LinearMapOnAlgebra& t) {
    json j;
    j["domain"] = algebra_to_json(t.domain());
    j["codomain"] = algebra_to_json(t.codomain());
    j["action"] = {{"rows", t.action().rows()}, {"cols", t.action().cols()}, {"entries", entries_to_json(t.action())}};
    j["full_domain"] = t.full_domain();
    return j;
}

inline LinearMapOnAlgebra map_from_json(const json& j, const Tolerances& tol = {}) {
    if (!j.is_object() || !j.contains("domain") || !j.contains("codomain") || !j.contains("action")) {
        throw InputError("map: expected fields \"domain\", \"codomain\" and \"action\"");
    }
    SubalgebraBasis dom = algebra_from_json(j["domain"], tol);
    SubalgebraBasis cod = algebra_from_json(j["codomain"], tol);
    const json& a = j["action"];
    if (!a.is_object() || !a.contains("rows") || !a.contains("cols") || !a.contains("entries")) {
        throw InputError("map: \"action\" must have rows, cols and entries");
    }
    const auto r = static_cast<Eigen::Index>(a["rows"].get<long long>());
    const auto c = static_cast<Eigen::Index>(a["cols"].get<long long>());
    LinearMapOnAlgebra t(std::move(dom), std::move(cod), entries_from_json(a["entries"], r, c, "map action"));
    if (j.contains("full_domain") && j["full_domain"].is_boolean() && j["full_domain"].get<bool>() != t.full_domain()) {
        throw InputError("map: \"full_domain\" disagrees with the domain basis");
    }
    return t;
}

// ---------------------------------------------------------------------------
// reports

/// Finite numbers as JSON numbers; others as "Infinity", "-Infinity" or "NaN".
inline json number_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "NaN";
    return v > 0 ? "Infinity" : "-Infinity";
}

inline json report_to_json(const VerificationReport& r) {
    json j;
    j["suite"] = r.suite;
    j["inputs_digest"] = r.inputs_digest;
    j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    j["passed"] = r.passed();
    json conds = json::array();
    for (const auto& c : r.conditions) {
        conds.push_back({{"name", c.name},
                         {"kind", c.kind == Condition::Kind::check ? "check" : "info"},
                         {"passed", c.passed},
                         {"residual", number_json(c.residual)},
                         {"tolerance", number_json(c.tolerance)},
                         {"note", c.note}});
    }
    j["conditions"] = std::move(conds);
    json vals = json::object();
    for (const auto& [k, v] : r.values) vals[k] = number_json(v);
    j["values"] = std::move(vals);
    j["wall_time_s"] = r.wall_time_s;
    return j;
}

inline json tolerances_to_json(const Tolerances& t) {
    return {{"eq_tol", t.eq_tol}, {"psd_tol", t.psd_tol}, {"conv_tol", t.conv_tol}};
}

/// Report file, schema version "1".
inline json report_file(const std::string& command, std::optional<std::uint64_t> seed, const Tolerances& tol,
                        const std::vector<VerificationReport>& instances) {
    json j;
    j["schema_version"] = "1";
    j["command"] = command;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["tolerances"] = tolerances_to_json(tol);
    json arr = json::array();
    for (const auto& r : instances) arr.push_back(report_to_json(r));
    j["instances"] = std::move(arr);
    return j;
}

// ---------------------------------------------------------------------------
// numerical range plots

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// theta,h_theta,re,im with LF line endings.
inline std::string boundary_csv(const RangeBoundary& rb) {
    std::string out = "theta,h_theta,re,im\n";
    for (std::size_t i = 0; i < rb.angles.size(); ++i) {
        out += format_g17(rb.angles[i]) + "," + format_g17(rb.support_values[i]) + "," +
               format_g17(rb.boundary_points[i].real()) + "," + format_g17(rb.boundary_points[i].imag()) + "\n";
    }
    return out;
}

/// 800 x 800 plot: boundary polygon, axes, unit circle, shaded Re z >= 0.
inline std::string boundary_svg(const RangeBoundary& rb) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& p : rb.boundary_points) {
        lo_x = std::min(lo_x, p.real());
        hi_x = std::max(hi_x, p.real());
        lo_y = std::min(lo_y, p.imag());
        hi_y = std::max(hi_y, p.imag());
    }
    double w = hi_x - lo_x, h = hi_y - lo_y;
    double side = std::max({w, h, 1e-6 * std::max({1.0, std::abs(lo_x), std::abs(lo_y)})});
    const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    side *= 1.2;  // 10% margin on each side
    const double vx = cx - side / 2, vy = -cy - side / 2;  // SVG y points down
    const double sw = side / 400;
    auto f = [](double v) { return format_g17(v); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"" << f(vx) << ' ' << f(vy)
      << ' ' << f(side) << ' ' << f(side) << "\">\n";
    // right half-plane
    const double rx = std::max(vx, 0.0);
    if (rx < vx + side) {
        s << "  <rect x=\"" << f(rx) << "\" y=\"" << f(vy) << "\" width=\"" << f(vx + side - rx) << "\" height=\""
          << f(side) << "\" fill=\"#e8f4e8\"/>\n";
    }
    s << "  <line x1=\"" << f(vx) << "\" y1=\"0\" x2=\"" << f(vx + side) << "\" y2=\"0\" stroke=\"#888\" stroke-width=\""
      << f(sw) << "\"/>\n";
    s << "  <line x1=\"0\" y1=\"" << f(vy) << "\" x2=\"0\" y2=\"" << f(vy + side) << "\" stroke=\"#888\" stroke-width=\""
      << f(sw) << "\"/>\n";
    s << "  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#4a7ab8\" stroke-dasharray=\"" << f(4 * sw) << ' '
      << f(4 * sw) << "\" stroke-width=\"" << f(sw) << "\"/>\n";
    s << "  <polygon fill=\"#f2c4a0\" fill-opacity=\"0.6\" stroke=\"#b34700\" stroke-width=\"" << f(1.5 * sw)
      << "\" points=\"";
    for (std::size_t i = 0; i < rb.boundary_points.size(); ++i) {
        if (i) s << ' ';
        s << f(rb.boundary_points[i].real()) << ',' << f(-rb.boundary_points[i].imag());
    }
    s << "\"/>\n</svg>\n";
    return s.str();
}

}  // namespace realpos
