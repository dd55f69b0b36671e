#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "octovisc/certificate.hpp"
#include "octovisc/errors.hpp"
#include "octovisc/isaacs.hpp"
#include "octovisc/linalg.hpp"
#include "octovisc/operator.hpp"
#include "octovisc/singular.hpp"
#include "octovisc/trilinear.hpp"

namespace octovisc {

using Json = nlohmann::json;

// --- canonical text ---------------------------------------------------------------

namespace detail {

inline void write_number(std::string& out, double v) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

inline void write_canonical(std::string& out, const Json& j, int depth) {
    const std::string pad(std::size_t(2 * (depth + 1)), ' ');
    const std::string close(std::size_t(2 * depth), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [k, v] : j.items()) { // std::map: keys already sorted
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(k).dump() + ": ";
            write_canonical(out, v, depth + 1);
        }
        out += "\n" + close + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // arrays of scalars stay on one line
        bool flat = true;
        for (const auto& v : j) flat = flat && !v.is_structured();
        if (flat) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                write_canonical(out, j[i], depth + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            write_canonical(out, j[i], depth + 1);
        }
        out += "\n" + close + "]";
        return;
    }
    case Json::value_t::number_float:
        write_number(out, j.get<double>());
        return;
    default:
        out += j.dump();
    }
}

inline void write_compact(std::string& out, const Json& j) {
    switch (j.type()) {
    case Json::value_t::object: {
        out += "{";
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) out += ",";
            first = false;
            out += Json(k).dump() + ":";
            write_compact(out, v);
        }
        out += "}";
        return;
    }
    case Json::value_t::array:
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",";
            write_compact(out, j[i]);
        }
        out += "]";
        return;
    case Json::value_t::number_float:
        write_number(out, j.get<double>());
        return;
    default:
        out += j.dump();
    }
}

} // namespace detail

/// Sorted keys, two-space indentation, %.17g floats, non-finite as null.
inline std::string canonical_json(const Json& j) {
    std::string out;
    detail::write_canonical(out, j, 0);
    out += "\n";
    return out;
}

/// Single-line form of canonical_json.
inline std::string compact_json(const Json& j) {
    std::string out;
    detail::write_compact(out, j);
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("write to " + path + " failed");
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline Json read_json(const std::string& path) {
    try {
        return Json::parse(read_text(path));
    } catch (const Json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

// --- domain types --------------------------------------------------------------------

inline Json to_json(const Certificate& c) {
    Json extremes = Json::object();
    for (const auto& [k, v] : c.extremes) extremes[k] = v;
    Json meta = Json::object();
    for (const auto& [k, v] : c.metadata) meta[k] = v;
    return Json{{"name", c.name},         {"seed", c.seed},
                {"samples", c.samples},   {"skipped", c.skipped},
                {"failures", c.failures}, {"worst_residual", c.worst_residual},
                {"tolerance", c.tolerance}, {"pass", c.pass},
                {"extremes", extremes},   {"metadata", meta}};
}

inline Certificate certificate_from_json(const Json& j) {
    auto num = [](const Json& v) { return v.is_null() ? NAN : v.get<double>(); };
    Certificate c;
    c.name = j.at("name").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.samples = j.at("samples").get<std::uint64_t>();
    c.skipped = j.value("skipped", std::uint64_t{0});
    c.failures = j.value("failures", std::uint64_t{0});
    c.worst_residual = num(j.at("worst_residual"));
    c.tolerance = num(j.at("tolerance"));
    c.pass = j.at("pass").get<bool>();
    if (j.contains("extremes"))
        for (const auto& [k, v] : j["extremes"].items()) c.extremes[k] = num(v);
    if (j.contains("metadata"))
        for (const auto& [k, v] : j["metadata"].items()) c.metadata[k] = v.get<std::string>();
    return c;
}

inline Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        rows.push_back(Json(std::vector<double>(r.begin(), r.end())));
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw IoError("matrix must be a non-empty array of rows");
    const std::size_t rows = j.size(), cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw IoError("matrix rows have different lengths");
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

inline Json to_json(const Spectrum& s) { return Json(s.values); }

inline Json to_json(const TriplePoint& v) {
    return Json{{"X", std::vector<double>(v.x.c.begin(), v.x.c.end())},
                {"Y", std::vector<double>(v.y.c.begin(), v.y.c.end())},
                {"Z", std::vector<double>(v.z.c.begin(), v.z.c.end())}};
}

inline TriplePoint triple_from_json(const Json& j) {
    TriplePoint v;
    auto fill = [&](const char* key, Octonion& o) {
        const auto& a = j.at(key);
        if (!a.is_array() || a.size() != 8) throw IoError(std::string("point field ") + key + " needs 8 numbers");
        for (std::size_t i = 0; i < 8; ++i) o.c[i] = a[i].get<double>();
    };
    fill("X", v.x);
    fill("Y", v.y);
    fill("Z", v.z);
    return v;
}

inline Json to_json(const Subspace& h) { return Json{{"basis", to_json(h.basis())}}; }

inline Subspace subspace_from_json(const Json& j, std::string label = "file") {
    return Subspace(matrix_from_json(j.at("basis")), std::move(label));
}

inline Json to_json(const Pencil& p) { return Json{{"F1", to_json(p.f1)}, {"F2", to_json(p.f2)}}; }

inline Pencil pencil_from_json(const Json& j) {
    return Pencil(matrix_from_json(j.at("F1")), matrix_from_json(j.at("F2")));
}

inline Json to_json(const PositiveWitness& w) {
    return Json{{"Q", to_json(w.q)},           {"C", w.ellipticity},      {"a2", w.a2},
                {"a", w.a},                    {"m", w.m},                {"residual_F1", w.residual1},
                {"residual_F2", w.residual2},  {"lambda_min", w.lambda_min}, {"restarts", w.restarts_used}};
}

// --- operator tables as JSON lines ------------------------------------------------

inline Json table_header(const OperatorTable& t) {
    const auto& m = t.metadata();
    return Json{{"type", "header"},
                {"n", t.cone().n},
                {"lambda_aspect", t.cone().lambda_aspect},
                {"delta", m.delta},
                {"subspace", m.subspace},
                {"samples", m.samples},
                {"seed", m.seed},
                {"entries", t.size()},
                {"pairs_checked", m.pairs_checked},
                {"violations", m.violations},
                {"symmetrization", "sort-descending"}};
}

inline void write_table(const OperatorTable& t, const std::string& path) {
    std::string text = compact_json(table_header(t)) + "\n";
    for (const auto& e : t.entries()) text += compact_json(Json{{"z", e.z}, {"s", e.s}}) + "\n";
    write_text(path, text);
}

inline OperatorTable read_table(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty table file");
    Json head;
    try {
        head = Json::parse(line);
    } catch (const Json::exception& e) {
        throw IoError(path + ": bad header: " + e.what());
    }
    if (head.value("type", "") != "header") throw IoError(path + ": first line is not a header record");
    const ConeParams cone(head.at("lambda_aspect").get<double>(), head.at("n").get<std::size_t>());
    TableMetadata meta;
    meta.delta = head.value("delta", 1.0);
    meta.subspace = head.value("subspace", std::string("unknown"));
    meta.samples = head.value("samples", std::uint64_t{0});
    meta.seed = head.value("seed", std::uint64_t{0});
    meta.pairs_checked = head.value("pairs_checked", std::uint64_t{0});
    meta.violations = head.value("violations", std::uint64_t{0});
    std::vector<OperatorTable::Entry> entries;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const Json j = Json::parse(line);
            entries.push_back({j.at("z").get<Vector>(), j.at("s").get<double>()});
        } catch (const Json::exception& e) {
            throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    try {
        return OperatorTable(cone, meta, std::move(entries));
    } catch (const DimensionMismatch& e) {
        throw IoError(path + ": " + e.what());
    }
}

/// Union of two tables with the same cone; the K-cone condition is re-checked
/// on `pairs` random pairs.
inline OperatorTable merge_tables(const OperatorTable& a, const OperatorTable& b, std::uint64_t pairs,
                                  std::uint64_t seed) {
    if (a.cone().n != b.cone().n || a.cone().lambda_aspect != b.cone().lambda_aspect)
        throw DimensionMismatch("tables use different cones");
    std::vector<OperatorTable::Entry> entries = a.entries();
    entries.insert(entries.end(), b.entries().begin(), b.entries().end());
    TableMetadata meta = a.metadata();
    meta.samples = a.metadata().samples + b.metadata().samples;
    if (a.metadata().subspace != b.metadata().subspace) meta.subspace += "+" + b.metadata().subspace;
    OperatorTable merged(a.cone(), meta, std::move(entries));
    const Certificate check = cone_pair_audit(merged, pairs, seed);
    if (check.failures > 0)
        throw ConeViolation("merged table violates the K-cone condition on " + std::to_string(check.failures) +
                                " pairs",
                            check.failures);
    meta.pairs_checked = check.samples;
    meta.violations = 0;
    return OperatorTable(merged.cone(), meta, merged.entries());
}

// --- reports ---------------------------------------------------------------------------

inline void write_report(const Json& report, const std::string& path) { write_text(path, canonical_json(report)); }

inline void write_report(const Certificate& c, const std::string& path) { write_report(to_json(c), path); }

/// certificate,key,value rows of the extremal statistics.
inline void write_csv(const std::vector<Certificate>& certs, const std::string& path) {
    std::string text = "certificate,key,value\n";
    for (const auto& c : certs)
        for (const auto& [k, v] : c.extremes) {
            text += c.name + "," + k + ",";
            detail::write_number(text, v);
            text += "\n";
        }
    write_text(path, text);
}

} // namespace octovisc
