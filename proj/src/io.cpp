#include "qcascade/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace qcascade {

using nlohmann::json;

namespace {

double checked_number(const json& j, const char* what) {
    if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(std::string(what) + ": non-finite value");
    return v;
}

}  // namespace

json real_matrix_to_json(const RealMatrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json complex_matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

RealMatrix real_matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix: expected a non-empty array of rows");
    const Index rows = static_cast<Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) throw ParseError("matrix: rows must be arrays");
    const Index cols = static_cast<Index>(j[0].size());
    RealMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw ParseError("matrix: ragged rows");
        for (Index c = 0; c < cols; ++c)
            m(r, c) = checked_number(row[static_cast<std::size_t>(c)], "matrix entry");
    }
    return m;
}

ComplexMatrix complex_matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("complex matrix: expected rows");
    const Index rows = static_cast<Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) throw ParseError("complex matrix: rows must be arrays");
    const Index cols = static_cast<Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw ParseError("complex matrix: ragged rows");
        for (Index c = 0; c < cols; ++c) {
            const json& e = row[static_cast<std::size_t>(c)];
            if (!e.is_array() || e.size() != 2)
                throw ParseError("complex matrix: entries must be [re, im] pairs");
            m(r, c) = Complex(checked_number(e[0], "complex entry"),
                              checked_number(e[1], "complex entry"));
        }
    }
    return m;
}

namespace {

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace

RealMatrix read_matrix_file(const std::string& path) {
    json j = parse_file(path);
    if (j.is_array()) return real_matrix_from_json(j);
    if (j.is_object() && j.contains("matrix")) return real_matrix_from_json(j["matrix"]);
    throw ParseError(path + ": expected a matrix file");
}

void write_matrix_file(const std::string& path, const RealMatrix& m) {
    json j;
    j["schema_version"] = 1;
    j["matrix"] = real_matrix_to_json(m);
    write_text_file(path, j.dump(2) + "\n");
}

SystemVariant read_system_file(const std::string& path) {
    json j = parse_file(path);
    if (!j.is_object()) throw ParseError(path + ": expected a system object");
    const std::string mode = j.value("mode", "");
    try {
        if (mode == "quadrature") {
            return QuadSystem(real_matrix_from_json(j.at("A")), real_matrix_from_json(j.at("B")),
                              real_matrix_from_json(j.at("C")), real_matrix_from_json(j.at("D")));
        }
        if (mode == "sdh") {
            return SdhSystem(complex_matrix_from_json(j.at("S")),
                             complex_matrix_from_json(j.at("K")),
                             real_matrix_from_json(j.at("R")));
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ShapeMismatch& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const DimensionOdd& e) {
        throw ParseError(path + ": " + e.what());
    }
    throw ParseError(path + ": mode must be \"quadrature\" or \"sdh\"");
}

json system_to_json(const QuadSystem& g) {
    json j;
    j["schema_version"] = 1;
    j["mode"] = "quadrature";
    j["n"] = g.n;
    j["m"] = g.m;
    j["A"] = real_matrix_to_json(g.A);
    j["B"] = real_matrix_to_json(g.B);
    j["C"] = real_matrix_to_json(g.C);
    j["D"] = real_matrix_to_json(g.D);
    return j;
}

json system_to_json(const SdhSystem& g) {
    json j;
    j["schema_version"] = 1;
    j["mode"] = "sdh";
    j["n"] = g.n;
    j["m"] = g.m;
    j["S"] = complex_matrix_to_json(g.S);
    j["K"] = complex_matrix_to_json(g.K);
    j["R"] = real_matrix_to_json(g.R);
    return j;
}

json cascade_to_json(const CascadeRealization& cascade, Index n, Index m) {
    json j;
    j["n"] = n;
    j["m"] = m;
    j["T"] = real_matrix_to_json(cascade.T);
    j["permutation"] = cascade.permutation;
    json subs = json::array();
    for (const auto& sub : cascade.subsystems) {
        json s;
        s["scattering"] = complex_matrix_to_json(sub.scattering);
        s["K"] = complex_matrix_to_json(sub.K);
        s["R"] = real_matrix_to_json(sub.R);
        subs.push_back(std::move(s));
    }
    j["subsystems"] = std::move(subs);
    return j;
}

CascadeRealization cascade_from_json(const json& j) {
    CascadeRealization cascade;
    try {
        cascade.T = real_matrix_from_json(j.at("T"));
        for (const auto& p : j.at("permutation")) cascade.permutation.push_back(p.get<Index>());
        for (const auto& s : j.at("subsystems")) {
            OneDofSystem sub;
            sub.scattering = complex_matrix_from_json(s.at("scattering"));
            sub.K = complex_matrix_from_json(s.at("K"));
            sub.R = real_matrix_from_json(s.at("R"));
            cascade.subsystems.push_back(std::move(sub));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("cascade: ") + e.what());
    }
    if (cascade.subsystems.empty()) throw ParseError("cascade: no subsystems");
    return cascade;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::uint64_t hash = 1469598103934665603ull;
    char ch;
    while (in.get(ch)) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << hash;
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
}

}  // namespace qcascade
