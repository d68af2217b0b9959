#include <json.hpp>

#include "flatreg/errors.hpp"
#include "flatreg/surface.hpp"

namespace flatreg {

using nlohmann::json;

std::string to_json(const TranslationSurface& X) {
    json j;
    json tris = json::array();
    for (const auto& t : X.triangles) {
        json tr = json::array();
        for (const cplx& e : t.e) tr.push_back({e.real(), e.imag()});
        tris.push_back(tr);
    }
    j["triangles"] = tris;
    json gl = json::array();
    for (int s = 0; s < static_cast<int>(X.glue.size()); ++s) {
        const int p = X.glue[s];
        if (p > s) gl.push_back({{s / 3, s % 3}, {p / 3, p % 3}});
    }
    j["gluings"] = gl;
    json z = json::object();
    for (const auto& [v, m] : X.zeros) z[std::to_string(v)] = m;
    j["zeros"] = z;
    if (X.has_classes()) {
        json ec = json::array();
        for (Eigen::Index r = 0; r < X.edge_class.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < X.edge_class.cols(); ++c) row.push_back(X.edge_class(r, c));
            ec.push_back(row);
        }
        j["edge_classes"] = ec;
    }
    return j.dump(2);
}

TranslationSurface surface_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("surface file is not valid JSON: ") + e.what());
    }
    for (const char* key : {"triangles", "gluings", "zeros"})
        if (!j.contains(key)) throw ConfigError(std::string("surface file lacks '") + key + "'");
    TranslationSurface X;
    try {
        for (const auto& tr : j.at("triangles")) {
            if (tr.size() != 3) throw ConfigError("triangle does not have three edges");
            Triangle T;
            for (int k = 0; k < 3; ++k) T.e[k] = cplx(tr[k].at(0).get<double>(), tr[k].at(1).get<double>());
            X.triangles.push_back(T);
        }
        const int n = 3 * X.num_triangles();
        X.glue.assign(n, -1);
        for (const auto& g : j.at("gluings")) {
            const int s = 3 * g.at(0).at(0).get<int>() + g.at(0).at(1).get<int>();
            const int p = 3 * g.at(1).at(0).get<int>() + g.at(1).at(1).get<int>();
            if (s < 0 || s >= n || p < 0 || p >= n) throw ConfigError("gluing references a missing edge");
            X.glue[s] = p;
            X.glue[p] = s;
        }
        for (const auto& [k, v] : j.at("zeros").items()) X.zeros[std::stoi(k)] = v.get<int>();
        if (j.contains("edge_classes")) {
            const auto& ec = j.at("edge_classes");
            const auto rows = static_cast<Eigen::Index>(ec.size());
            const auto cols = rows ? static_cast<Eigen::Index>(ec[0].size()) : 0;
            X.edge_class.resize(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) X.edge_class(r, c) = ec[r].at(c).get<int>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed surface file: ") + e.what());
    }
    return X;
}

} // namespace flatreg
