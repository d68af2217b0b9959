#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "flatreg/errors.hpp"
#include "flatreg/multiscale.hpp"

namespace flatreg {

using nlohmann::json;

int EnhancedLevelGraph::depth() const {
    int lowest = 0;
    for (const auto& v : vertices) lowest = std::min(lowest, v.level);
    return -lowest;
}

std::vector<int> EnhancedLevelGraph::horizontal_edges() const {
    std::vector<int> out;
    for (int e = 0; e < static_cast<int>(edges.size()); ++e)
        if (edges[e].kind == EdgeKind::Horizontal) out.push_back(e);
    return out;
}

StratumSignature signature_of(const EnhancedLevelGraph& G) {
    StratumSignature sig;
    for (const auto& h : G.half_edges) sig.zero_orders.push_back(h.order);
    std::sort(sig.zero_orders.begin(), sig.zero_orders.end(), std::greater<>());
    return sig;
}

GraphReport validate_graph(const EnhancedLevelGraph& G, const StratumSignature& sig) {
    GraphReport rep;
    auto err = [&](std::string s) { rep.errors.push_back(std::move(s)); };
    const int V = static_cast<int>(G.vertices.size());
    if (V == 0) {
        err("graph has no vertices");
        return rep;
    }
    const int N = G.depth();
    std::set<int> seen;
    for (int v = 0; v < V; ++v) {
        if (G.vertices[v].level > 0) err("vertex " + std::to_string(v) + " has positive level");
        if (G.vertices[v].genus < 0) err("vertex " + std::to_string(v) + " has negative genus");
        seen.insert(G.vertices[v].level);
    }
    for (int i = 0; i >= -N; --i)
        if (!seen.count(i)) err("level " + std::to_string(i) + " has no vertex (level map not surjective)");

    std::vector<int> order_sum(V, 0);
    for (int e = 0; e < static_cast<int>(G.edges.size()); ++e) {
        const auto& E = G.edges[e];
        const std::string tag = "edge " + std::to_string(e);
        if (E.a < 0 || E.a >= V || E.b < 0 || E.b >= V) {
            err(tag + " has an endpoint out of range");
            continue;
        }
        const int la = G.vertices[E.a].level, lb = G.vertices[E.b].level;
        if (E.kind == EdgeKind::Horizontal) {
            if (la != lb) err(tag + " is horizontal but joins levels " + std::to_string(la) + " and " + std::to_string(lb));
            order_sum[E.a] += -1;
            order_sum[E.b] += -1;
        } else {
            if (la <= lb) err(tag + " is vertical but its first endpoint is not above the second");
            if (E.enhancement < 1) err(tag + " has enhancement below 1");
            if (E.prong < 0 || (E.enhancement >= 1 && E.prong >= E.enhancement))
                err(tag + " has a prong-matching outside 0.." + std::to_string(E.enhancement - 1));
            order_sum[E.a] += E.enhancement - 1;
            order_sum[E.b] += -E.enhancement - 1;
        }
    }
    for (const auto& h : G.half_edges) {
        if (h.vertex < 0 || h.vertex >= V) {
            err("half-edge on a missing vertex");
            continue;
        }
        if (h.order < 0) err("half-edge with negative order");
        order_sum[h.vertex] += h.order;
    }
    for (int v = 0; v < V; ++v) {
        const int expect = 2 * G.vertices[v].genus - 2;
        if (order_sum[v] != expect)
            err("vertex " + std::to_string(v) + ": orders sum to " + std::to_string(order_sum[v]) + " but 2g-2 = " +
                std::to_string(expect));
    }

    auto got = signature_of(G).zero_orders;
    auto want = sig.zero_orders;
    std::sort(want.begin(), want.end(), std::greater<>());
    if (got != want) err("half-edge orders do not match the stratum signature");

    // connectivity and arithmetic genus
    std::vector<int> parent(V);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& E : G.edges)
        if (E.a >= 0 && E.a < V && E.b >= 0 && E.b < V) parent[find(E.a)] = find(E.b);
    int comps = 0;
    for (int v = 0; v < V; ++v) comps += find(v) == v;
    if (comps != 1) err("graph is not connected");
    int g = static_cast<int>(G.edges.size()) - V + 1;
    for (const auto& v : G.vertices) g += v.genus;
    if (comps == 1 && !sig.zero_orders.empty() && g != sig.genus())
        err("arithmetic genus " + std::to_string(g) + " differs from the stratum genus " + std::to_string(sig.genus()));
    return rep;
}

std::map<int, int> compute_a(const EnhancedLevelGraph& G) {
    std::map<int, int> a;
    const int N = G.depth();
    for (int i = -1; i >= -N; --i) {
        int l = 1;
        for (const auto& E : G.edges) {
            if (E.kind != EdgeKind::Vertical) continue;
            const int top = G.vertices[E.a].level, bottom = G.vertices[E.b].level;
            if (top > i && bottom <= i) l = std::lcm(l, E.enhancement);
        }
        a[i] = l;
    }
    return a;
}

EnhancedLevelGraph graph_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("level graph is not valid JSON: ") + e.what());
    }
    EnhancedLevelGraph G;
    try {
        for (const char* key : {"vertices", "edges", "half_edges"})
            if (!j.contains(key)) throw ConfigError(std::string("level graph is missing '") + key + "'");
        for (const auto& v : j.at("vertices")) G.vertices.push_back({v.at("genus").get<int>(), v.at("level").get<int>()});
        for (const auto& e : j.at("edges")) {
            GraphEdge E;
            const auto ends = e.at("endpoints");
            if (!ends.is_array() || ends.size() != 2) throw ConfigError("edge endpoints must be a pair");
            E.a = ends[0].get<int>();
            E.b = ends[1].get<int>();
            const std::string kind = e.at("kind").get<std::string>();
            if (kind == "horizontal") E.kind = EdgeKind::Horizontal;
            else if (kind == "vertical") E.kind = EdgeKind::Vertical;
            else throw ConfigError("edge kind must be 'horizontal' or 'vertical'");
            E.enhancement = e.value("b", 1);
            E.prong = e.value("prong", 0);
            G.edges.push_back(E);
        }
        for (const auto& h : j.at("half_edges")) G.half_edges.push_back({h.at("vertex").get<int>(), h.at("order").get<int>()});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed level graph: ") + e.what());
    }
    return G;
}

std::string to_json(const EnhancedLevelGraph& G) {
    json j;
    j["vertices"] = json::array();
    for (const auto& v : G.vertices) j["vertices"].push_back({{"genus", v.genus}, {"level", v.level}});
    j["edges"] = json::array();
    for (const auto& e : G.edges) {
        json je = {{"endpoints", {e.a, e.b}}, {"kind", e.kind == EdgeKind::Horizontal ? "horizontal" : "vertical"}};
        if (e.kind == EdgeKind::Vertical) {
            je["b"] = e.enhancement;
            je["prong"] = e.prong;
        }
        j["edges"].push_back(je);
    }
    j["half_edges"] = json::array();
    for (const auto& h : G.half_edges) j["half_edges"].push_back({{"vertex", h.vertex}, {"order", h.order}});
    return j.dump(2);
}

EnhancedLevelGraph h31_graph(int b) {
    EnhancedLevelGraph G;
    G.vertices = {{2, 0}, {1, -1}};
    G.edges = {{0, 1, EdgeKind::Vertical, b, 0}};
    G.half_edges = {{0, 1}, {1, 3}};
    return G;
}

EnhancedLevelGraph h22_graph() {
    EnhancedLevelGraph G;
    G.vertices = {{2, 0}, {1, -1}};
    G.edges = {{0, 1, EdgeKind::Vertical, 1, 0}};
    G.half_edges = {{0, 2}, {1, 2}};
    return G;
}

} // namespace flatreg
