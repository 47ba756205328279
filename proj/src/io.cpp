#include "immersion/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace immersion {

using nlohmann::json;

MultiDigraph read_graph(std::istream& in) {
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m))
        throw InputError("graph file: missing header");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        VertexId t, h;
        if (!(in >> t >> h))
            throw InputError("graph file: truncated edge list");
        edges.push_back({i, t, h});
    }
    return MultiDigraph(n, std::move(edges));
}

MultiDigraph read_graph_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw InputError("cannot open graph file " + path);
    return read_graph(f);
}

void write_graph(std::ostream& out, const MultiDigraph& g) {
    out << g.vertex_count() << ' ' << g.edge_count() << '\n';
    for (const Edge& e : g.edges())
        out << e.tail << ' ' << e.head << '\n';
}

void write_graph_file(const std::string& path, const MultiDigraph& g) {
    std::ofstream f(path);
    if (!f)
        throw InputError("cannot open graph file for writing: " + path);
    write_graph(f, g);
}

std::string certificate_to_json(const ImmersionCertificate& cert) {
    json j;
    json pat;
    pat["n"] = cert.pattern.vertex_count();
    pat["loops_allowed"] = cert.pattern.loops_allowed();
    json pedges = json::array();
    for (const Edge& e : cert.pattern.edges())
        pedges.push_back({e.id, e.tail, e.head});
    pat["edges"] = std::move(pedges);
    j["pattern"] = std::move(pat);

    json vmap = json::array();
    for (const auto& [pv, hv] : cert.vertex_map)
        vmap.push_back({pv, hv});
    j["vertex_map"] = std::move(vmap);

    json tmap = json::array();
    for (const auto& [pe, t] : cert.trail_map)
        tmap.push_back({pe, t.edge_ids});
    j["trail_map"] = std::move(tmap);
    return j.dump(2);
}

ImmersionCertificate certificate_from_json(const std::string& text,
                                           const MultiDigraph& host) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("certificate file: ") + e.what());
    }
    ImmersionCertificate cert;
    cert.host = host;
    try {
        const json& pat = j.at("pattern");
        std::vector<Edge> pedges;
        for (const auto& e : pat.at("edges"))
            pedges.push_back({e.at(0).get<EdgeId>(), e.at(1).get<VertexId>(),
                              e.at(2).get<VertexId>()});
        cert.pattern = MultiDigraph(pat.at("n").get<std::size_t>(), std::move(pedges),
                                    pat.value("loops_allowed", false));
        for (const auto& p : j.at("vertex_map"))
            cert.vertex_map[p.at(0).get<VertexId>()] = p.at(1).get<VertexId>();
        for (const auto& p : j.at("trail_map")) {
            Trail t;
            t.edge_ids = p.at(1).get<std::vector<EdgeId>>();
            EdgeId pe = p.at(0).get<EdgeId>();
            // endpoints come from the host edges; fall back to the mapped
            // pattern endpoints so damaged trails still reach the verifier
            if (!t.edge_ids.empty() && host.has_edge(t.edge_ids.front()))
                t.start = host.edge(t.edge_ids.front()).tail;
            else if (cert.pattern.has_edge(pe))
                t.start = cert.vertex_map.count(cert.pattern.edge(pe).tail)
                              ? cert.vertex_map.at(cert.pattern.edge(pe).tail)
                              : 0;
            if (!t.edge_ids.empty() && host.has_edge(t.edge_ids.back()))
                t.end = host.edge(t.edge_ids.back()).head;
            else if (cert.pattern.has_edge(pe))
                t.end = cert.vertex_map.count(cert.pattern.edge(pe).head)
                            ? cert.vertex_map.at(cert.pattern.edge(pe).head)
                            : 0;
            cert.trail_map[pe] = std::move(t);
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("certificate file: ") + e.what());
    }
    return cert;
}

void write_certificate_file(const std::string& path, const ImmersionCertificate& cert) {
    std::ofstream f(path);
    if (!f)
        throw InputError("cannot open certificate file for writing: " + path);
    f << certificate_to_json(cert) << '\n';
}

ImmersionCertificate read_certificate_file(const std::string& path,
                                           const MultiDigraph& host) {
    std::ifstream f(path);
    if (!f)
        throw InputError("cannot open certificate file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return certificate_from_json(ss.str(), host);
}

} // namespace immersion
