#include "immersion/immersion_calc.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace immersion {

bool is_valid_trail(const MultiDigraph& g, const Trail& t) {
    if (t.edge_ids.empty())
        return t.start == t.end && t.start < g.vertex_count();
    std::unordered_set<EdgeId> seen;
    VertexId at = t.start;
    for (EdgeId id : t.edge_ids) {
        if (!g.has_edge(id) || !seen.insert(id).second)
            return false;
        const Edge& e = g.edge(id);
        if (e.tail != at)
            return false;
        at = e.head;
    }
    return at == t.end;
}

std::vector<VertexId> trail_vertices(const MultiDigraph& g, const Trail& t) {
    std::vector<VertexId> vs{t.start};
    for (EdgeId id : t.edge_ids)
        vs.push_back(g.edge(id).head);
    return vs;
}

Trail concat(const Trail& a, const Trail& b) {
    if (a.end != b.start)
        throw InputError("trail concatenation endpoint mismatch");
    Trail r;
    r.start = a.start;
    r.end = b.end;
    r.edge_ids = a.edge_ids;
    r.edge_ids.insert(r.edge_ids.end(), b.edge_ids.begin(), b.edge_ids.end());
    return r;
}

Trail reduce_to_simple(const MultiDigraph& g, const Trail& t) {
    Trail cur = t;
    for (;;) {
        std::vector<VertexId> vs = trail_vertices(g, cur);
        std::unordered_map<VertexId, std::size_t> first_at;
        std::size_t cut_from = vs.size(), cut_to = 0;
        bool found = false;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            // ignore the closing repeat of a closed trail
            if (cur.closed() && i + 1 == vs.size())
                break;
            auto [it, fresh] = first_at.emplace(vs[i], i);
            if (!fresh) {
                cut_from = it->second;
                cut_to = i;
                found = true;
                break;
            }
        }
        if (!found)
            return cur;
        Trail next;
        next.start = cur.start;
        next.end = cur.end;
        next.edge_ids.assign(cur.edge_ids.begin(),
                             cur.edge_ids.begin() + static_cast<std::ptrdiff_t>(cut_from));
        next.edge_ids.insert(next.edge_ids.end(),
                             cur.edge_ids.begin() + static_cast<std::ptrdiff_t>(cut_to),
                             cur.edge_ids.end());
        cur = std::move(next);
    }
}

ValidityReport verify_certificate(const ImmersionCertificate& cert) {
    ValidityReport rep;
    auto fail = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };

    // vertex map: total on pattern vertices, into host, injective
    std::set<VertexId> images;
    for (VertexId pv = 0; pv < cert.pattern.vertex_count(); ++pv) {
        auto it = cert.vertex_map.find(pv);
        if (it == cert.vertex_map.end()) {
            fail("pattern vertex " + std::to_string(pv) + " unmapped");
            continue;
        }
        if (it->second >= cert.host.vertex_count())
            fail("pattern vertex " + std::to_string(pv) + " maps outside host");
        else if (!images.insert(it->second).second)
            fail("vertex map not injective at pattern vertex " + std::to_string(pv));
    }
    for (const auto& [pv, hv] : cert.vertex_map)
        if (pv >= cert.pattern.vertex_count())
            fail("vertex map keys unknown pattern vertex " + std::to_string(pv));

    // trails: one per pattern edge, valid in host, endpoints match
    for (const Edge& pe : cert.pattern.edges()) {
        auto it = cert.trail_map.find(pe.id);
        if (it == cert.trail_map.end()) {
            fail("pattern edge " + std::to_string(pe.id) + " has no trail");
            continue;
        }
        const Trail& t = it->second;
        if (t.edge_ids.empty()) {
            fail("pattern edge " + std::to_string(pe.id) + " has an empty trail");
            continue;
        }
        if (!is_valid_trail(cert.host, t)) {
            fail("pattern edge " + std::to_string(pe.id) + " has an invalid trail");
            continue;
        }
        auto tail_it = cert.vertex_map.find(pe.tail);
        auto head_it = cert.vertex_map.find(pe.head);
        if (tail_it != cert.vertex_map.end() && t.start != tail_it->second)
            fail("trail for pattern edge " + std::to_string(pe.id) + " starts wrong");
        if (head_it != cert.vertex_map.end() && t.end != head_it->second)
            fail("trail for pattern edge " + std::to_string(pe.id) + " ends wrong");
        std::vector<VertexId> vs = trail_vertices(cert.host, t);
        std::sort(vs.begin(), vs.end());
        if (std::adjacent_find(vs.begin(), vs.end()) != vs.end())
            rep.warnings.push_back("trail for pattern edge " + std::to_string(pe.id) +
                                   " repeats a vertex");
    }
    for (const auto& [pe, t] : cert.trail_map)
        if (!cert.pattern.has_edge(pe))
            fail("trail map keys unknown pattern edge " + std::to_string(pe));

    // pairwise edge-identity disjointness
    std::unordered_map<EdgeId, EdgeId> used; // host edge -> pattern edge
    for (const auto& [pe, t] : cert.trail_map) {
        for (EdgeId id : t.edge_ids) {
            auto [it, fresh] = used.emplace(id, pe);
            if (!fresh && it->second != pe)
                fail("pattern edges " + std::to_string(it->second) + " and " +
                     std::to_string(pe) + " share host edge " + std::to_string(id));
        }
    }
    return rep;
}

ImmersionCertificate identity_certificate(const MultiDigraph& g) {
    ImmersionCertificate c;
    c.host = g;
    c.pattern = g;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        c.vertex_map[v] = v;
    for (const Edge& e : g.edges())
        c.trail_map[e.id] = Trail{{e.id}, e.tail, e.head};
    return c;
}

ImmersionCertificate compose(const ImmersionCertificate& outer,
                             const ImmersionCertificate& inner) {
    if (!(outer.pattern == inner.host))
        throw InputError("compose: outer pattern does not match inner host");
    ImmersionCertificate r;
    r.host = outer.host;
    r.pattern = inner.pattern;
    for (const auto& [pv, mv] : inner.vertex_map) {
        auto it = outer.vertex_map.find(mv);
        if (it == outer.vertex_map.end())
            throw InputError("compose: inner image unmapped by outer certificate");
        r.vertex_map[pv] = it->second;
    }
    for (const auto& [pe, t] : inner.trail_map) {
        auto start_it = r.vertex_map.find(inner.pattern.edge(pe).tail);
        if (start_it == r.vertex_map.end())
            throw InputError("compose: trail endpoint unmapped");
        Trail acc{{}, start_it->second, start_it->second};
        for (EdgeId mid : t.edge_ids) {
            auto pit = outer.trail_map.find(mid);
            if (pit == outer.trail_map.end())
                throw InputError("compose: outer certificate misses a trail");
            acc = concat(acc, pit->second);
        }
        r.trail_map[pe] = std::move(acc);
    }
    return r;
}

ImmersionCertificate restrict_pattern(const ImmersionCertificate& cert,
                                      const std::vector<EdgeId>& pattern_edges) {
    std::set<EdgeId> keep(pattern_edges.begin(), pattern_edges.end());
    std::vector<Edge> es;
    for (const Edge& e : cert.pattern.edges())
        if (keep.count(e.id))
            es.push_back(e);
    if (es.size() != keep.size())
        throw InputError("restrict_pattern: unknown pattern edge requested");
    ImmersionCertificate r;
    r.host = cert.host;
    r.pattern = MultiDigraph(cert.pattern.vertex_count(), std::move(es),
                             cert.pattern.loops_allowed());
    r.vertex_map = cert.vertex_map;
    for (EdgeId id : keep)
        r.trail_map[id] = cert.trail_map.at(id);
    return r;
}

std::pair<ImmersionCertificate, std::vector<VertexId>>
compact_certificate(const ImmersionCertificate& cert) {
    std::vector<VertexId> old_of_new = cert.pattern.active_vertices();
    ImmersionCertificate r;
    r.host = cert.host;
    r.pattern = restrict_to(cert.pattern, old_of_new);
    for (std::size_t i = 0; i < old_of_new.size(); ++i)
        r.vertex_map[i] = cert.vertex_map.at(old_of_new[i]);
    r.trail_map = cert.trail_map;
    return {std::move(r), std::move(old_of_new)};
}

LiftedGraph::LiftedGraph(MultiDigraph root) {
    root_ = root;
    current_ = root;
    next_id_ = 0;
    for (const Edge& e : root_.edges()) {
        provenance_[e.id] = Trail{{e.id}, e.tail, e.head};
        next_id_ = std::max(next_id_, e.id + 1);
    }
}

LiftedGraph LiftedGraph::from_certificate(const ImmersionCertificate& cert) {
    ValidityReport rep = verify_certificate(cert);
    if (!rep.valid)
        throw InputError("from_certificate: certificate invalid: " +
                         (rep.violations.empty() ? std::string{} : rep.violations.front()));
    LiftedGraph lg;
    lg.root_ = cert.host;
    EdgeId next = 0;
    for (const Edge& e : cert.host.edges())
        next = std::max(next, e.id + 1);
    std::vector<Edge> es;
    std::map<EdgeId, Trail> prov;
    for (const Edge& pe : cert.pattern.edges()) {
        VertexId t = cert.vertex_map.at(pe.tail);
        VertexId h = cert.vertex_map.at(pe.head);
        es.push_back({next, t, h});
        prov[next] = cert.trail_map.at(pe.id);
        ++next;
    }
    lg.current_ = MultiDigraph(cert.host.vertex_count(), std::move(es),
                               cert.host.loops_allowed());
    lg.provenance_ = std::move(prov);
    lg.next_id_ = next;
    lg.validate();
    return lg;
}

const Trail& LiftedGraph::provenance(EdgeId current_edge) const {
    auto it = provenance_.find(current_edge);
    if (it == provenance_.end())
        throw InputError("no provenance for edge " + std::to_string(current_edge));
    return it->second;
}

void LiftedGraph::split_in_place(EdgeId e1, EdgeId e2) {
    if (e1 == e2)
        throw InputError("split needs two distinct edges");
    if (!current_.has_edge(e1) || !current_.has_edge(e2))
        throw InputError("split: edge not in current graph");
    const Edge a = current_.edge(e1);
    const Edge b = current_.edge(e2);
    if (a.head != b.tail)
        throw InputError("split: edges are not consecutive");
    if (a.tail == b.head && !current_.loops_allowed())
        throw LoopError("split would create a loop at vertex " + std::to_string(a.tail));
    Trail merged = concat(provenance_.at(e1), provenance_.at(e2));
    current_.erase_edge(e1);
    current_.erase_edge(e2);
    provenance_.erase(e1);
    provenance_.erase(e2);
    current_.insert_edge({next_id_, a.tail, b.head});
    provenance_[next_id_] = std::move(merged);
    ++next_id_;
}

void LiftedGraph::delete_in_place(std::span<const EdgeId> ids) {
    for (EdgeId id : ids)
        if (!current_.has_edge(id))
            throw InputError("delete_edges: unknown edge id " + std::to_string(id));
    for (EdgeId id : ids) {
        current_.erase_edge(id);
        provenance_.erase(id);
    }
}

void LiftedGraph::add_current_edge(VertexId tail, VertexId head, Trail prov) {
    current_.insert_edge({next_id_, tail, head});
    provenance_[next_id_] = std::move(prov);
    ++next_id_;
}

LiftedGraph LiftedGraph::split(EdgeId e1, EdgeId e2) const {
    LiftedGraph r = *this;
    r.split_in_place(e1, e2);
    return r;
}

LiftedGraph LiftedGraph::delete_edges(std::span<const EdgeId> ids) const {
    LiftedGraph r = *this;
    r.delete_in_place(ids);
    return r;
}

ImmersionCertificate LiftedGraph::extract_certificate() const {
    ImmersionCertificate c;
    c.host = root_;
    c.pattern = current_;
    for (VertexId v = 0; v < root_.vertex_count(); ++v)
        c.vertex_map[v] = v;
    c.trail_map = provenance_;
    return c;
}

void LiftedGraph::validate() const {
    std::unordered_set<EdgeId> used;
    for (const Edge& e : current_.edges()) {
        auto it = provenance_.find(e.id);
        if (it == provenance_.end())
            throw InternalError("lifted edge without provenance");
        const Trail& t = it->second;
        if (!is_valid_trail(root_, t) || t.edge_ids.empty())
            throw InternalError("lifted edge has invalid provenance trail");
        if (t.start != e.tail || t.end != e.head)
            throw InternalError("provenance endpoints disagree with current edge");
        for (EdgeId id : t.edge_ids)
            if (!used.insert(id).second)
                throw InternalError("provenance trails are not edge-disjoint");
    }
}

} // namespace immersion
