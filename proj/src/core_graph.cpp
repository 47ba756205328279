#include "immersion/core_graph.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace immersion {

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
}

MultiDigraph::MultiDigraph(std::size_t n, std::vector<Edge> edges, bool loops_allowed)
    : n_(n), loops_allowed_(loops_allowed), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return a.id < b.id; });
    out_.assign(n_, {});
    in_.assign(n_, {});
    EdgeId prev = 0;
    bool first = true;
    for (const Edge& e : edges_) {
        if (!first && e.id == prev)
            throw InputError("duplicate edge id " + std::to_string(e.id));
        prev = e.id;
        first = false;
        if (e.tail >= n_ || e.head >= n_)
            throw InputError("edge endpoint out of range");
        if (e.tail == e.head && !loops_allowed_)
            throw LoopError("loop at vertex " + std::to_string(e.tail));
        out_[e.tail].push_back(e.id);
        in_[e.head].push_back(e.id);
    }
    // adjacency lists end up ascending because edges_ is sorted by id
}

void MultiDigraph::check_vertex(VertexId v) const {
    if (v >= n_)
        throw InputError("vertex " + std::to_string(v) + " out of range");
}

std::size_t MultiDigraph::edge_pos(EdgeId id) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), id,
                               [](const Edge& e, EdgeId x) { return e.id < x; });
    if (it == edges_.end() || it->id != id)
        return npos;
    return static_cast<std::size_t>(it - edges_.begin());
}

bool MultiDigraph::has_edge(EdgeId id) const { return edge_pos(id) != npos; }

const Edge& MultiDigraph::edge(EdgeId id) const {
    std::size_t p = edge_pos(id);
    if (p == npos)
        throw InputError("unknown edge id " + std::to_string(id));
    return edges_[p];
}

std::span<const EdgeId> MultiDigraph::out_edges(VertexId v) const {
    check_vertex(v);
    return out_[v];
}

std::span<const EdgeId> MultiDigraph::in_edges(VertexId v) const {
    check_vertex(v);
    return in_[v];
}

std::vector<VertexId> MultiDigraph::out_neighbours(VertexId v) const {
    std::vector<VertexId> r;
    for (EdgeId id : out_edges(v))
        r.push_back(edge(id).head);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

std::vector<VertexId> MultiDigraph::in_neighbours(VertexId v) const {
    std::vector<VertexId> r;
    for (EdgeId id : in_edges(v))
        r.push_back(edge(id).tail);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

std::size_t MultiDigraph::multiplicity(VertexId tail, VertexId head) const {
    check_vertex(head);
    std::size_t c = 0;
    for (EdgeId id : out_edges(tail))
        if (edge(id).head == head)
            ++c;
    return c;
}

std::vector<EdgeId> MultiDigraph::edges_between(VertexId tail, VertexId head) const {
    check_vertex(head);
    std::vector<EdgeId> r;
    for (EdgeId id : out_edges(tail))
        if (edge(id).head == head)
            r.push_back(id);
    return r;
}

bool MultiDigraph::is_simple() const {
    for (VertexId v = 0; v < n_; ++v) {
        std::vector<VertexId> heads;
        for (EdgeId id : out_[v])
            heads.push_back(edge(id).head);
        std::sort(heads.begin(), heads.end());
        if (std::adjacent_find(heads.begin(), heads.end()) != heads.end())
            return false;
    }
    return true;
}

std::size_t MultiDigraph::active_vertex_count() const {
    std::size_t c = 0;
    for (VertexId v = 0; v < n_; ++v)
        if (!out_[v].empty() || !in_[v].empty())
            ++c;
    return c;
}

std::vector<VertexId> MultiDigraph::active_vertices() const {
    std::vector<VertexId> r;
    for (VertexId v = 0; v < n_; ++v)
        if (!out_[v].empty() || !in_[v].empty())
            r.push_back(v);
    return r;
}

void MultiDigraph::insert_edge(const Edge& e) {
    if (e.tail >= n_ || e.head >= n_)
        throw InputError("edge endpoint out of range");
    if (e.tail == e.head && !loops_allowed_)
        throw LoopError("loop at vertex " + std::to_string(e.tail));
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e.id,
                               [](const Edge& x, EdgeId id) { return x.id < id; });
    if (it != edges_.end() && it->id == e.id)
        throw InputError("edge id already present");
    edges_.insert(it, e);
    auto& ov = out_[e.tail];
    ov.insert(std::lower_bound(ov.begin(), ov.end(), e.id), e.id);
    auto& iv = in_[e.head];
    iv.insert(std::lower_bound(iv.begin(), iv.end(), e.id), e.id);
}

void MultiDigraph::erase_edge(EdgeId id) {
    std::size_t p = edge_pos(id);
    if (p == npos)
        throw InputError("unknown edge id " + std::to_string(id));
    Edge e = edges_[p];
    edges_.erase(edges_.begin() + static_cast<std::ptrdiff_t>(p));
    auto& ov = out_[e.tail];
    ov.erase(std::lower_bound(ov.begin(), ov.end(), id));
    auto& iv = in_[e.head];
    iv.erase(std::lower_bound(iv.begin(), iv.end(), id));
}

SimpleGraph::SimpleGraph(std::size_t n, std::vector<std::pair<VertexId, VertexId>> edges)
    : n_(n) {
    for (auto& [u, v] : edges) {
        if (u >= n_ || v >= n_)
            throw InputError("edge endpoint out of range");
        if (u == v)
            throw InputError("loops not allowed in SimpleGraph");
        if (u > v)
            std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    adj_.assign(n_, {});
    for (auto [u, v] : edges_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& a : adj_)
        std::sort(a.begin(), a.end());
}

std::span<const VertexId> SimpleGraph::neighbours(VertexId v) const {
    if (v >= n_)
        throw InputError("vertex out of range");
    return adj_[v];
}

bool SimpleGraph::has_edge(VertexId u, VertexId v) const {
    if (u >= n_ || v >= n_)
        throw InputError("vertex out of range");
    auto& a = adj_[u];
    return std::binary_search(a.begin(), a.end(), v);
}

std::size_t SimpleGraph::edge_index(VertexId u, VertexId v) const {
    if (u > v)
        std::swap(u, v);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(u, v));
    if (it == edges_.end() || *it != std::make_pair(u, v))
        throw InputError("no such undirected edge");
    return static_cast<std::size_t>(it - edges_.begin());
}

std::size_t SimpleGraph::active_vertex_count() const {
    std::size_t c = 0;
    for (VertexId v = 0; v < n_; ++v)
        if (!adj_[v].empty())
            ++c;
    return c;
}

SimpleGraph SimpleGraph::induced(const std::vector<VertexId>& keep) const {
    std::vector<bool> in(n_, false);
    for (VertexId v : keep) {
        if (v >= n_)
            throw InputError("vertex out of range");
        in[v] = true;
    }
    std::vector<std::pair<VertexId, VertexId>> es;
    for (auto [u, v] : edges_)
        if (in[u] && in[v])
            es.emplace_back(u, v);
    return SimpleGraph(n_, std::move(es));
}

DegreeProfile degree_profile(const MultiDigraph& g, VertexId v) {
    DegreeProfile p;
    p.d_out = g.out_degree(v);
    p.d_in = g.in_degree(v);
    p.simple_out = g.out_neighbours(v).size();
    p.simple_in = g.in_neighbours(v).size();
    return p;
}

bool is_eulerian(const MultiDigraph& g) {
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.out_degree(v) != g.in_degree(v))
            return false;
    return true;
}

SimpleGraph underlying_simple(const MultiDigraph& g) {
    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (const Edge& e : g.edges())
        if (e.tail != e.head)
            pairs.emplace_back(e.tail, e.head);
    return SimpleGraph(g.vertex_count(), std::move(pairs));
}

double average_degree(const MultiDigraph& g) {
    if (g.vertex_count() == 0)
        throw InputError("average_degree of empty vertex set");
    return static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count());
}

double average_degree(const SimpleGraph& g) {
    if (g.vertex_count() == 0)
        throw InputError("average_degree of empty vertex set");
    return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count());
}

MultiDigraph restrict_to(const MultiDigraph& g, const std::vector<VertexId>& keep) {
    std::vector<std::size_t> pos(g.vertex_count(), npos);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] >= g.vertex_count())
            throw InputError("vertex out of range");
        pos[keep[i]] = i;
    }
    std::vector<Edge> es;
    for (const Edge& e : g.edges())
        if (pos[e.tail] != npos && pos[e.head] != npos)
            es.push_back({e.id, pos[e.tail], pos[e.head]});
    return MultiDigraph(keep.size(), std::move(es), g.loops_allowed());
}

} // namespace immersion
