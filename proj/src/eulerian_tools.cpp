#include "immersion/eulerian_tools.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace immersion {

ImbalanceMeasure imbalance(const MultiDigraph& g) {
    std::size_t sum = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        std::size_t o = g.out_degree(v), i = g.in_degree(v);
        sum += o > i ? o - i : i - o;
    }
    return ImbalanceMeasure{sum};
}

namespace {

// surplus of v in g: d+(v) - d-(v)
long surplus(const MultiDigraph& g, VertexId v) {
    return static_cast<long>(g.out_degree(v)) - static_cast<long>(g.in_degree(v));
}

} // namespace

LiftedGraph eulerianize_immersion(const MultiDigraph& host, const LiftedGraph& sub) {
    if (!is_eulerian(host))
        throw PreconditionError("eulerianize_immersion: host is not Eulerian");
    if (!(sub.root() == host))
        throw PreconditionError("eulerianize_immersion: sub is not a lifted view of host");
    if (is_eulerian(sub.current()))
        return sub;

    // host edges not claimed by any provenance trail; these remain
    // available as repair material
    std::set<EdgeId> unused;
    for (const Edge& e : host.edges())
        unused.insert(e.id);
    for (const auto& [cur, t] : sub.provenance_map())
        for (EdgeId id : t.edge_ids)
            unused.erase(id);

    LiftedGraph work = sub;
    std::size_t measure = imbalance(work.current()).value;
    const std::size_t initial = measure;
    std::size_t rounds = 0;

    while (measure > 0) {
        if (++rounds > initial)
            throw InternalError("eulerianize_immersion: imbalance failed to decrease");

        // deficient vertex: more in than out in the working pattern
        VertexId y = work.current().vertex_count();
        for (VertexId v = 0; v < work.current().vertex_count(); ++v) {
            if (surplus(work.current(), v) < 0) {
                y = v;
                break;
            }
        }
        if (y == work.current().vertex_count())
            throw InternalError("eulerianize_immersion: imbalanced graph without deficit");

        // walk forward along unused host edges; per-vertex balance of the
        // host guarantees the walk only sticks at an out-surplus vertex
        std::vector<EdgeId> walk;
        std::vector<VertexId> visited{y};
        std::unordered_set<EdgeId> taken;
        VertexId at = y;
        for (;;) {
            EdgeId step = 0;
            bool found = false;
            for (EdgeId id : host.out_edges(at)) {
                if (unused.count(id) && !taken.count(id)) {
                    step = id;
                    found = true;
                    break;
                }
            }
            if (!found)
                break;
            taken.insert(step);
            walk.push_back(step);
            at = host.edge(step).head;
            visited.push_back(at);
        }
        if (walk.empty())
            throw InternalError("eulerianize_immersion: no unused edge at deficit vertex");

        // minimal subwalk: last in-surplus start, first out-surplus end
        std::size_t from = visited.size(), to = visited.size();
        for (std::size_t i = 0; i < visited.size(); ++i)
            if (surplus(work.current(), visited[i]) < 0)
                from = i;
        for (std::size_t i = from + 1; i < visited.size(); ++i) {
            if (surplus(work.current(), visited[i]) > 0) {
                to = i;
                break;
            }
        }
        if (from >= visited.size() || to >= visited.size())
            throw InternalError("eulerianize_immersion: repair walk lacks endpoints");

        Trail prov;
        prov.start = visited[from];
        prov.end = visited[to];
        prov.edge_ids.assign(walk.begin() + static_cast<std::ptrdiff_t>(from),
                             walk.begin() + static_cast<std::ptrdiff_t>(to));
        for (EdgeId id : prov.edge_ids)
            unused.erase(id);
        const VertexId tail = prov.start, head = prov.end;
        work.add_current_edge(tail, head, std::move(prov));

        std::size_t next = imbalance(work.current()).value;
        if (next >= measure)
            throw InternalError("eulerianize_immersion: imbalance did not decrease");
        measure = next;
    }

    work.validate();

    // containment: every directed pair of sub survives with its multiplicity
    for (const Edge& e : sub.current().edges())
        if (work.current().multiplicity(e.tail, e.head) <
            sub.current().multiplicity(e.tail, e.head))
            throw InternalError("eulerianize_immersion: lost a sub-digraph edge");
    return work;
}

namespace {

void check_regularize_step(const MultiDigraph& g, std::size_t d) {
    if (!g.is_simple())
        throw InternalError("regularize: simplicity lost");
    if (!is_eulerian(g))
        throw InternalError("regularize: Eulerianness lost");
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.in_degree(v) < 2 * d)
            throw InternalError("regularize: minimum in-degree lost");
}

// d smallest in-neighbours and d smallest out-neighbours, disjoint.
// Exclusive neighbours are used before shared ones.
std::pair<std::vector<VertexId>, std::vector<VertexId>>
disjoint_neighbour_sets(const MultiDigraph& g, VertexId u, std::size_t d) {
    std::vector<VertexId> ins = g.in_neighbours(u);
    std::vector<VertexId> outs = g.out_neighbours(u);
    std::vector<VertexId> shared;
    std::set_intersection(ins.begin(), ins.end(), outs.begin(), outs.end(),
                          std::back_inserter(shared));
    std::vector<VertexId> only_in, only_out;
    std::set_difference(ins.begin(), ins.end(), shared.begin(), shared.end(),
                        std::back_inserter(only_in));
    std::set_difference(outs.begin(), outs.end(), shared.begin(), shared.end(),
                        std::back_inserter(only_out));
    std::vector<VertexId> a(only_in.begin(),
                            only_in.begin() + static_cast<std::ptrdiff_t>(
                                                  std::min(d, only_in.size())));
    std::vector<VertexId> b(only_out.begin(),
                            only_out.begin() + static_cast<std::ptrdiff_t>(
                                                   std::min(d, only_out.size())));
    std::size_t si = 0;
    while (a.size() < d && si < shared.size())
        a.push_back(shared[si++]);
    while (b.size() < d && si < shared.size())
        b.push_back(shared[si++]);
    if (a.size() < d || b.size() < d)
        throw InternalError("regularize: cannot pick disjoint neighbour sets");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return {std::move(a), std::move(b)};
}

} // namespace

RegularOrBiclique regularize_or_biclique(const MultiDigraph& d_graph, std::size_t d) {
    if (d == 0)
        throw PreconditionError("regularize_or_biclique: d must be positive");
    if (!d_graph.is_simple())
        throw PreconditionError("regularize_or_biclique: input not simple");
    if (!is_eulerian(d_graph))
        throw PreconditionError("regularize_or_biclique: input not Eulerian");
    for (VertexId v = 0; v < d_graph.vertex_count(); ++v)
        if (d_graph.in_degree(v) < 2 * d)
            throw PreconditionError("regularize_or_biclique: minimum in-degree below 2d");

    LiftedGraph lift(d_graph);
    for (;;) {
        const MultiDigraph& cur = lift.current();
        VertexId u = cur.vertex_count();
        for (VertexId v = 0; v < cur.vertex_count(); ++v) {
            if (cur.in_degree(v) > 2 * d) {
                u = v;
                break;
            }
        }
        if (u == cur.vertex_count())
            return lift; // exactly 2d-regular

        // a split over u keeps the graph simple only if a->b is absent
        bool split_done = false;
        for (VertexId a : cur.in_neighbours(u)) {
            for (VertexId b : cur.out_neighbours(u)) {
                if (a == b || cur.multiplicity(a, b) > 0)
                    continue;
                EdgeId e1 = cur.edges_between(a, u).front();
                EdgeId e2 = cur.edges_between(u, b).front();
                lift = lift.split(e1, e2);
                check_regularize_step(lift.current(), d);
                split_done = true;
                break;
            }
            if (split_done)
                break;
        }
        if (split_done)
            continue;

        // no absent pair: the in/out neighbour selections span a full
        // one-directional biclique
        auto [A, B] = disjoint_neighbour_sets(cur, u, d);
        ImmersionCertificate cert;
        cert.host = lift.root();
        std::vector<Edge> pedges;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                pedges.push_back({i * d + j, i, d + j});
        cert.pattern = MultiDigraph(2 * d, std::move(pedges));
        for (std::size_t i = 0; i < d; ++i) {
            cert.vertex_map[i] = A[i];
            cert.vertex_map[d + i] = B[i];
        }
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                std::vector<EdgeId> between = cur.edges_between(A[i], B[j]);
                if (between.empty())
                    throw InternalError("regularize: biclique edge missing");
                cert.trail_map[i * d + j] = lift.provenance(between.front());
            }
        }
        return cert;
    }
}

} // namespace immersion
