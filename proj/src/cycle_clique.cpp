#include "immersion/cycle_clique.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_set>

#include "immersion/pipeline.hpp"

namespace immersion {

namespace {
constexpr double kEps = 1e-9;
constexpr std::size_t INF = std::numeric_limits<std::size_t>::max();
} // namespace

double WeightedDigraph::total_weight() const {
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

namespace {

// ---- shortest-cycle search ----------------------------------------------

// Exact shortest vertex-simple directed cycle, via BFS from every start
// vertex plus an in-edge closure. cutoff 0 means unlimited.
std::optional<Trail> shortest_cycle(const MultiDigraph& g, std::size_t cutoff) {
    const std::size_t n = g.vertex_count();
    std::size_t best_len = INF;
    VertexId best_start = 0;
    EdgeId best_close = 0;

    std::vector<std::size_t> dist(n);
    auto bfs = [&](VertexId s, std::vector<EdgeId>* parent) {
        std::fill(dist.begin(), dist.end(), INF);
        if (parent)
            parent->assign(n, 0);
        dist[s] = 0;
        std::queue<VertexId> q;
        q.push(s);
        while (!q.empty()) {
            VertexId u = q.front();
            q.pop();
            if (cutoff > 0 && dist[u] + 1 >= cutoff && best_len == INF) {
                // depth limit: closing edge adds 1
            }
            for (EdgeId id : g.out_edges(u)) {
                VertexId w = g.edge(id).head;
                if (dist[w] != INF)
                    continue;
                dist[w] = dist[u] + 1;
                if (parent)
                    (*parent)[w] = id;
                q.push(w);
            }
        }
    };

    for (VertexId v = 0; v < n && best_len > 2; ++v) {
        if (g.out_edges(v).empty() || g.in_edges(v).empty())
            continue;
        bfs(v, nullptr);
        for (EdgeId id : g.in_edges(v)) {
            VertexId u = g.edge(id).tail;
            if (u == v || dist[u] == INF)
                continue;
            std::size_t len = dist[u] + 1;
            if (cutoff > 0 && len > cutoff)
                continue;
            if (len < best_len) {
                best_len = len;
                best_start = v;
                best_close = id;
            }
        }
    }
    if (best_len == INF)
        return std::nullopt;

    std::vector<EdgeId> parent;
    bfs(best_start, &parent);
    Trail t;
    t.start = t.end = best_start;
    VertexId u = g.edge(best_close).tail;
    std::vector<EdgeId> path;
    while (u != best_start) {
        path.push_back(parent[u]);
        u = g.edge(parent[u]).tail;
    }
    std::reverse(path.begin(), path.end());
    path.push_back(best_close);
    t.edge_ids = std::move(path);
    return t;
}

std::size_t ceil_div_bound(double x) {
    return static_cast<std::size_t>(std::ceil(x - kEps));
}

} // namespace

MultiDigraph double_edge_digraph(const MultiDigraph& g) {
    std::set<std::pair<VertexId, VertexId>> pairs;
    std::map<std::pair<VertexId, VertexId>, std::size_t> count;
    for (const Edge& e : g.edges())
        ++count[{e.tail, e.head}];
    std::vector<Edge> es;
    for (const auto& [pr, c] : count)
        if (c >= 2)
            es.push_back({es.size(), pr.first, pr.second});
    return MultiDigraph(g.vertex_count(), std::move(es));
}

namespace {

struct ReachData {
    ReachPartition part;
    std::vector<VertexId> sink_of;   // block owner per vertex
    std::vector<EdgeId> parent_edge; // D' edge toward the sink
    std::vector<bool> assigned;
};

ReachData reach_partition_impl(const MultiDigraph& dp) {
    ReachData r;
    const std::size_t n = dp.vertex_count();
    r.sink_of.assign(n, 0);
    r.parent_edge.assign(n, 0);
    r.assigned.assign(n, false);
    for (VertexId v = 0; v < n; ++v)
        if (dp.out_edges(v).empty())
            r.part.sinks.push_back(v);

    for (VertexId x : r.part.sinks) {
        if (r.assigned[x])
            continue; // a sink swallowed by an earlier block keeps no block
        std::vector<VertexId> block;
        std::queue<VertexId> q;
        r.assigned[x] = true;
        r.sink_of[x] = x;
        q.push(x);
        block.push_back(x);
        while (!q.empty()) {
            VertexId u = q.front();
            q.pop();
            for (EdgeId id : dp.in_edges(u)) {
                VertexId w = dp.edge(id).tail;
                if (r.assigned[w])
                    continue;
                r.assigned[w] = true;
                r.sink_of[w] = x;
                r.parent_edge[w] = id;
                q.push(w);
                block.push_back(w);
            }
        }
        std::sort(block.begin(), block.end());
        r.part.blocks[x] = std::move(block);
    }
    for (VertexId v = 0; v < n; ++v)
        if (!r.assigned[v])
            throw InputError("reach_partition: graph has a directed cycle");
    return r;
}

} // namespace

ReachPartition reach_partition(const MultiDigraph& double_digraph) {
    return reach_partition_impl(double_digraph).part;
}

namespace {

// ---- weighted short cycle ------------------------------------------------

std::optional<Trail> short_cycle_weighted_impl(const WeightedDigraph& wd, double alpha,
                                               bool enforce, std::size_t cutoff) {
    const MultiDigraph& g = wd.base;
    if (wd.weights.size() != g.vertex_count())
        throw InputError("weighted digraph: weight vector size mismatch");
    if (alpha <= 0.0 || alpha > 1.0)
        throw InputError("alpha must lie in (0,1]");
    if (enforce) {
        if (!g.is_simple())
            throw PreconditionError("short_cycle_weighted: base digraph not simple");
        double total = wd.total_weight();
        for (VertexId u = 0; u < g.vertex_count(); ++u) {
            double w = 0.0;
            for (VertexId v : g.out_neighbours(u))
                w += wd.weights[v];
            if (w + kEps < alpha * total)
                throw PreconditionError(
                    "short_cycle_weighted: out-neighbourhood weight below alpha");
        }
    }
    std::optional<Trail> c = shortest_cycle(g, cutoff);
    if (!c && enforce)
        throw InternalError("short_cycle_weighted: no cycle within the guaranteed cutoff");
    return c;
}

} // namespace

Trail short_cycle_weighted(const WeightedDigraph& wd, double alpha) {
    std::size_t cutoff = ceil_div_bound(4.0 / alpha);
    return *short_cycle_weighted_impl(wd, alpha, true, cutoff);
}

std::vector<double> weighted_reach_profile(const WeightedDigraph& wd, VertexId u,
                                           std::size_t depth) {
    const MultiDigraph& g = wd.base;
    std::vector<std::size_t> dist(g.vertex_count(), INF);
    dist[u] = 0;
    std::queue<VertexId> q;
    q.push(u);
    while (!q.empty()) {
        VertexId v = q.front();
        q.pop();
        for (EdgeId id : g.out_edges(v)) {
            VertexId w = g.edge(id).head;
            if (dist[w] == INF) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
        }
    }
    std::vector<double> profile(depth + 1, 0.0);
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (dist[v] != INF)
            for (std::size_t i = dist[v]; i <= depth; ++i)
                profile[i] += wd.weights[v];
    return profile;
}

namespace {

// ---- few simple edges ------------------------------------------------------

EdgeId least_copy(const MultiDigraph& g, VertexId tail, VertexId head) {
    std::vector<EdgeId> ids = g.edges_between(tail, head);
    if (ids.empty())
        throw InternalError("expected a parallel edge to lift");
    return ids.front();
}

std::optional<std::pair<Trail, std::size_t>>
few_simple_impl(const MultiDigraph& g, double alpha, bool enforce, std::size_t cutoff) {
    MultiDigraph dp = double_edge_digraph(g);

    if (std::optional<Trail> dc = shortest_cycle(dp, 0)) {
        Trail lifted;
        lifted.start = lifted.end = dc->start;
        for (EdgeId id : dc->edge_ids) {
            const Edge& e = dp.edge(id);
            lifted.edge_ids.push_back(least_copy(g, e.tail, e.head));
        }
        return std::make_pair(std::move(lifted), std::size_t{0});
    }

    ReachData rd = reach_partition_impl(dp);
    const std::vector<VertexId>& sinks = rd.part.sinks;

    auto block_path = [&](VertexId from, VertexId sink) {
        // D' parent chain from `from` to its sink, lifted to g copies
        std::vector<EdgeId> ids;
        VertexId at = from;
        while (at != sink) {
            const Edge& e = dp.edge(rd.parent_edge[at]);
            ids.push_back(least_copy(g, e.tail, e.head));
            at = e.head;
        }
        return ids;
    };

    // one simple edge: a sink with an edge back into its own block
    for (VertexId x : sinks) {
        for (EdgeId id : g.out_edges(x)) {
            VertexId w = g.edge(id).head;
            if (rd.sink_of[w] != x)
                continue;
            Trail t;
            t.start = t.end = x;
            t.edge_ids.push_back(id);
            std::vector<EdgeId> back = block_path(w, x);
            t.edge_ids.insert(t.edge_ids.end(), back.begin(), back.end());
            return std::make_pair(std::move(t), std::size_t{1});
        }
    }

    // auxiliary weighted digraph on the sinks
    std::vector<std::size_t> sink_index(g.vertex_count(), INF);
    for (std::size_t i = 0; i < sinks.size(); ++i)
        sink_index[sinks[i]] = i;
    std::map<std::pair<std::size_t, std::size_t>, std::pair<EdgeId, VertexId>> witness;
    for (std::size_t i = 0; i < sinks.size(); ++i) {
        VertexId x = sinks[i];
        for (EdgeId id : g.out_edges(x)) {
            VertexId w = g.edge(id).head;
            if (g.multiplicity(x, w) != 1)
                throw InternalError("few_simple: sink has a multiple out-edge");
            std::size_t j = sink_index[rd.sink_of[w]];
            if (j == i)
                continue;
            auto key = std::make_pair(i, j);
            auto it = witness.find(key);
            if (it == witness.end() || id < it->second.first)
                witness[key] = {id, w};
        }
    }
    std::vector<Edge> aux_edges;
    for (const auto& [pr, wt] : witness)
        aux_edges.push_back({aux_edges.size(), pr.first, pr.second});
    WeightedDigraph aux;
    aux.base = MultiDigraph(sinks.size(), std::move(aux_edges));
    aux.weights.assign(sinks.size(), 0.0);
    for (std::size_t i = 0; i < sinks.size(); ++i)
        aux.weights[i] = static_cast<double>(rd.part.blocks.at(sinks[i]).size());

    std::optional<Trail> hc = short_cycle_weighted_impl(aux, alpha, enforce, cutoff);
    if (!hc)
        return std::nullopt;

    // assemble: connector into the next block, then down to its sink
    std::vector<VertexId> hseq = trail_vertices(aux.base, *hc); // closed
    Trail walk;
    walk.start = walk.end = sinks[hseq.front()];
    for (std::size_t k = 0; k + 1 < hseq.size(); ++k) {
        std::size_t i = hseq[k], j = hseq[k + 1];
        auto [conn, landing] = witness.at({i, j});
        walk.edge_ids.push_back(conn);
        std::vector<EdgeId> down = block_path(landing, sinks[j]);
        walk.edge_ids.insert(walk.edge_ids.end(), down.begin(), down.end());
    }
    Trail cycle = reduce_to_simple(g, walk);
    std::size_t simple_count = 0;
    for (EdgeId id : cycle.edge_ids) {
        const Edge& e = g.edge(id);
        if (g.multiplicity(e.tail, e.head) == 1)
            ++simple_count;
    }
    return std::make_pair(std::move(cycle), simple_count);
}

} // namespace

std::pair<Trail, std::size_t> few_simple_edge_cycle(const MultiDigraph& g, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0)
        throw InputError("alpha must lie in (0,1]");
    for (const Edge& e : g.edges())
        if (e.tail == e.head)
            throw PreconditionError("few_simple_edge_cycle: loops not allowed");
    double need = alpha * static_cast<double>(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (static_cast<double>(g.out_degree(v)) + kEps < need)
            throw PreconditionError("few_simple_edge_cycle: minimum out-degree below alpha*n");
    std::size_t cutoff = ceil_div_bound(4.0 / alpha);
    auto r = few_simple_impl(g, alpha, true, cutoff);
    if (!r)
        throw InternalError("few_simple_edge_cycle: construction failed under hypotheses");
    if (r->second > cutoff)
        throw InternalError("few_simple_edge_cycle: simple-edge bound exceeded");
    return *r;
}

CyclePack pack_cycles(const MultiDigraph& g, std::size_t ell, double alpha,
                      const PackOptions& opts) {
    if (alpha <= 0.0 || alpha > 1.0)
        throw InputError("alpha must lie in (0,1]");
    // the ambient graph must be normalized: no vertex carries both a
    // multiple in-edge and a multiple out-edge
    std::vector<bool> multi_in(g.vertex_count(), false), multi_out(g.vertex_count(), false);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        for (VertexId w : g.out_neighbours(v))
            if (g.multiplicity(v, w) >= 2)
                multi_out[v] = true, multi_in[w] = true;
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (multi_in[v] && multi_out[v])
            throw PreconditionError("pack_cycles: graph not normalized");
    if (!is_eulerian(g))
        throw PreconditionError("pack_cycles: graph not Eulerian");
    const std::size_t n_thr = opts.n_override ? opts.n_override : g.vertex_count();
    if (opts.strict) {
        SimpleGraph und = underlying_simple(g);
        for (VertexId v : g.active_vertices())
            if (static_cast<double>(und.degree(v)) + kEps <
                alpha * static_cast<double>(n_thr))
                throw PreconditionError("pack_cycles: underlying degree below alpha*n");
    }

    CyclePack pack;
    std::vector<std::size_t> on_cycles(g.vertex_count(), 0);
    std::vector<Edge> remaining = g.edges();

    while (pack.cycles.size() < ell) {
        MultiDigraph di(g.vertex_count(), remaining, g.loops_allowed());

        std::vector<bool> in_x(g.vertex_count(), false);
        double x_thr = alpha * static_cast<double>(n_thr) / 4.0;
        std::size_t banned = 0;
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            if (static_cast<double>(on_cycles[v]) + kEps >= x_thr)
                in_x[v] = true;

        double y_thr = alpha * static_cast<double>(n_thr) / 16.0;
        std::vector<bool> in_y(g.vertex_count(), false);
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            if (in_x[v])
                continue;
            std::size_t to_x = 0;
            for (EdgeId id : di.out_edges(v))
                if (in_x[di.edge(id).head])
                    ++to_x;
            if (!multi_out[v] &&
                to_x > static_cast<std::size_t>(std::count(in_x.begin(), in_x.end(), true)))
                throw InternalError("pack_cycles: simple-out-edge bound violated");
            if (static_cast<double>(to_x) + kEps >= y_thr)
                in_y[v] = true;
        }
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            if (in_x[v] || in_y[v])
                ++banned;

        std::vector<Edge> kept;
        for (const Edge& e : remaining)
            if (!in_x[e.tail] && !in_y[e.tail] && !in_x[e.head] && !in_y[e.head])
                kept.push_back(e);
        MultiDigraph dip(g.vertex_count(), kept, g.loops_allowed());

        std::size_t n_i = n_thr > banned ? n_thr - banned : 1;
        double alpha_eff = alpha * static_cast<double>(n_thr) / 8.0 /
                           static_cast<double>(n_i);
        alpha_eff = std::min(alpha_eff, 1.0);
        std::size_t cutoff = opts.strict ? ceil_div_bound(4.0 / alpha_eff) : 0;

        if (opts.strict) {
            for (VertexId v : dip.active_vertices())
                if (static_cast<double>(dip.out_degree(v)) + kEps <
                    alpha * static_cast<double>(n_thr) / 8.0)
                    throw HypothesisNotMet("cycle-packing",
                                           "depleted graph lost the out-degree bound");
        }

        std::optional<std::pair<Trail, std::size_t>> found;
        try {
            found = few_simple_impl(dip, alpha_eff, opts.strict, cutoff);
        } catch (const PreconditionError&) {
            if (opts.strict)
                throw;
            found = std::nullopt;
        }
        if (!found && !opts.strict) {
            // the lemma machinery can miss cycles when its hypotheses fail;
            // fall back to a plain shortest-cycle search
            if (std::optional<Trail> any = shortest_cycle(dip, 0))
                found = std::make_pair(*any, INF);
        }
        if (!found) {
            if (opts.best_effort)
                break;
            throw HypothesisNotMet("cycle-packing",
                                   "found " + std::to_string(pack.cycles.size()) +
                                       " of " + std::to_string(ell) + " cycles");
        }

        Trail cycle = found->first;
        if (opts.strict &&
            static_cast<double>(cycle.length()) > 64.0 / alpha + kEps)
            throw InternalError("pack_cycles: cycle length cap exceeded");

        std::optional<EdgeId> chosen;
        for (EdgeId id : cycle.edge_ids) {
            const Edge& e = g.edge(id);
            if (g.multiplicity(e.tail, e.head) == 1 && (!chosen || id < *chosen))
                chosen = id;
        }
        if (opts.strict && !chosen)
            throw InternalError("pack_cycles: cycle without a simple edge");

        std::unordered_set<EdgeId> used(cycle.edge_ids.begin(), cycle.edge_ids.end());
        std::vector<Edge> next;
        for (const Edge& e : remaining)
            if (!used.count(e.id))
                next.push_back(e);
        remaining = std::move(next);
        std::vector<VertexId> vs = trail_vertices(g, cycle);
        vs.pop_back();
        for (VertexId v : vs)
            ++on_cycles[v];
        pack.cycles.push_back(std::move(cycle));
        pack.chosen_simple.push_back(chosen);
    }
    return pack;
}

LiftedGraph normalize_multiedges(const LiftedGraph& lg) {
    if (!is_eulerian(lg.current()))
        throw PreconditionError("normalize_multiedges: current graph not Eulerian");
    LiftedGraph work = lg;
    for (;;) {
        const MultiDigraph& cur = work.current();
        VertexId y = cur.vertex_count();
        std::vector<VertexId> multi_in_tails, multi_out_heads;
        for (VertexId v = 0; v < cur.vertex_count() && y == cur.vertex_count(); ++v) {
            std::vector<VertexId> tails, heads;
            for (VertexId t : cur.in_neighbours(v))
                if (cur.multiplicity(t, v) >= 2)
                    tails.push_back(t);
            if (tails.empty())
                continue;
            for (VertexId h : cur.out_neighbours(v))
                if (cur.multiplicity(v, h) >= 2)
                    heads.push_back(h);
            if (heads.empty())
                continue;
            y = v;
            multi_in_tails = std::move(tails);
            multi_out_heads = std::move(heads);
        }
        if (y == cur.vertex_count())
            break;

        bool split_done = false;
        for (VertexId x : multi_in_tails) {
            for (VertexId z : multi_out_heads) {
                if (x == z)
                    continue;
                EdgeId e1 = cur.edges_between(x, y).front();
                EdgeId e2 = cur.edges_between(y, z).front();
                work = work.split(e1, e2);
                split_done = true;
                break;
            }
            if (split_done)
                break;
        }
        if (!split_done) {
            // only a=>y=>a remains; drop one copy of each direction
            VertexId a = multi_in_tails.front();
            std::vector<EdgeId> drop{cur.edges_between(a, y).front(),
                                     cur.edges_between(y, a).front()};
            work = work.delete_edges(drop);
        }
    }
    if (!is_eulerian(work.current()))
        throw InternalError("normalize_multiedges: Eulerianness lost");
    ValidityReport rep = verify_certificate(work.extract_certificate());
    if (!rep.valid)
        throw InternalError("normalize_multiedges: certificate invalid");
    return work;
}

ValidityReport verify_undirected_certificate(const UndirectedCertificate& cert) {
    ValidityReport rep;
    auto fail = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };
    if (cert.vertex_map.size() != cert.order) {
        fail("vertex map size disagrees with pattern order");
        return rep;
    }
    std::set<VertexId> images;
    for (VertexId hv : cert.vertex_map) {
        if (hv >= cert.host.vertex_count())
            fail("pattern vertex maps outside host");
        else if (!images.insert(hv).second)
            fail("vertex map not injective");
    }
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> used; // host edge -> pair
    for (std::size_t i = 0; i < cert.order; ++i) {
        for (std::size_t j = i + 1; j < cert.order; ++j) {
            auto it = cert.trails.find({i, j});
            if (it == cert.trails.end()) {
                fail("pattern pair {" + std::to_string(i) + "," + std::to_string(j) +
                     "} has no trail");
                continue;
            }
            const auto& walk = it->second;
            if (walk.empty()) {
                fail("empty trail for a pattern pair");
                continue;
            }
            VertexId at = cert.vertex_map[i];
            std::set<std::size_t> seen;
            bool ok = true;
            for (std::size_t idx : walk) {
                if (idx >= cert.host.edge_count() || !seen.insert(idx).second) {
                    ok = false;
                    break;
                }
                auto [a, b] = cert.host.edges()[idx];
                if (at == a)
                    at = b;
                else if (at == b)
                    at = a;
                else {
                    ok = false;
                    break;
                }
                auto [uit, fresh] = used.emplace(idx, std::make_pair(i, j));
                if (!fresh && uit->second != std::make_pair(i, j)) {
                    fail("host edge " + std::to_string(idx) + " shared by two trails");
                }
            }
            if (!ok || at != cert.vertex_map[j])
                fail("trail for pattern pair {" + std::to_string(i) + "," +
                     std::to_string(j) + "} is not a walk between its endpoints");
        }
    }
    for (const auto& [pr, walk] : cert.trails)
        if (pr.first >= pr.second || pr.second >= cert.order)
            fail("trail keyed by an unknown pattern pair");
    return rep;
}

namespace {

// ---- undirected clique immersion (oracle stand-in) ------------------------

struct RouteState {
    const SimpleGraph& g;
    std::vector<bool> used;  // per host edge index
    std::size_t budget;      // backtracking step budget
};

// enumerate simple paths from `at` to `goal` in DFS order; returns true
// when the continuation succeeds
bool route_pairs(RouteState& st, const std::vector<VertexId>& map,
                 const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                 std::size_t idx,
                 std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>>& out);

bool dfs_path(RouteState& st, VertexId at, VertexId goal, std::vector<bool>& visited,
              std::vector<std::size_t>& path, const std::vector<VertexId>& map,
              const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
              std::size_t idx,
              std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>>& out) {
    if (st.budget == 0)
        return false;
    --st.budget;
    if (at == goal) {
        out[pairs[idx]] = path;
        if (route_pairs(st, map, pairs, idx + 1, out))
            return true;
        out.erase(pairs[idx]);
        return false;
    }
    for (VertexId nb : st.g.neighbours(at)) {
        if (visited[nb])
            continue;
        std::size_t eidx = st.g.edge_index(at, nb);
        if (st.used[eidx])
            continue;
        visited[nb] = true;
        st.used[eidx] = true;
        path.push_back(eidx);
        if (dfs_path(st, nb, goal, visited, path, map, pairs, idx, out))
            return true;
        path.pop_back();
        st.used[eidx] = false;
        visited[nb] = false;
    }
    return false;
}

bool route_pairs(RouteState& st, const std::vector<VertexId>& map,
                 const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                 std::size_t idx,
                 std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>>& out) {
    if (idx == pairs.size())
        return true;
    VertexId s = map[pairs[idx].first], t = map[pairs[idx].second];
    std::vector<bool> visited(st.g.vertex_count(), false);
    visited[s] = true;
    std::vector<std::size_t> path;
    return dfs_path(st, s, t, visited, path, map, pairs, idx, out);
}

std::optional<UndirectedCertificate> try_exact(const SimpleGraph& g,
                                               const std::vector<VertexId>& map) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < map.size(); ++i)
        for (std::size_t j = i + 1; j < map.size(); ++j)
            pairs.emplace_back(i, j);
    RouteState st{g, std::vector<bool>(g.edge_count(), false), 500000};
    UndirectedCertificate cert;
    cert.host = g;
    cert.order = map.size();
    cert.vertex_map = map;
    if (route_pairs(st, map, pairs, 0, cert.trails))
        return cert;
    return std::nullopt;
}

std::optional<UndirectedCertificate> try_greedy(const SimpleGraph& g,
                                                const std::vector<VertexId>& map) {
    std::vector<bool> used(g.edge_count(), false);
    UndirectedCertificate cert;
    cert.host = g;
    cert.order = map.size();
    cert.vertex_map = map;
    for (std::size_t i = 0; i < map.size(); ++i) {
        for (std::size_t j = i + 1; j < map.size(); ++j) {
            // BFS shortest walk over unused edges
            std::vector<std::size_t> par_edge(g.vertex_count(), INF);
            std::vector<VertexId> par_vertex(g.vertex_count(), 0);
            std::vector<bool> seen(g.vertex_count(), false);
            std::queue<VertexId> q;
            seen[map[i]] = true;
            q.push(map[i]);
            while (!q.empty() && !seen[map[j]]) {
                VertexId u = q.front();
                q.pop();
                for (VertexId nb : g.neighbours(u)) {
                    std::size_t eidx = g.edge_index(u, nb);
                    if (used[eidx] || seen[nb])
                        continue;
                    seen[nb] = true;
                    par_edge[nb] = eidx;
                    par_vertex[nb] = u;
                    q.push(nb);
                }
            }
            if (!seen[map[j]])
                return std::nullopt;
            std::vector<std::size_t> path;
            for (VertexId v = map[j]; v != map[i]; v = par_vertex[v])
                path.push_back(par_edge[v]);
            std::reverse(path.begin(), path.end());
            for (std::size_t e : path)
                used[e] = true;
            cert.trails[{i, j}] = std::move(path);
        }
    }
    return cert;
}

} // namespace

UndirectedCertificate undirected_clique_immersion(const SimpleGraph& g, std::size_t t) {
    (void)t; // the target is the caller's contract; the search is maximal anyway
    std::vector<VertexId> active;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) > 0)
            active.push_back(v);

    std::size_t upper = active.size();
    while (upper > 1 && upper * (upper - 1) / 2 > g.edge_count())
        --upper;

    const bool exact = g.vertex_count() <= 8;
    for (std::size_t s = upper; s >= 2; --s) {
        if (exact) {
            // all s-subsets of active vertices, lexicographically
            std::vector<std::size_t> sel(s);
            std::iota(sel.begin(), sel.end(), 0);
            for (;;) {
                std::vector<VertexId> map;
                for (std::size_t k : sel)
                    map.push_back(active[k]);
                if (auto cert = try_exact(g, map))
                    return *cert;
                std::size_t k = s;
                while (k > 0 && sel[k - 1] == active.size() - s + k - 1)
                    --k;
                if (k == 0)
                    break;
                ++sel[k - 1];
                for (std::size_t l = k; l < s; ++l)
                    sel[l] = sel[l - 1] + 1;
            }
        } else {
            std::vector<VertexId> by_degree = active;
            std::stable_sort(by_degree.begin(), by_degree.end(),
                             [&](VertexId a, VertexId b) { return g.degree(a) > g.degree(b); });
            std::vector<VertexId> map(by_degree.begin(),
                                      by_degree.begin() + static_cast<std::ptrdiff_t>(s));
            std::sort(map.begin(), map.end());
            if (auto cert = try_greedy(g, map))
                return *cert;
        }
    }

    UndirectedCertificate k1;
    k1.host = g;
    k1.order = 1;
    k1.vertex_map = {active.empty() ? 0 : active.front()};
    return k1;
}

ImmersionCertificate lift_directed_clique(const LiftedGraph& host, const CyclePack& pack,
                                          const UndirectedCertificate& und_cert,
                                          const std::vector<std::size_t>& cycle_of_host_edge) {
    ValidityReport und_rep = verify_undirected_certificate(und_cert);
    if (!und_rep.valid)
        throw InputError("lift_directed_clique: undirected certificate invalid");
    const MultiDigraph& cur = host.current();
    if (und_cert.host.vertex_count() != cur.vertex_count())
        throw InputError("lift_directed_clique: host graphs disagree");
    if (cycle_of_host_edge.size() != und_cert.host.edge_count())
        throw InputError("lift_directed_clique: cycle map size mismatch");
    std::set<std::size_t> distinct(cycle_of_host_edge.begin(), cycle_of_host_edge.end());
    if (distinct.size() != cycle_of_host_edge.size())
        throw InputError("lift_directed_clique: a cycle backs two host edges");

    struct Arcs {
        std::vector<EdgeId> fwd; // a -> b along the cycle
        std::vector<EdgeId> bwd; // b -> a along the cycle
        VertexId a, b;
    };
    std::vector<Arcs> arcs(und_cert.host.edge_count());
    for (std::size_t idx = 0; idx < und_cert.host.edge_count(); ++idx) {
        std::size_t ci = cycle_of_host_edge[idx];
        if (ci >= pack.cycles.size())
            throw InputError("lift_directed_clique: unknown cycle index");
        const Trail& cyc = pack.cycles[ci];
        auto [a, b] = und_cert.host.edges()[idx];
        std::vector<VertexId> vs = trail_vertices(cur, cyc); // closed: first == last
        vs.pop_back();
        std::size_t pa = INF, pb = INF;
        for (std::size_t k = 0; k < vs.size(); ++k) {
            if (vs[k] == a) {
                if (pa != INF)
                    throw InputError("lift_directed_clique: cycle revisits a vertex");
                pa = k;
            }
            if (vs[k] == b) {
                if (pb != INF)
                    throw InputError("lift_directed_clique: cycle revisits a vertex");
                pb = k;
            }
        }
        if (pa == INF || pb == INF)
            throw InputError("lift_directed_clique: cycle misses its host edge endpoints");
        auto arc = [&](std::size_t from, std::size_t to) {
            std::vector<EdgeId> ids;
            for (std::size_t k = from; k != to; k = (k + 1) % vs.size())
                ids.push_back(cyc.edge_ids[k]);
            return ids;
        };
        arcs[idx] = {arc(pa, pb), arc(pb, pa), a, b};
        if (arcs[idx].fwd.size() + arcs[idx].bwd.size() != cyc.length())
            throw InternalError("lift_directed_clique: arcs do not partition the cycle");
    }

    const std::size_t s = und_cert.order;
    ImmersionCertificate mid;
    mid.host = cur;
    std::vector<Edge> pedges;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j)
            if (i != j)
                pedges.push_back({i * s + j, i, j});
    mid.pattern = MultiDigraph(s, std::move(pedges));
    for (std::size_t i = 0; i < s; ++i)
        mid.vertex_map[i] = und_cert.vertex_map[i];

    for (const auto& [pr, walk] : und_cert.trails) {
        auto [i, j] = pr;
        VertexId at = und_cert.vertex_map[i];
        Trail fwd{{}, at, at};
        std::vector<const Arcs*> steps;
        std::vector<bool> step_forward;
        for (std::size_t idx : walk) {
            const Arcs& ac = arcs[idx];
            bool forward = (at == ac.a);
            const std::vector<EdgeId>& seg = forward ? ac.fwd : ac.bwd;
            for (EdgeId id : seg)
                fwd.edge_ids.push_back(id);
            at = forward ? ac.b : ac.a;
            steps.push_back(&ac);
            step_forward.push_back(forward);
        }
        fwd.end = at;
        Trail bwd{{}, at, at};
        for (std::size_t k = steps.size(); k-- > 0;) {
            const std::vector<EdgeId>& seg = step_forward[k] ? steps[k]->bwd : steps[k]->fwd;
            for (EdgeId id : seg)
                bwd.edge_ids.push_back(id);
        }
        bwd.end = und_cert.vertex_map[i];
        mid.trail_map[i * s + j] = std::move(fwd);
        mid.trail_map[j * s + i] = std::move(bwd);
    }

    ValidityReport mid_rep = verify_certificate(mid);
    if (!mid_rep.valid)
        throw InternalError("lift_directed_clique: mid-level certificate invalid: " +
                            (mid_rep.violations.empty() ? std::string{}
                                                        : mid_rep.violations.front()));
    ImmersionCertificate final_cert = compose(host.extract_certificate(), mid);
    ValidityReport final_rep = verify_certificate(final_cert);
    if (!final_rep.valid)
        throw InternalError("lift_directed_clique: final certificate invalid");
    return final_cert;
}

ImmersionCertificate dense_to_complete(const LiftedGraph& lg, double alpha,
                                       const DenseCompletionOptions& opts) {
    const MultiDigraph& cur0 = lg.current();
    std::vector<VertexId> active = cur0.active_vertices();
    const std::size_t n = active.size();
    if (n == 0)
        throw PreconditionError("dense_to_complete: empty graph");
    SimpleGraph und0 = underlying_simple(cur0);
    for (VertexId v : active)
        if (static_cast<double>(und0.degree(v)) + kEps <
            alpha * static_cast<double>(n))
            throw PreconditionError("dense_to_complete: underlying min degree below alpha*n");

    LiftedGraph norm = normalize_multiedges(lg);

    std::size_t ell;
    std::size_t required_s;
    if (opts.strict) {
        double ell_f = std::pow(2.0, -16.0) * std::pow(alpha, 4.0) *
                       static_cast<double>(n) * static_cast<double>(n);
        double s_f = 1e-9 * std::pow(alpha, 4.0) * static_cast<double>(n);
        if (ell_f < 1.0)
            throw HypothesisNotMet("cycle-packing",
                                   "strict cycle count is below 1; refusing a vacuous run");
        if (s_f < 2.0)
            throw HypothesisNotMet("clique",
                                   "strict clique order is below 2; refusing a vacuous run");
        ell = static_cast<std::size_t>(ell_f);
        required_s = static_cast<std::size_t>(s_f);
    } else {
        ell = opts.pack_target == 0 ? INF : opts.pack_target;
        required_s = std::max<std::size_t>(opts.target_s, 1);
    }

    PackOptions popts;
    popts.strict = opts.strict;
    popts.best_effort = !opts.strict && opts.pack_target == 0;
    popts.n_override = n;
    CyclePack pack = pack_cycles(norm.current(), ell, alpha, popts);
    if (pack.cycles.empty())
        throw HypothesisNotMet("cycle-packing", "no edge-disjoint cycles found");

    // auxiliary graph of chosen simple edges; first cycle wins a pair
    const MultiDigraph& cur = norm.current();
    std::map<std::pair<VertexId, VertexId>, std::size_t> pair_cycle;
    for (std::size_t c = 0; c < pack.cycles.size(); ++c) {
        if (!pack.chosen_simple[c])
            continue;
        const Edge& e = cur.edge(*pack.chosen_simple[c]);
        auto pr = std::minmax(e.tail, e.head);
        pair_cycle.emplace(std::make_pair(pr.first, pr.second), c);
    }
    if (pair_cycle.empty())
        throw HypothesisNotMet("auxiliary-graph", "no cycle provided a simple edge");
    std::vector<std::pair<VertexId, VertexId>> hpairs;
    for (const auto& [pr, c] : pair_cycle)
        hpairs.push_back(pr);
    SimpleGraph H(cur.vertex_count(), hpairs);

    SimpleGraph H2 = min_degree_subgraph(H, 0.5);
    std::vector<std::size_t> cycle_of(H2.edge_count());
    for (std::size_t i = 0; i < H2.edge_count(); ++i)
        cycle_of[i] = pair_cycle.at(H2.edges()[i]);

    UndirectedCertificate und = undirected_clique_immersion(H2, required_s);
    if (und.order < required_s)
        throw HypothesisNotMet("clique", "found K_" + std::to_string(und.order) +
                                             ", required K_" + std::to_string(required_s));

    // trails in und may use only a subset of H2's edges; unused host edges
    // still demand injective cycle assignments, which hold by construction
    return lift_directed_clique(norm, pack, und, cycle_of);
}

} // namespace immersion
