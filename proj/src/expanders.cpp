#include "immersion/expanders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_set>

namespace immersion {

namespace {
constexpr double kEps = 1e-9;
constexpr std::size_t kNoVertex = std::numeric_limits<std::size_t>::max();
} // namespace

double rho(const ExpansionParams& p, double x) {
    if (x < p.t)
        return 0.0;
    double lg = std::log2(4.0 * x / p.t);
    return 1.0 / (p.constants.rho_denom * lg * lg);
}

double gamma_factor(const ExpansionParams& p, double x) {
    if (x <= p.t)
        return 1.0; // log2(2x/t) <= 1 here, so the cap binds
    return std::min(1.0, 1.0 / std::log2(2.0 * x / p.t));
}

double phi_potential(const ExpansionParams& p, const SimpleGraph& g) {
    if (g.vertex_count() == 0)
        throw InputError("phi_potential of empty graph");
    return average_degree(g) * (1.0 + gamma_factor(p, static_cast<double>(g.vertex_count())));
}

namespace {

// ---- subset evaluation ------------------------------------------------

struct NeighbourCost {
    VertexId v;
    std::size_t cost;
    std::vector<EdgeId> edges;
};

// greedy knockout of cheapest external neighbours within an edge budget;
// exact for minimizing the surviving neighbour count
std::pair<std::size_t, std::vector<EdgeId>>
knock_out(std::vector<NeighbourCost> nbrs, double budget) {
    std::sort(nbrs.begin(), nbrs.end(), [](const NeighbourCost& a, const NeighbourCost& b) {
        return a.cost != b.cost ? a.cost < b.cost : a.v < b.v;
    });
    std::size_t used = 0;
    std::size_t survivors = nbrs.size();
    std::vector<EdgeId> removed;
    for (const NeighbourCost& nc : nbrs) {
        if (static_cast<double>(used + nc.cost) > budget + kEps)
            break;
        used += nc.cost;
        --survivors;
        removed.insert(removed.end(), nc.edges.begin(), nc.edges.end());
    }
    return {survivors, removed};
}

std::optional<ExpansionWitness> evaluate_undirected(const SimpleGraph& g,
                                                    const ExpansionParams& p,
                                                    ExpansionKind kind,
                                                    const std::vector<VertexId>& xs,
                                                    const std::vector<bool>& in_x) {
    const double r = rho(p, static_cast<double>(xs.size()));
    if (r == 0.0)
        return std::nullopt;
    const double d = average_degree(g);
    const double rx = r * static_cast<double>(xs.size());

    if (kind == ExpansionKind::edge_undirected) {
        std::size_t cut = 0;
        for (auto [u, v] : g.edges())
            if (in_x[u] != in_x[v])
                ++cut;
        double required = p.constants.edge_factor_undirected * d * rx;
        if (static_cast<double>(cut) + kEps < required)
            return ExpansionWitness{xs, {}, static_cast<double>(cut), required,
                                    "undirected cut"};
        return std::nullopt;
    }

    // robust vertex: adversary deletes boundary edges within budget d*rho*|X|
    std::vector<NeighbourCost> nbrs;
    std::vector<std::size_t> cost(g.vertex_count(), 0);
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        auto [u, v] = g.edges()[i];
        if (in_x[u] == in_x[v])
            continue;
        VertexId outside = in_x[u] ? v : u;
        if (cost[outside] == 0)
            nbrs.push_back({outside, 0, {}});
        ++cost[outside];
    }
    for (auto& nc : nbrs)
        nc.cost = cost[nc.v];
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        auto [u, v] = g.edges()[i];
        if (in_x[u] == in_x[v])
            continue;
        VertexId outside = in_x[u] ? v : u;
        for (auto& nc : nbrs)
            if (nc.v == outside) {
                nc.edges.push_back(i);
                break;
            }
    }
    auto [survivors, removed] = knock_out(std::move(nbrs), d * rx);
    double required = p.constants.vertex_factor_undirected * rx;
    if (static_cast<double>(survivors) + kEps < required)
        return ExpansionWitness{xs, removed, static_cast<double>(survivors), required,
                                "robust neighbourhood"};
    return std::nullopt;
}

std::optional<ExpansionWitness> evaluate_directed(const MultiDigraph& g,
                                                  const ExpansionParams& p,
                                                  ExpansionKind kind,
                                                  const std::vector<VertexId>& xs,
                                                  const std::vector<bool>& in_x) {
    const double r = rho(p, static_cast<double>(xs.size()));
    if (r == 0.0)
        return std::nullopt;
    const double d = average_degree(g);
    const double rx = r * static_cast<double>(xs.size());

    if (kind == ExpansionKind::edge_directed) {
        std::size_t out_cut = 0, in_cut = 0;
        for (const Edge& e : g.edges()) {
            if (in_x[e.tail] && !in_x[e.head])
                ++out_cut;
            if (!in_x[e.tail] && in_x[e.head])
                ++in_cut;
        }
        double required = p.constants.edge_factor_directed * d * rx;
        if (static_cast<double>(out_cut) + kEps < required)
            return ExpansionWitness{xs, {}, static_cast<double>(out_cut), required,
                                    "out-cut"};
        if (static_cast<double>(in_cut) + kEps < required)
            return ExpansionWitness{xs, {}, static_cast<double>(in_cut), required,
                                    "in-cut"};
        return std::nullopt;
    }

    double required = p.constants.vertex_factor_directed * rx;
    for (bool outward : {true, false}) {
        std::vector<std::size_t> cost(g.vertex_count(), 0);
        std::vector<std::vector<EdgeId>> ids(g.vertex_count());
        for (const Edge& e : g.edges()) {
            VertexId inside = outward ? e.tail : e.head;
            VertexId outside = outward ? e.head : e.tail;
            if (in_x[inside] && !in_x[outside]) {
                ++cost[outside];
                ids[outside].push_back(e.id);
            }
        }
        std::vector<NeighbourCost> nbrs;
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            if (cost[v] > 0)
                nbrs.push_back({v, cost[v], ids[v]});
        auto [survivors, removed] = knock_out(std::move(nbrs), d * rx);
        if (static_cast<double>(survivors) + kEps < required)
            return ExpansionWitness{xs, removed, static_cast<double>(survivors), required,
                                    outward ? "robust out-neighbourhood"
                                            : "robust in-neighbourhood"};
    }
    return std::nullopt;
}

template <typename Graph, typename Eval>
ExpansionReport run_check(const Graph& g, const ExpansionParams& p, ExpansionKind kind,
                          const CheckMode& mode, std::size_t max_size, Eval eval) {
    ExpansionReport rep;
    const std::size_t n = g.vertex_count();
    if (mode.kind == CheckMode::Kind::exhaustive) {
        rep.mode = "exhaustive";
        if (n > p.exhaustive_cap)
            throw InputError("exhaustive expansion check above the subset cap");
        for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
            std::vector<VertexId> xs;
            std::vector<bool> in_x(n, false);
            for (std::size_t v = 0; v < n; ++v)
                if (mask & (1ull << v)) {
                    xs.push_back(v);
                    in_x[v] = true;
                }
            if (xs.size() > max_size)
                continue;
            if (auto w = eval(g, p, kind, xs, in_x)) {
                rep.holds = false;
                rep.witness = std::move(*w);
                return rep;
            }
        }
        return rep;
    }

    rep.mode = "sampled";
    if (max_size == 0)
        return rep;
    std::mt19937_64 rng(mode.seed);
    std::vector<VertexId> all(n);
    std::iota(all.begin(), all.end(), 0);
    auto try_set = [&](std::vector<VertexId> xs) -> bool {
        std::sort(xs.begin(), xs.end());
        std::vector<bool> in_x(n, false);
        for (VertexId v : xs)
            in_x[v] = true;
        if (auto w = eval(g, p, kind, xs, in_x)) {
            rep.holds = false;
            rep.witness = std::move(*w);
            return true;
        }
        return false;
    };
    for (VertexId v = 0; v < n && max_size >= 1; ++v)
        if (try_set({v}))
            return rep;
    for (std::size_t trial = 0; trial < mode.trials; ++trial) {
        std::size_t size = 1 + rng() % std::max<std::size_t>(max_size, 1);
        std::shuffle(all.begin(), all.end(), rng);
        if (try_set(std::vector<VertexId>(all.begin(),
                                          all.begin() + static_cast<std::ptrdiff_t>(size))))
            return rep;
    }
    return rep;
}

} // namespace

ExpansionReport check_expansion(const SimpleGraph& g, const ExpansionParams& p,
                                ExpansionKind kind, const CheckMode& mode) {
    if (kind != ExpansionKind::edge_undirected &&
        kind != ExpansionKind::robust_vertex_undirected)
        throw InputError("undirected graph passed to a directed expansion check");
    if (g.vertex_count() == 0)
        throw InputError("expansion check on empty graph");
    return run_check(g, p, kind, mode, g.vertex_count() / 2, evaluate_undirected);
}

ExpansionReport check_expansion(const MultiDigraph& g, const ExpansionParams& p,
                                ExpansionKind kind, const CheckMode& mode) {
    if (kind != ExpansionKind::edge_directed && kind != ExpansionKind::robust_vertex_directed)
        throw InputError("directed graph passed to an undirected expansion check");
    if (g.vertex_count() == 0)
        throw InputError("expansion check on empty graph");
    std::size_t max_size = g.vertex_count() / 2;
    if (kind == ExpansionKind::robust_vertex_directed && !p.cap_robust_directed)
        max_size = g.vertex_count();
    return run_check(g, p, kind, mode, max_size, evaluate_directed);
}

namespace {

// ---- phi ascent --------------------------------------------------------

struct Subset {
    std::vector<VertexId> vs; // ascending
    std::size_t edges = 0;

    double phi(const ExpansionParams& p, const SimpleGraph& g) const {
        (void)g;
        if (vs.empty())
            return 0.0;
        double d = 2.0 * static_cast<double>(edges) / static_cast<double>(vs.size());
        return d * (1.0 + gamma_factor(p, static_cast<double>(vs.size())));
    }
};

Subset make_subset(const SimpleGraph& g, std::vector<VertexId> vs) {
    std::sort(vs.begin(), vs.end());
    std::vector<bool> in(g.vertex_count(), false);
    for (VertexId v : vs)
        in[v] = true;
    std::size_t e = 0;
    for (auto [u, w] : g.edges())
        if (in[u] && in[w])
            ++e;
    return Subset{std::move(vs), e};
}

SimpleGraph compact_induced(const SimpleGraph& g, const std::vector<VertexId>& vs) {
    std::vector<std::size_t> pos(g.vertex_count(), kNoVertex);
    for (std::size_t i = 0; i < vs.size(); ++i)
        pos[vs[i]] = i;
    std::vector<std::pair<VertexId, VertexId>> es;
    for (auto [u, w] : g.edges())
        if (pos[u] != kNoVertex && pos[w] != kNoVertex)
            es.emplace_back(pos[u], pos[w]);
    return SimpleGraph(vs.size(), std::move(es));
}

} // namespace

ExtractedExpander extract_expander(const SimpleGraph& g, const ExpansionParams& p) {
    if (g.edge_count() == 0)
        throw PreconditionError("extract_expander: graph has no edges");

    std::vector<VertexId> all(g.vertex_count());
    std::iota(all.begin(), all.end(), 0);
    Subset cur = make_subset(g, all);
    double phi_cur = cur.phi(p, g);
    std::size_t moves = 0;

    for (;;) {
        bool moved = false;

        // degrees inside the current subset
        std::vector<bool> in(g.vertex_count(), false);
        for (VertexId v : cur.vs)
            in[v] = true;
        std::vector<std::size_t> deg(g.vertex_count(), 0);
        for (auto [u, w] : g.edges())
            if (in[u] && in[w]) {
                ++deg[u];
                ++deg[w];
            }

        // move (a): drop a vertex of degree < d/2  (deg*|S| < e(S), exact)
        for (VertexId v : cur.vs) {
            if (deg[v] * cur.vs.size() < cur.edges) {
                std::vector<VertexId> rest;
                for (VertexId u : cur.vs)
                    if (u != v)
                        rest.push_back(u);
                Subset cand = make_subset(g, std::move(rest));
                double phi_cand = cand.phi(p, g);
                if (phi_cand > phi_cur) {
                    cur = std::move(cand);
                    phi_cur = phi_cand;
                    ++moves;
                    moved = true;
                    break;
                }
            }
        }
        if (moved)
            continue;
        if (cur.vs.size() <= 1)
            break;

        // move (b): restrict to the better side of a violating cut
        SimpleGraph sg = compact_induced(g, cur.vs);
        CheckMode mode = cur.vs.size() <= p.exhaustive_cap
                             ? CheckMode::exhaustive()
                             : CheckMode::sampled(p.probe_seed + moves, p.probe_trials);
        ExpansionReport rep =
            check_expansion(sg, p, ExpansionKind::edge_undirected, mode);
        if (!rep.holds) {
            std::vector<VertexId> side_x, side_rest;
            std::vector<bool> in_x(cur.vs.size(), false);
            for (VertexId xv : rep.witness->x)
                in_x[xv] = true;
            for (std::size_t i = 0; i < cur.vs.size(); ++i)
                (in_x[i] ? side_x : side_rest).push_back(cur.vs[i]);
            Subset a = make_subset(g, std::move(side_x));
            Subset b = make_subset(g, std::move(side_rest));
            double phi_a = a.phi(p, g), phi_b = b.phi(p, g);
            if (phi_a < phi_b) {
                std::swap(a, b);
                std::swap(phi_a, phi_b);
            }
            if (phi_a > phi_cur) {
                cur = std::move(a);
                phi_cur = phi_a;
                ++moves;
                moved = true;
            } else if (phi_b > phi_cur) {
                cur = std::move(b);
                phi_cur = phi_b;
                ++moves;
                moved = true;
            }
        }
        if (!moved)
            break;
    }

    // postconditions relative to the input graph
    std::size_t e_g = g.edge_count(), n_g = g.vertex_count();
    if (2 * cur.edges * n_g < e_g * cur.vs.size())
        throw InternalError("extract_expander: average degree fell below d(G)/2");
    SimpleGraph result = compact_induced(g, cur.vs);
    for (VertexId v = 0; v < result.vertex_count(); ++v)
        if (2 * result.degree(v) * n_g < e_g)
            throw InternalError("extract_expander: minimum degree fell below d(G)/4");
    if (result.vertex_count() <= p.exhaustive_cap) {
        ExpansionReport final_rep = check_expansion(
            result, p, ExpansionKind::edge_undirected, CheckMode::exhaustive());
        if (!final_rep.holds)
            throw InternalError("extract_expander: ascent stopped on a non-expander");
    }
    return ExtractedExpander{std::move(result), std::move(cur.vs), moves};
}

LiftedGraph directed_expander_immersion(const MultiDigraph& d_graph, std::size_t d,
                                        const ExpansionParams& p, bool require_oriented) {
    if (!d_graph.is_simple())
        throw PreconditionError("directed_expander_immersion: input not simple");
    if (!is_eulerian(d_graph))
        throw PreconditionError("directed_expander_immersion: input not Eulerian");
    for (VertexId v = 0; v < d_graph.vertex_count(); ++v)
        if (d_graph.in_degree(v) != d || d_graph.out_degree(v) != d)
            throw PreconditionError("directed_expander_immersion: input not d-regular");
    if (require_oriented)
        for (const Edge& e : d_graph.edges())
            if (d_graph.multiplicity(e.head, e.tail) > 0)
                throw PreconditionError(
                    "directed_expander_immersion: antiparallel pair present");

    SimpleGraph und = underlying_simple(d_graph);
    ExtractedExpander ex = extract_expander(und, p);

    // orient the expander inside the input: lexicographically-least
    // directed edge per undirected pair
    std::unordered_set<EdgeId> chosen;
    for (auto [cu, cv] : ex.graph.edges()) {
        VertexId u = ex.vertices[cu], v = ex.vertices[cv];
        std::vector<EdgeId> cands = d_graph.edges_between(u, v);
        std::vector<EdgeId> back = d_graph.edges_between(v, u);
        cands.insert(cands.end(), back.begin(), back.end());
        if (cands.empty())
            throw InternalError("expander edge without a directed counterpart");
        chosen.insert(*std::min_element(cands.begin(), cands.end()));
    }
    std::vector<EdgeId> to_delete;
    for (const Edge& e : d_graph.edges())
        if (!chosen.count(e.id))
            to_delete.push_back(e.id);
    LiftedGraph sub = LiftedGraph(d_graph).delete_edges(to_delete);

    LiftedGraph work = eulerianize_immersion(d_graph, sub);

    // re-verify the four output properties on the active part
    const MultiDigraph& cur = work.current();
    if (!is_eulerian(cur))
        throw InternalError("directed_expander_immersion: output not Eulerian");
    std::vector<VertexId> active = cur.active_vertices();
    MultiDigraph restr = restrict_to(cur, active);
    SimpleGraph rund = underlying_simple(restr);
    if (2.0 * static_cast<double>(rund.edge_count()) <
        static_cast<double>(d) / 2.0 * static_cast<double>(active.size()) - kEps)
        throw InternalError("directed_expander_immersion: underlying density below d/2");
    for (VertexId v = 0; v < restr.vertex_count(); ++v)
        if (static_cast<double>(restr.in_degree(v)) + kEps < static_cast<double>(d) / 8.0 ||
            static_cast<double>(restr.out_degree(v)) + kEps < static_cast<double>(d) / 8.0)
            throw InternalError("directed_expander_immersion: in/out degree below d/8");

    bool exhaustive = restr.vertex_count() <= p.exhaustive_cap;
    CheckMode mode = exhaustive ? CheckMode::exhaustive()
                                : CheckMode::sampled(p.probe_seed, std::max<std::size_t>(
                                                                       p.probe_trials, 200));
    for (ExpansionKind kind :
         {ExpansionKind::edge_directed, ExpansionKind::robust_vertex_directed}) {
        ExpansionReport rep = check_expansion(restr, p, kind, mode);
        if (!rep.holds) {
            if (exhaustive)
                throw InternalError("directed_expander_immersion: output fails " +
                                    rep.witness->quantity);
            throw HypothesisNotMet("expander-verification",
                                   "sampled expansion check failed: " +
                                       rep.witness->quantity);
        }
    }

    ValidityReport vr = verify_certificate(work.extract_certificate());
    if (!vr.valid)
        throw InternalError("directed_expander_immersion: certificate invalid");
    return work;
}

Trail connect_avoiding(const MultiDigraph& g, const std::vector<VertexId>& X,
                       const std::vector<VertexId>& Y, const std::vector<EdgeId>& F,
                       const ExpansionParams& p, bool allow_trivial) {
    (void)p;
    if (X.empty() || Y.empty())
        throw InputError("connect_avoiding: X and Y must be nonempty");
    for (VertexId v : X)
        if (v >= g.vertex_count())
            throw InputError("connect_avoiding: X vertex out of range");
    for (VertexId v : Y)
        if (v >= g.vertex_count())
            throw InputError("connect_avoiding: Y vertex out of range");

    if (allow_trivial) {
        std::vector<VertexId> xs = X, ys = Y, common;
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        std::set_intersection(xs.begin(), xs.end(), ys.begin(), ys.end(),
                              std::back_inserter(common));
        if (!common.empty())
            return Trail{{}, common.front(), common.front()};
    }

    std::unordered_set<EdgeId> forbidden(F.begin(), F.end());
    const std::size_t n = g.vertex_count();
    constexpr std::size_t INF = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> df(n, INF), db(n, INF);
    std::vector<EdgeId> pf(n, 0), pb(n, 0);
    std::vector<VertexId> frontF, frontB;
    for (VertexId v : X)
        if (df[v] == INF) {
            df[v] = 0;
            frontF.push_back(v);
        }
    for (VertexId v : Y)
        if (db[v] == INF) {
            db[v] = 0;
            frontB.push_back(v);
        }

    VertexId meet = 0;
    bool found = false;
    auto check_meet = [&](VertexId v) {
        if (df[v] != INF && db[v] != INF && df[v] + db[v] >= 1) {
            meet = v;
            found = true;
        }
    };
    // X touching Y with a (disallowed) trivial connection is not a meet,
    // so scan initial fronts only for combined distance >= 1 (none yet).

    while (!found && (!frontF.empty() || !frontB.empty())) {
        bool forward = !frontF.empty() &&
                       (frontB.empty() || frontF.size() <= frontB.size());
        std::vector<VertexId>& front = forward ? frontF : frontB;
        std::vector<VertexId> next;
        for (VertexId u : front) {
            auto edges = forward ? g.out_edges(u) : g.in_edges(u);
            for (EdgeId id : edges) {
                if (forbidden.count(id))
                    continue;
                const Edge& e = g.edge(id);
                VertexId w = forward ? e.head : e.tail;
                auto& dist = forward ? df : db;
                auto& par = forward ? pf : pb;
                if (dist[w] != INF)
                    continue;
                dist[w] = dist[u] + 1;
                par[w] = id;
                next.push_back(w);
                check_meet(w);
                if (found)
                    break;
            }
            if (found)
                break;
        }
        if (found)
            break;
        front = std::move(next);
        if (frontF.empty() && frontB.empty())
            break;
    }
    if (!found)
        throw NoPathError("connect_avoiding: the sets are not joinable avoiding F");

    // stitch tree paths together through the meeting vertex
    std::vector<EdgeId> fwd;
    for (VertexId v = meet; df[v] != 0;) {
        fwd.push_back(pf[v]);
        v = g.edge(pf[v]).tail;
    }
    std::reverse(fwd.begin(), fwd.end());
    for (VertexId v = meet; db[v] != 0;) {
        fwd.push_back(pb[v]);
        v = g.edge(pb[v]).head;
    }
    Trail walk;
    walk.edge_ids = std::move(fwd);
    walk.start = walk.edge_ids.empty() ? meet : g.edge(walk.edge_ids.front()).tail;
    walk.end = walk.edge_ids.empty() ? meet : g.edge(walk.edge_ids.back()).head;

    // the two tree paths may overlap; vertex excision also removes any
    // repeated edge, leaving a simple path (or cycle when start == end)
    Trail out = reduce_to_simple(g, walk);

    if (!is_valid_trail(g, out))
        throw InternalError("connect_avoiding: produced an invalid trail");
    for (EdgeId id : out.edge_ids)
        if (forbidden.count(id))
            throw InternalError("connect_avoiding: trail uses a forbidden edge");
    if (out.edge_ids.empty() && !allow_trivial)
        throw InternalError("connect_avoiding: produced a trivial trail");
    return out;
}

} // namespace immersion
