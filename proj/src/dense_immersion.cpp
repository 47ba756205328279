#include "immersion/dense_immersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "immersion/eulerian_tools.hpp"

namespace immersion {

namespace {
constexpr double kEps = 1e-9;
constexpr std::size_t INF = std::numeric_limits<std::size_t>::max();

double log2c(double x) { return std::log2(std::max(x, 2.0)); }

std::size_t from_formula(double v) {
    return static_cast<std::size_t>(std::max(1.0, std::floor(v)));
}
} // namespace

std::size_t DenseOptions::separation_radius(std::size_t n) const {
    if (r_override)
        return r_override;
    return from_formula(std::pow(log2c(log2c(static_cast<double>(n))), 6.0));
}

std::size_t DenseOptions::path_length_cap(std::size_t n) const {
    if (path_cap_override)
        return path_cap_override;
    return from_formula(std::pow(log2c(static_cast<double>(n)), 4.0));
}

std::size_t DenseOptions::saturation_degree(std::size_t n, std::size_t k) const {
    if (sat_degree_override)
        return sat_degree_override;
    return from_formula(static_cast<double>(k) /
                        std::pow(log2c(log2c(static_cast<double>(n))), 3.0));
}

std::size_t DenseOptions::small_block_width(std::size_t n, std::size_t k) const {
    if (small_a_override)
        return std::min(small_a_override, k);
    double l = static_cast<double>(n) / static_cast<double>(k);
    double cap = l / std::pow(log2c(l), 8.0);
    return std::max<std::size_t>(1, std::min<std::size_t>(k, static_cast<std::size_t>(cap)));
}

std::size_t DenseOptions::small_path_cap(std::size_t n, std::size_t k) const {
    if (small_path_cap_override)
        return small_path_cap_override;
    double l = static_cast<double>(n) / static_cast<double>(k);
    return from_formula(std::pow(log2c(l), 5.0));
}

std::vector<EdgeId> ForbiddenLedger::saturated(const MultiDigraph& g,
                                               const std::vector<bool>& ball_union,
                                               std::size_t degree_threshold) const {
    std::vector<std::size_t> din(g.vertex_count(), 0), dout(g.vertex_count(), 0);
    for (EdgeId id : used) {
        const Edge& e = g.edge(id);
        ++dout[e.tail];
        ++din[e.head];
    }
    std::set<EdgeId> out;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (ball_union[v])
            continue;
        if (din[v] >= degree_threshold || dout[v] >= degree_threshold) {
            for (EdgeId id : g.out_edges(v))
                out.insert(id);
            for (EdgeId id : g.in_edges(v))
                out.insert(id);
        }
    }
    return {out.begin(), out.end()};
}

namespace {

// lexicographically-least directed edge per undirected pair
std::vector<EdgeId> orientation_edges(const MultiDigraph& g, const SimpleGraph& und) {
    std::vector<EdgeId> chosen;
    chosen.reserve(und.edge_count());
    for (auto [u, v] : und.edges()) {
        std::vector<EdgeId> c = g.edges_between(u, v);
        std::vector<EdgeId> back = g.edges_between(v, u);
        c.insert(c.end(), back.begin(), back.end());
        chosen.push_back(*std::min_element(c.begin(), c.end()));
    }
    return chosen;
}

std::vector<VertexId> undirected_ball(const SimpleGraph& und, VertexId x, std::size_t r) {
    std::vector<std::size_t> dist(und.vertex_count(), INF);
    dist[x] = 0;
    std::queue<VertexId> q;
    q.push(x);
    std::vector<VertexId> ball{x};
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop();
        if (dist[u] == r)
            continue;
        for (VertexId w : und.neighbours(u)) {
            if (dist[w] != INF)
                continue;
            dist[w] = dist[u] + 1;
            ball.push_back(w);
            q.push(w);
        }
    }
    std::sort(ball.begin(), ball.end());
    return ball;
}

ImmersionCertificate translate_host(const ImmersionCertificate& cert,
                                    const MultiDigraph& full_host,
                                    const std::vector<VertexId>& old_of_new) {
    ImmersionCertificate out;
    out.host = full_host;
    out.pattern = cert.pattern;
    for (const auto& [pv, hv] : cert.vertex_map)
        out.vertex_map[pv] = old_of_new[hv];
    for (const auto& [pe, t] : cert.trail_map) {
        Trail nt;
        nt.edge_ids = t.edge_ids; // restriction preserves edge ids
        nt.start = old_of_new[t.start];
        nt.end = old_of_new[t.end];
        out.trail_map[pe] = std::move(nt);
    }
    return out;
}

} // namespace

TerminalSystem separated_terminals(const MultiDigraph& g, std::size_t k, std::size_t r,
                                   std::size_t out_threshold, std::size_t in_threshold) {
    SimpleGraph und = underlying_simple(g);
    std::vector<std::size_t> dout(g.vertex_count(), 0), din(g.vertex_count(), 0);
    for (EdgeId id : orientation_edges(g, und)) {
        const Edge& e = g.edge(id);
        ++dout[e.tail];
        ++din[e.head];
    }

    TerminalSystem ts;
    ts.radius = r;
    std::vector<bool> excluded(g.vertex_count(), false);
    auto place = [&](bool source) {
        std::vector<VertexId>& into = source ? ts.sources : ts.sinks;
        for (VertexId v = 0; v < g.vertex_count() && into.size() < k; ++v) {
            if (excluded[v])
                continue;
            if (source ? dout[v] < out_threshold : din[v] < in_threshold)
                continue;
            into.push_back(v);
            for (VertexId w : undirected_ball(und, v, 2 * r))
                excluded[w] = true;
        }
    };
    place(true);
    place(false);
    if (ts.sources.size() < k || ts.sinks.size() < k)
        throw HypothesisNotMet("terminals",
                               "placed " + std::to_string(ts.sources.size()) + "+" +
                                   std::to_string(ts.sinks.size()) + " of " +
                                   std::to_string(k) + "+" + std::to_string(k) +
                                   " separated terminals");

    std::vector<VertexId> all = ts.sources;
    all.insert(all.end(), ts.sinks.begin(), ts.sinks.end());
    for (VertexId t : all)
        ts.balls[t] = undirected_ball(und, t, r);

    // independent re-check: pairwise distance and ball disjointness
    for (VertexId t : all) {
        std::vector<VertexId> reach = undirected_ball(und, t, 2 * r);
        for (VertexId o : all)
            if (o != t && std::binary_search(reach.begin(), reach.end(), o))
                throw InternalError("separated_terminals: terminals too close");
    }
    std::vector<bool> seen(g.vertex_count(), false);
    for (const auto& [t, ball] : ts.balls)
        for (VertexId v : ball) {
            if (seen[v])
                throw InternalError("separated_terminals: balls overlap");
            seen[v] = true;
        }
    return ts;
}

BallGrowth grow_ball(const MultiDigraph& g, VertexId x, BallDirection direction,
                     const std::vector<EdgeId>& F, const std::vector<EdgeId>& F_prime,
                     std::size_t r, const ExpansionParams& p) {
    std::set<EdgeId> blocked(F.begin(), F.end());
    blocked.insert(F_prime.begin(), F_prime.end());

    std::vector<std::size_t> dist(g.vertex_count(), INF);
    dist[x] = 0;
    std::queue<VertexId> q;
    q.push(x);
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop();
        if (dist[u] == r)
            continue;
        auto edges = direction == BallDirection::forward ? g.out_edges(u) : g.in_edges(u);
        for (EdgeId id : edges) {
            if (blocked.count(id))
                continue;
            const Edge& e = g.edge(id);
            VertexId w = direction == BallDirection::forward ? e.head : e.tail;
            if (dist[w] != INF)
                continue;
            dist[w] = dist[u] + 1;
            q.push(w);
        }
    }

    BallGrowth bg;
    bg.layers.assign(r, {});
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (v != x && dist[v] != INF && dist[v] >= 1)
            for (std::size_t i = dist[v]; i <= r; ++i)
                bg.layers[i - 1].push_back(v);

    const double d_avg = g.vertex_count() ? average_degree(g) : 0.0;
    for (std::size_t i = 1; i + 1 <= r; ++i) {
        BallGrowthStep st;
        st.layer = i;
        st.size_before = bg.layers[i - 1].size() + 1; // center included
        st.size_after = bg.layers[i].size() + 1;
        std::vector<bool> in_ball(g.vertex_count(), false);
        in_ball[x] = true;
        for (VertexId v : bg.layers[i - 1])
            in_ball[v] = true;
        for (EdgeId id : blocked) {
            if (!g.has_edge(id))
                continue;
            const Edge& e = g.edge(id);
            if (in_ball[e.tail] || in_ball[e.head])
                ++st.forbidden_incident;
        }
        double rho_i = rho(p, static_cast<double>(st.size_before));
        st.budget = d_avg * rho_i * static_cast<double>(st.size_before);
        st.budget_ok = static_cast<double>(st.forbidden_incident) <= st.budget + kEps;
        st.growth_required = (1.0 + rho_i) * static_cast<double>(st.size_before);
        st.growth_ok = static_cast<double>(st.size_after) + kEps >= st.growth_required;
        bg.steps.push_back(st);
    }
    return bg;
}

namespace {

// BFS path between a terminal and a ball member, avoiding the ledger;
// forward yields terminal->member, backward yields member->terminal,
// both returned in edge direction
std::vector<EdgeId> path_within(const MultiDigraph& g, VertexId terminal, VertexId member,
                                const std::set<EdgeId>& blocked, bool forward) {
    if (terminal == member)
        return {};
    std::vector<std::size_t> dist(g.vertex_count(), INF);
    std::vector<EdgeId> par(g.vertex_count(), 0);
    dist[terminal] = 0;
    std::queue<VertexId> q;
    q.push(terminal);
    while (!q.empty() && dist[member] == INF) {
        VertexId u = q.front();
        q.pop();
        auto edges = forward ? g.out_edges(u) : g.in_edges(u);
        for (EdgeId id : edges) {
            if (blocked.count(id))
                continue;
            const Edge& e = g.edge(id);
            VertexId w = forward ? e.head : e.tail;
            if (dist[w] != INF)
                continue;
            dist[w] = dist[u] + 1;
            par[w] = id;
            q.push(w);
        }
    }
    if (dist[member] == INF)
        throw InternalError("ball member unreachable inside its own ball");
    std::vector<EdgeId> path;
    if (forward) {
        for (VertexId v = member; v != terminal;) {
            path.push_back(par[v]);
            v = g.edge(par[v]).tail;
        }
        std::reverse(path.begin(), path.end());
    } else {
        for (VertexId v = member; v != terminal;) {
            path.push_back(par[v]);
            v = g.edge(par[v]).head;
        }
    }
    return path;
}

std::string ledger_summary(const ForbiddenLedger& ledger, std::size_t fsat) {
    return "ledger: used=" + std::to_string(ledger.used.size()) +
           " saturated=" + std::to_string(fsat);
}

} // namespace

ImmersionCertificate immerse_biclique_large(const MultiDigraph& d_graph, std::size_t k,
                                            const DenseOptions& opts) {
    if (k == 0)
        throw InputError("immerse_biclique_large: k must be positive");
    std::vector<VertexId> active = d_graph.active_vertices();
    MultiDigraph rg = restrict_to(d_graph, active);
    const std::size_t n = rg.vertex_count();
    if (n == 0)
        throw PreconditionError("immerse_biclique_large: empty graph");

    if (opts.strict) {
        for (VertexId v = 0; v < n; ++v)
            if (static_cast<double>(rg.in_degree(v)) >
                    opts.max_degree_factor * static_cast<double>(k) + kEps ||
                static_cast<double>(rg.out_degree(v)) >
                    opts.max_degree_factor * static_cast<double>(k) + kEps)
                throw PreconditionError("immerse_biclique_large: degree bound exceeded");
        if (static_cast<double>(underlying_simple(rg).edge_count()) + kEps <
            opts.density_factor * static_cast<double>(k) * static_cast<double>(n))
            throw PreconditionError("immerse_biclique_large: underlying graph too sparse");
        CheckMode mode = n <= opts.expansion.exhaustive_cap
                             ? CheckMode::exhaustive()
                             : CheckMode::sampled(opts.expansion.probe_seed, 200);
        ExpansionReport rep =
            check_expansion(rg, opts.expansion, ExpansionKind::robust_vertex_directed, mode);
        if (!rep.holds)
            throw PreconditionError("immerse_biclique_large: not a robust expander (" +
                                    rep.witness->quantity + ")");
    }

    const std::size_t r = opts.separation_radius(n);
    const std::size_t cap = opts.path_length_cap(n);
    const std::size_t sat = opts.saturation_degree(n, k);
    const std::size_t out_thr = static_cast<std::size_t>(
        std::ceil(opts.vplus_out_factor * static_cast<double>(k) - kEps));

    TerminalSystem ts = separated_terminals(rg, k, r, out_thr, out_thr);

    ForbiddenLedger ledger;
    std::map<std::pair<std::size_t, std::size_t>, Trail> paths;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            VertexId x = ts.sources[i], y = ts.sinks[j];

            std::vector<bool> ball_union(n, false);
            for (VertexId v : ts.balls.at(x))
                ball_union[v] = true;
            for (VertexId v : ts.balls.at(y))
                ball_union[v] = true;
            std::vector<EdgeId> fsat = ledger.saturated(rg, ball_union, sat);

            std::set<EdgeId> forbidden(ledger.used.begin(), ledger.used.end());
            forbidden.insert(fsat.begin(), fsat.end());
            std::vector<EdgeId> fvec(forbidden.begin(), forbidden.end());

            // audit split: edges of paths from x act as the F' budget side
            std::vector<EdgeId> fx, frest;
            std::set<EdgeId> from_x;
            if (auto it = ledger.per_source.find(x); it != ledger.per_source.end())
                from_x.insert(it->second.begin(), it->second.end());
            for (EdgeId id : fvec)
                (from_x.count(id) ? fx : frest).push_back(id);

            BallGrowth fb = grow_ball(rg, x, BallDirection::forward, frest, fx, r,
                                      opts.expansion);
            std::vector<EdgeId> fy, brest;
            std::set<EdgeId> into_y;
            if (auto it = ledger.per_sink.find(y); it != ledger.per_sink.end())
                into_y.insert(it->second.begin(), it->second.end());
            for (EdgeId id : fvec)
                (into_y.count(id) ? fy : brest).push_back(id);
            BallGrowth bb = grow_ball(rg, y, BallDirection::backward, brest, fy, r,
                                      opts.expansion);

            std::vector<VertexId> xset = fb.layers.empty() ? std::vector<VertexId>{}
                                                           : fb.layers.back();
            xset.push_back(x);
            std::vector<VertexId> yset = bb.layers.empty() ? std::vector<VertexId>{}
                                                           : bb.layers.back();
            yset.push_back(y);

            if (opts.strict) {
                double target = static_cast<double>(k) *
                                std::pow(log2c(static_cast<double>(n)), 6.0);
                if (static_cast<double>(xset.size()) < target ||
                    static_cast<double>(yset.size()) < target)
                    throw HypothesisNotMet("biclique-large",
                                           "ball growth fell short for pair (" +
                                               std::to_string(i) + "," + std::to_string(j) +
                                               "); " + ledger_summary(ledger, fsat.size()));
            }

            Trail mid;
            try {
                mid = connect_avoiding(rg, xset, yset, fvec, opts.expansion);
            } catch (const NoPathError&) {
                throw HypothesisNotMet("biclique-large",
                                       "pair (" + std::to_string(i) + "," +
                                           std::to_string(j) + ") unconnectable; " +
                                           ledger_summary(ledger, fsat.size()));
            }

            std::vector<EdgeId> ids = path_within(rg, x, mid.start, forbidden, true);
            ids.insert(ids.end(), mid.edge_ids.begin(), mid.edge_ids.end());
            std::vector<EdgeId> tail_ids = path_within(rg, y, mid.end, forbidden, false);
            ids.insert(ids.end(), tail_ids.begin(), tail_ids.end());
            Trail full{std::move(ids), x, y};
            full = reduce_to_simple(rg, full);

            if (full.length() > cap)
                throw HypothesisNotMet("biclique-large",
                                       "path for pair (" + std::to_string(i) + "," +
                                           std::to_string(j) + ") exceeds the length cap; " +
                                           ledger_summary(ledger, fsat.size()));

            for (EdgeId id : full.edge_ids) {
                ledger.used.insert(id);
                ledger.per_source[x].push_back(id);
                ledger.per_sink[y].push_back(id);
            }
            paths[{i, j}] = std::move(full);
        }
    }

    ImmersionCertificate cert;
    cert.host = rg;
    std::vector<Edge> pedges;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            pedges.push_back({i * k + j, i, k + j});
    cert.pattern = MultiDigraph(2 * k, std::move(pedges));
    for (std::size_t i = 0; i < k; ++i) {
        cert.vertex_map[i] = ts.sources[i];
        cert.vertex_map[k + i] = ts.sinks[i];
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            cert.trail_map[i * k + j] = paths.at({i, j});

    ValidityReport rep = verify_certificate(cert);
    if (!rep.valid)
        throw InternalError("immerse_biclique_large: certificate invalid: " +
                            rep.violations.front());
    ImmersionCertificate out = translate_host(cert, d_graph, active);
    if (!verify_certificate(out).valid)
        throw InternalError("immerse_biclique_large: translated certificate invalid");
    return out;
}

ImmersionCertificate immerse_biclique_small(const MultiDigraph& d_graph, std::size_t k,
                                            const DenseOptions& opts) {
    if (k == 0)
        throw InputError("immerse_biclique_small: k must be positive");
    std::vector<VertexId> active = d_graph.active_vertices();
    MultiDigraph rg = restrict_to(d_graph, active);
    const std::size_t n = rg.vertex_count();
    if (n == 0)
        throw PreconditionError("immerse_biclique_small: empty graph");

    const double ell = static_cast<double>(n) / static_cast<double>(k);
    if (opts.strict) {
        if (static_cast<double>(k) < std::pow(log2c(ell), 7.0))
            throw PreconditionError("immerse_biclique_small: k below (log l)^7");
        if (static_cast<double>(underlying_simple(rg).edge_count()) + kEps <
            opts.density_factor * static_cast<double>(k) * static_cast<double>(n))
            throw PreconditionError("immerse_biclique_small: underlying graph too sparse");
    }

    const std::size_t a = opts.small_block_width(n, k);
    const std::size_t b = (k + a - 1) / a;
    const std::size_t w_size = static_cast<std::size_t>(
        std::ceil(opts.w_size_factor * static_cast<double>(k) - kEps));
    const std::size_t sel_deg = static_cast<std::size_t>(
        std::ceil(opts.sel_degree_factor * static_cast<double>(k) - kEps));
    const std::size_t path_cap = opts.small_path_cap(n, k);

    // block layout: repeatedly pick a vertex with a large private fan in
    // the orientation of the depleted graph
    std::vector<VertexId> u_plus, u_minus;                 // block-major, a per block
    std::map<VertexId, std::vector<VertexId>> fan;         // W(u)
    std::vector<bool> in_u(n, false);

    auto depleted_orientation = [&](const std::vector<bool>& removed) {
        std::vector<Edge> kept;
        for (const Edge& e : rg.edges())
            if (!removed[e.tail] && !removed[e.head])
                kept.push_back(e);
        MultiDigraph sub(n, kept, rg.loops_allowed());
        SimpleGraph su = underlying_simple(sub);
        std::vector<Edge> oriented;
        for (EdgeId id : orientation_edges(sub, su))
            oriented.push_back(sub.edge(id));
        return MultiDigraph(n, std::move(oriented), rg.loops_allowed());
    };

    for (std::size_t block = 0; block < b; ++block) {
        std::vector<bool> removed = in_u; // U_{<i} leaves the graph
        std::vector<bool> taken = removed;
        for (bool out_side : {true, false}) {
            for (std::size_t j = 0; j < a; ++j) {
                MultiDigraph h = depleted_orientation(taken);
                VertexId pick = n;
                for (VertexId v = 0; v < n; ++v) {
                    if (taken[v])
                        continue;
                    std::size_t deg = out_side ? h.out_degree(v) : h.in_degree(v);
                    if (deg >= sel_deg) {
                        pick = v;
                        break;
                    }
                }
                if (pick == n)
                    throw HypothesisNotMet(
                        "biclique-small", "layout infeasible: no vertex of " +
                                              std::string(out_side ? "out" : "in") +
                                              "-degree " + std::to_string(sel_deg) +
                                              " in block " + std::to_string(block));
                std::vector<VertexId> nbrs = out_side ? h.out_neighbours(pick)
                                                      : h.in_neighbours(pick);
                std::vector<VertexId> w;
                for (VertexId v : nbrs) {
                    if (taken[v] || v == pick)
                        continue;
                    w.push_back(v);
                    if (w.size() == w_size)
                        break;
                }
                if (w.size() < w_size)
                    throw HypothesisNotMet("biclique-small",
                                           "layout infeasible: fan of " +
                                               std::to_string(w.size()) + " < " +
                                               std::to_string(w_size));
                taken[pick] = true;
                for (VertexId v : w)
                    taken[v] = true;
                (out_side ? u_plus : u_minus).push_back(pick);
                fan[pick] = std::move(w);
                in_u[pick] = true;
            }
        }
    }

    // layout sanity: fans inside the right neighbourhood, disjoint per block
    for (std::size_t idx = 0; idx < u_plus.size(); ++idx) {
        for (VertexId w : fan.at(u_plus[idx]))
            if (rg.multiplicity(u_plus[idx], w) == 0)
                throw InternalError("biclique-small: fan outside out-neighbourhood");
        for (VertexId w : fan.at(u_minus[idx]))
            if (rg.multiplicity(w, u_minus[idx]) == 0)
                throw InternalError("biclique-small: fan outside in-neighbourhood");
    }

    // F0: every edge at a terminal except its private fan
    std::set<EdgeId> f0;
    for (VertexId u : u_plus) {
        std::set<VertexId> keep(fan.at(u).begin(), fan.at(u).end());
        for (EdgeId id : rg.out_edges(u))
            if (!keep.count(rg.edge(id).head))
                f0.insert(id);
        for (EdgeId id : rg.in_edges(u))
            f0.insert(id);
    }
    for (VertexId u : u_minus) {
        std::set<VertexId> keep(fan.at(u).begin(), fan.at(u).end());
        for (EdgeId id : rg.in_edges(u))
            if (!keep.count(rg.edge(id).tail))
                f0.insert(id);
        for (EdgeId id : rg.out_edges(u))
            f0.insert(id);
    }

    const std::size_t ab = a * b;
    std::set<EdgeId> used = f0;
    std::map<std::pair<std::size_t, std::size_t>, Trail> connected;
    std::vector<std::size_t> per_matching_counts;

    for (std::size_t m = 0; m < ab; ++m) {
        std::size_t beta_shift = m / a;
        std::size_t alpha_shift = m % a;
        std::size_t found_here = 0;
        for (std::size_t blk = 0; blk < b; ++blk) {
            std::size_t blk2 = (blk + beta_shift) % b;
            for (std::size_t s = 0; s < a; ++s) {
                std::size_t pi = blk * a + s;
                std::size_t qi = blk2 * a + (s + alpha_shift) % a;
                VertexId pv = u_plus[pi], qv = u_minus[qi];

                // BFS shortest path within the cap, avoiding used edges
                std::vector<std::size_t> dist(n, INF);
                std::vector<EdgeId> par(n, 0);
                dist[pv] = 0;
                std::queue<VertexId> q;
                q.push(pv);
                while (!q.empty() && dist[qv] == INF) {
                    VertexId u = q.front();
                    q.pop();
                    if (dist[u] >= path_cap)
                        continue;
                    for (EdgeId id : rg.out_edges(u)) {
                        if (used.count(id))
                            continue;
                        VertexId w = rg.edge(id).head;
                        if (dist[w] != INF)
                            continue;
                        dist[w] = dist[u] + 1;
                        par[w] = id;
                        q.push(w);
                    }
                }
                if (dist[qv] == INF || dist[qv] > path_cap)
                    continue;
                Trail t;
                t.start = pv;
                t.end = qv;
                for (VertexId v = qv; v != pv;) {
                    t.edge_ids.push_back(par[v]);
                    v = rg.edge(par[v]).tail;
                }
                std::reverse(t.edge_ids.begin(), t.edge_ids.end());
                for (EdgeId id : t.edge_ids)
                    used.insert(id);
                connected[{pi, qi}] = std::move(t);
                ++found_here;
            }
        }
        per_matching_counts.push_back(found_here);

        // a source terminal has in-edges only inside F0, so only its own
        // paths may touch it
        for (VertexId u : u_plus) {
            std::size_t cnt = 0;
            for (const auto& [pq, t] : connected)
                for (EdgeId id : t.edge_ids) {
                    const Edge& e = rg.edge(id);
                    if (e.tail == u || e.head == u) {
                        ++cnt;
                        break;
                    }
                }
            if (cnt > ab)
                throw InternalError("biclique-small: a source terminal is over-touched");
        }
    }

    if (opts.strict &&
        static_cast<double>(connected.size()) <
        static_cast<double>(k) * static_cast<double>(k) / 2.0 - kEps) {
        std::string stats;
        for (std::size_t c : per_matching_counts)
            stats += std::to_string(c) + " ";
        throw HypothesisNotMet("biclique-small",
                               "connected " + std::to_string(connected.size()) +
                                   " pairs < k^2/2; per matching: " + stats);
    }
    if (connected.empty())
        throw HypothesisNotMet("biclique-small", "no terminal pair could be connected");

    ImmersionCertificate cert;
    cert.host = rg;
    std::vector<Edge> pedges;
    EdgeId next_pe = 0;
    std::map<std::pair<std::size_t, std::size_t>, EdgeId> pe_of;
    for (const auto& [pq, t] : connected) {
        pedges.push_back({next_pe, pq.first, ab + pq.second});
        pe_of[pq] = next_pe;
        ++next_pe;
    }
    cert.pattern = MultiDigraph(2 * ab, std::move(pedges));
    for (std::size_t i = 0; i < ab; ++i) {
        cert.vertex_map[i] = u_plus[i];
        cert.vertex_map[ab + i] = u_minus[i];
    }
    for (const auto& [pq, t] : connected)
        cert.trail_map[pe_of.at(pq)] = t;

    ValidityReport rep = verify_certificate(cert);
    if (!rep.valid)
        throw InternalError("immerse_biclique_small: certificate invalid: " +
                            rep.violations.front());
    ImmersionCertificate out = translate_host(cert, d_graph, active);
    if (!verify_certificate(out).valid)
        throw InternalError("immerse_biclique_small: translated certificate invalid");
    return out;
}

DenseResult find_dense_immersion(const MultiDigraph& d_graph, std::size_t k,
                                 const DenseOptions& opts) {
    if (k == 0)
        throw InputError("find_dense_immersion: k must be positive");
    if (!d_graph.is_simple() || !is_eulerian(d_graph))
        throw PreconditionError("find_dense_immersion: input must be simple and Eulerian");
    const std::size_t min_in = static_cast<std::size_t>(
        std::ceil(opts.min_indegree_factor * static_cast<double>(k) - kEps));
    for (VertexId v = 0; v < d_graph.vertex_count(); ++v)
        if (d_graph.in_degree(v) < min_in)
            throw PreconditionError("find_dense_immersion: minimum in-degree below " +
                                    std::to_string(min_in));

    const std::size_t d_reg = static_cast<std::size_t>(
        std::ceil(opts.regularize_d_factor * static_cast<double>(k) - kEps));
    RegularOrBiclique ror = regularize_or_biclique(d_graph, d_reg);

    if (std::holds_alternative<ImmersionCertificate>(ror)) {
        ImmersionCertificate cert = std::get<ImmersionCertificate>(std::move(ror));
        if (static_cast<double>(cert.pattern.edge_count()) <
            static_cast<double>(k) * static_cast<double>(k) / 2.0 - kEps)
            throw HypothesisNotMet("dense-dispatch", "biclique shortcut below k^2/2 edges");
        return {std::move(cert), "biclique-shortcut"};
    }

    LiftedGraph lift1 = std::get<LiftedGraph>(std::move(ror));
    ImmersionCertificate cert1 = lift1.extract_certificate();

    LiftedGraph lift2 = directed_expander_immersion(lift1.current(), 2 * d_reg,
                                                    opts.expansion, false);
    ImmersionCertificate cert12 = compose(cert1, lift2.extract_certificate());

    const MultiDigraph& dpp = lift2.current();
    const std::size_t n2 = dpp.active_vertex_count();

    auto finish = [&](ImmersionCertificate inner, std::string branch) {
        ImmersionCertificate full = compose(cert12, std::move(inner));
        auto [compact, mapping] = compact_certificate(full);
        (void)mapping;
        ValidityReport rep = verify_certificate(compact);
        if (!rep.valid)
            throw InternalError("find_dense_immersion: final certificate invalid");
        return DenseResult{std::move(compact), std::move(branch)};
    };

    if (static_cast<double>(n2) <= opts.beta * static_cast<double>(k) + kEps) {
        // the expander itself is the dense pattern; thin parallel copies so
        // the pattern is a simple digraph
        std::map<std::pair<VertexId, VertexId>, EdgeId> least;
        for (const Edge& e : dpp.edges()) {
            auto key = std::make_pair(e.tail, e.head);
            auto it = least.find(key);
            if (it == least.end() || e.id < it->second)
                least[key] = e.id;
        }
        std::vector<EdgeId> drop;
        for (const Edge& e : dpp.edges())
            if (least.at({e.tail, e.head}) != e.id)
                drop.push_back(e.id);
        LiftedGraph lift3 = lift2.delete_edges(drop);
        ImmersionCertificate cert3 = compose(cert1, lift3.extract_certificate());
        auto [compact, mapping] = compact_certificate(cert3);
        (void)mapping;
        if (static_cast<double>(compact.pattern.edge_count()) <
            static_cast<double>(k) * static_cast<double>(k) / 2.0 - kEps)
            throw HypothesisNotMet("dense-dispatch",
                                   "direct branch pattern below k^2/2 edges");
        ValidityReport rep = verify_certificate(compact);
        if (!rep.valid)
            throw InternalError("find_dense_immersion: direct certificate invalid");
        return DenseResult{std::move(compact), "direct"};
    }

    const double log_l = log2c(static_cast<double>(n2) / static_cast<double>(k));
    if (static_cast<double>(k) >= std::pow(log_l, 7.0))
        return finish(immerse_biclique_small(dpp, k, opts), "small");
    return finish(immerse_biclique_large(dpp, k, opts), "large");
}

} // namespace immersion
