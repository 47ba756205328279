#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "immersion/core_graph.hpp"
#include "immersion/immersion_calc.hpp"
#include "immersion/pipeline.hpp"

namespace immersion::testing {

inline MultiDigraph make_graph(std::size_t n,
                               std::vector<std::pair<VertexId, VertexId>> arcs,
                               bool loops_allowed = false) {
    std::vector<Edge> edges;
    for (auto [t, h] : arcs)
        edges.push_back({edges.size(), t, h});
    return MultiDigraph(n, std::move(edges), loops_allowed);
}

inline MultiDigraph directed_triangle() { return make_graph(3, {{0, 1}, {1, 2}, {2, 0}}); }

inline MultiDigraph directed_cycle(std::size_t n) {
    std::vector<std::pair<VertexId, VertexId>> arcs;
    for (VertexId v = 0; v < n; ++v)
        arcs.emplace_back(v, (v + 1) % n);
    return make_graph(n, std::move(arcs));
}

inline MultiDigraph bidirected_cycle(std::size_t n) {
    std::vector<std::pair<VertexId, VertexId>> arcs;
    for (VertexId v = 0; v < n; ++v) {
        arcs.emplace_back(v, (v + 1) % n);
        arcs.emplace_back((v + 1) % n, v);
    }
    return make_graph(n, std::move(arcs));
}

inline SimpleGraph complete_graph(std::size_t n) {
    std::vector<std::pair<VertexId, VertexId>> es;
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j)
            es.emplace_back(i, j);
    return SimpleGraph(n, std::move(es));
}

/// Independent girth oracle: Floyd-Warshall min-plus distances, then the
/// shortest closed walk min over d(v,u)+1 for edges u->v. Exact for
/// vertex-simple shortest cycles.
inline std::size_t girth_oracle(const MultiDigraph& g) {
    const std::size_t n = g.vertex_count();
    const std::size_t inf = 1u << 20;
    std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
    for (const Edge& e : g.edges())
        if (e.tail != e.head)
            d[e.tail][e.head] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    std::size_t best = inf;
    for (std::size_t v = 0; v < n; ++v)
        best = std::min(best, d[v][v]);
    return best; // inf when acyclic
}

constexpr std::size_t kNoCycle = 1u << 20;

/// Random simple Eulerian digraph: a seeded circulant with distinct
/// offsets. in-degree = out-degree = |offsets|.
inline MultiDigraph random_circulant(std::size_t n, std::size_t degree,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> offsets(n - 1);
    for (std::size_t i = 0; i < n - 1; ++i)
        offsets[i] = i + 1;
    std::shuffle(offsets.begin(), offsets.end(), rng);
    offsets.resize(std::min(degree, offsets.size()));
    return gen_circulant(n, offsets);
}

} // namespace immersion::testing
