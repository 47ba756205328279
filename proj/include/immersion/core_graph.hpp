#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "immersion/errors.hpp"

namespace immersion {

using VertexId = std::size_t;
using EdgeId = std::size_t;

struct Edge {
    EdgeId id;
    VertexId tail;
    VertexId head;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed multigraph with edge identities. Parallel edges are distinct
/// edges with distinct ids; multiplicity of a pair is the number of
/// parallel ids. Values are immutable once constructed; derived graphs
/// are built as new values (LiftedGraph drives the only mutation path).
class MultiDigraph {
  public:
    MultiDigraph() = default;
    MultiDigraph(std::size_t n, std::vector<Edge> edges, bool loops_allowed = false);

    std::size_t vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    bool loops_allowed() const { return loops_allowed_; }

    /// All edges, sorted by id.
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_edge(EdgeId id) const;
    const Edge& edge(EdgeId id) const;

    /// Edge ids leaving/entering v, ascending.
    std::span<const EdgeId> out_edges(VertexId v) const;
    std::span<const EdgeId> in_edges(VertexId v) const;

    std::size_t out_degree(VertexId v) const { return out_edges(v).size(); }
    std::size_t in_degree(VertexId v) const { return in_edges(v).size(); }

    /// Distinct out-/in-neighbours, ascending.
    std::vector<VertexId> out_neighbours(VertexId v) const;
    std::vector<VertexId> in_neighbours(VertexId v) const;

    /// Number of parallel copies of tail->head.
    std::size_t multiplicity(VertexId tail, VertexId head) const;

    /// Edge ids realizing tail->head, ascending.
    std::vector<EdgeId> edges_between(VertexId tail, VertexId head) const;

    /// No pair has multiplicity > 1 (antiparallel pairs are fine).
    bool is_simple() const;

    /// Count of vertices with at least one incident edge.
    std::size_t active_vertex_count() const;
    std::vector<VertexId> active_vertices() const;

    friend bool operator==(const MultiDigraph& a, const MultiDigraph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

  private:
    void check_vertex(VertexId v) const;
    std::size_t edge_pos(EdgeId id) const; // npos when absent

    // Mutators used by LiftedGraph; keep edges_ sorted by id.
    void insert_edge(const Edge& e);
    void erase_edge(EdgeId id);
    friend class LiftedGraph;

    std::size_t n_ = 0;
    bool loops_allowed_ = false;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<std::vector<EdgeId>> in_;
};

/// Undirected simple graph. Edges are stored as normalized (min,max)
/// pairs, sorted; the position of a pair in edges() doubles as its
/// undirected edge id.
class SimpleGraph {
  public:
    SimpleGraph() = default;
    /// Deduplicates pairs; throws InputError on loops or bad endpoints.
    SimpleGraph(std::size_t n, std::vector<std::pair<VertexId, VertexId>> edges);

    std::size_t vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::pair<VertexId, VertexId>>& edges() const { return edges_; }

    std::span<const VertexId> neighbours(VertexId v) const;
    std::size_t degree(VertexId v) const { return neighbours(v).size(); }
    bool has_edge(VertexId u, VertexId v) const;

    /// Index of {u,v} in edges(); throws InputError when absent.
    std::size_t edge_index(VertexId u, VertexId v) const;

    std::size_t active_vertex_count() const;

    /// Induced subgraph on `keep` (vertex ids preserved, edges filtered).
    SimpleGraph induced(const std::vector<VertexId>& keep) const;

    friend bool operator==(const SimpleGraph& a, const SimpleGraph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

  private:
    std::size_t n_ = 0;
    std::vector<std::pair<VertexId, VertexId>> edges_;
    std::vector<std::vector<VertexId>> adj_;
};

struct DegreeProfile {
    std::size_t d_out = 0;      // edge identities leaving v
    std::size_t d_in = 0;       // edge identities entering v
    std::size_t simple_out = 0; // |N+(v)|
    std::size_t simple_in = 0;  // |N-(v)|

    friend bool operator==(const DegreeProfile&, const DegreeProfile&) = default;
};

DegreeProfile degree_profile(const MultiDigraph& g, VertexId v);

/// Per-vertex in/out balance; connectivity is not required.
bool is_eulerian(const MultiDigraph& g);

/// Drop directions and multiplicities; antiparallel pairs collapse.
SimpleGraph underlying_simple(const MultiDigraph& g);

/// e(D)/|D| for digraphs (multiplicities counted, directions ignored).
double average_degree(const MultiDigraph& g);
/// 2e(G)/|G| for undirected graphs.
double average_degree(const SimpleGraph& g);

/// Restriction of g to `keep`, relabeled 0..keep.size()-1 in the given
/// order; edge ids are preserved so trails keep their meaning.
MultiDigraph restrict_to(const MultiDigraph& g, const std::vector<VertexId>& keep);

} // namespace immersion
