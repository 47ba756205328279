#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "immersion/core_graph.hpp"

namespace immersion {

/// Directed walk without repeated edge identities. Vertices may repeat.
/// An empty trail (start == end) is the degenerate trivial connection;
/// certificates never contain one.
struct Trail {
    std::vector<EdgeId> edge_ids;
    VertexId start = 0;
    VertexId end = 0;

    std::size_t length() const { return edge_ids.size(); }
    bool closed() const { return start == end; }

    friend bool operator==(const Trail&, const Trail&) = default;
};

/// Trail whose edges live in g: consecutive head-to-tail, no repeated id,
/// endpoints consistent with start/end.
bool is_valid_trail(const MultiDigraph& g, const Trail& t);

/// Vertex sequence visited by t (length()+1 entries, or just {start} when empty).
std::vector<VertexId> trail_vertices(const MultiDigraph& g, const Trail& t);

/// a.end must equal b.start.
Trail concat(const Trail& a, const Trail& b);

/// Excise closed subwalks at repeated vertices (first repeat first) until
/// the walk is vertex-simple apart from a possible closed start == end.
Trail reduce_to_simple(const MultiDigraph& g, const Trail& t);

struct ValidityReport {
    bool valid = true;
    std::vector<std::string> violations;
    std::vector<std::string> warnings; // e.g. vertex repetitions inside trails
};

/// Witness that `host` immerses `pattern`: an injective vertex map plus
/// pairwise edge-identity-disjoint trails, one per pattern edge.
struct ImmersionCertificate {
    MultiDigraph host;
    MultiDigraph pattern;
    std::map<VertexId, VertexId> vertex_map; // pattern vertex -> host vertex
    std::map<EdgeId, Trail> trail_map;       // pattern edge id -> trail in host
};

/// Pure check of the three certificate invariants. Invalid certificates
/// yield reports, never exceptions.
ValidityReport verify_certificate(const ImmersionCertificate& cert);

/// Pattern = host with single-edge trails and the identity vertex map.
ImmersionCertificate identity_certificate(const MultiDigraph& g);

/// Inner pattern relabeled so certificate of K in H composed with H in G
/// yields K in G. Requires outer.pattern == inner.host structurally.
ImmersionCertificate compose(const ImmersionCertificate& outer,
                             const ImmersionCertificate& inner);

/// Keep only the given pattern edges (vertex set unchanged).
ImmersionCertificate restrict_pattern(const ImmersionCertificate& cert,
                                      const std::vector<EdgeId>& pattern_edges);

/// Relabel the pattern onto its non-isolated vertices (ascending order);
/// edge ids are preserved. Returns the certificate and old-vertex-of-new.
std::pair<ImmersionCertificate, std::vector<VertexId>>
compact_certificate(const ImmersionCertificate& cert);

/// Working multi-digraph whose every edge carries provenance: a trail in
/// a fixed root host. Closed under split and delete, so the current graph
/// is a certified immersion of the root by construction.
class LiftedGraph {
  public:
    explicit LiftedGraph(MultiDigraph root);

    /// Root = cert.host, current = cert.pattern relabeled onto host
    /// vertices through cert.vertex_map, provenance = cert.trail_map.
    /// Requires a valid certificate.
    static LiftedGraph from_certificate(const ImmersionCertificate& cert);

    const MultiDigraph& root() const { return root_; }
    const MultiDigraph& current() const { return current_; }
    const Trail& provenance(EdgeId current_edge) const;
    const std::map<EdgeId, Trail>& provenance_map() const { return provenance_; }
    EdgeId next_edge_id() const { return next_id_; }

    /// Replace consecutive current edges e1 (x->y), e2 (y->z) by a fresh
    /// edge x->z whose provenance is the concatenation of theirs.
    LiftedGraph split(EdgeId e1, EdgeId e2) const;

    LiftedGraph delete_edges(std::span<const EdgeId> ids) const;

    ImmersionCertificate extract_certificate() const;

  private:
    LiftedGraph() = default;
    void split_in_place(EdgeId e1, EdgeId e2);
    void delete_in_place(std::span<const EdgeId> ids);
    void add_current_edge(VertexId tail, VertexId head, Trail provenance);
    void validate() const;

    friend LiftedGraph eulerianize_immersion(const MultiDigraph&, const LiftedGraph&);
    friend class LiftedGraphTestAccess;

    MultiDigraph root_;
    MultiDigraph current_;
    std::map<EdgeId, Trail> provenance_;
    EdgeId next_id_ = 0;
};

} // namespace immersion
