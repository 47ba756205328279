#pragma once

#include <map>
#include <optional>

#include "immersion/immersion_calc.hpp"

namespace immersion {

/// Simple digraph (antiparallel pairs allowed) with vertex weights.
struct WeightedDigraph {
    MultiDigraph base;
    std::vector<double> weights; // indexed by vertex

    double total_weight() const;
};

/// Pairwise edge-disjoint closed trails; chosen_simple[i], when set, is an
/// edge of cycles[i] that is simple (multiplicity 1) in the ambient graph.
struct CyclePack {
    std::vector<Trail> cycles;
    std::vector<std::optional<EdgeId>> chosen_simple;
};

/// Partition of the vertex set by reachability to the out-degree-0
/// vertices of the double-edge digraph, in construction order.
struct ReachPartition {
    std::vector<VertexId> sinks;                   // ascending
    std::map<VertexId, std::vector<VertexId>> blocks; // sink -> U(sink)
};

/// x->y present whenever g has at least two parallel edges x->y.
/// Edge ids are indices into the lexicographically sorted pair list.
MultiDigraph double_edge_digraph(const MultiDigraph& g);

/// Requires the double-edge digraph to be acyclic.
ReachPartition reach_partition(const MultiDigraph& double_digraph);

/// Shortest directed cycle in a weighted digraph whose out-neighbourhoods
/// all carry at least an alpha fraction of the total weight; its length is
/// at most ceil(4/alpha). BFS shortest-cycle search with that cutoff; the
/// hypothesis guarantees the search succeeds.
Trail short_cycle_weighted(const WeightedDigraph& wd, double alpha);

/// Diagnostic for the reachability-weight mechanics behind the cycle
/// bound: profile[i] = total weight within out-distance <= i of u.
std::vector<double> weighted_reach_profile(const WeightedDigraph& wd, VertexId u,
                                           std::size_t depth);

/// Directed cycle with at most ceil(4/alpha) edges that are simple in g,
/// for loopless g with minimum out-degree >= alpha*|g| (multiplicities
/// counted). Returns the cycle and its simple-edge count.
std::pair<Trail, std::size_t> few_simple_edge_cycle(const MultiDigraph& g, double alpha);

struct PackOptions {
    bool strict = false;      // enforce degree hypotheses and length caps
    bool best_effort = false; // stop quietly when no further cycle is found
    /// Vertex count used for the alpha*n thresholds; 0 means vertex_count().
    std::size_t n_override = 0;
};

/// ell pairwise edge-disjoint short cycles, built iteratively: vertices on
/// too many previous cycles and vertices feeding them are set aside, and a
/// cycle with few simple edges is found in the rest.
CyclePack pack_cycles(const MultiDigraph& g, std::size_t ell, double alpha,
                      const PackOptions& opts = {});

/// Split consecutive multiple pairs until no vertex is incident to both a
/// multiple in-edge and a multiple out-edge. The pair a=>b=>a is resolved
/// by deleting one copy of each instead (a split would make a loop).
LiftedGraph normalize_multiedges(const LiftedGraph& lg);

/// Undirected immersion witness: host edges are referenced by their index
/// in host.edges(); pattern is the complete graph on `order` vertices.
struct UndirectedCertificate {
    SimpleGraph host;
    std::size_t order = 0;
    std::vector<VertexId> vertex_map;                                  // size = order
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> trails;
};

ValidityReport verify_undirected_certificate(const UndirectedCertificate& cert);

/// Best-effort stand-in for the minimum-degree clique immersion theorem:
/// exact backtracking search for host graphs with at most 8 vertices,
/// greedy shortest-path routing above. Reports the largest order found;
/// `t` is the caller's target and does not limit the search upward.
UndirectedCertificate undirected_clique_immersion(const SimpleGraph& g, std::size_t t);

/// Turn edge-disjoint cycles plus an undirected clique immersion over
/// their chosen simple edges into a complete-digraph immersion: walking an
/// undirected trail, each cycle contributes its forward arc to D_xy and
/// its complementary arc, in reverse order, to D_yx.
/// `cycle_of_host_edge[i]` names the pack cycle whose chosen edge realizes
/// und_cert.host.edges()[i]; distinct host edges must name distinct cycles.
ImmersionCertificate lift_directed_clique(const LiftedGraph& host,
                                          const CyclePack& pack,
                                          const UndirectedCertificate& und_cert,
                                          const std::vector<std::size_t>& cycle_of_host_edge);

struct DenseCompletionOptions {
    bool strict = false;
    /// Desk profile: required clique order (refuse below it) and the cycle
    /// count to pack (0 = pack as many as possible).
    std::size_t target_s = 2;
    std::size_t pack_target = 0;
};

/// Full dense-to-complete pipeline: normalize, pack cycles, build the
/// auxiliary graph of chosen simple edges, peel it to half its average
/// degree, immerse an undirected clique there and lift it. In strict mode
/// the paper formulas set the cycle count and clique order, and the
/// operation refuses to emit vacuous certificates (guards ell >= 1, s >= 2).
ImmersionCertificate dense_to_complete(const LiftedGraph& lg, double alpha,
                                       const DenseCompletionOptions& opts);

} // namespace immersion
