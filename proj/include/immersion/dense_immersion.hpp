#pragma once

#include <map>
#include <unordered_set>

#include "immersion/expanders.hpp"

namespace immersion {

/// Source/sink terminals for the biclique construction, pairwise far apart
/// in the underlying graph so their balls stay disjoint.
struct TerminalSystem {
    std::vector<VertexId> sources;
    std::vector<VertexId> sinks;
    std::size_t radius = 0;
    std::map<VertexId, std::vector<VertexId>> balls; // radius-r undirected balls
};

/// Edges unavailable to the next connecting path. `saturated` is
/// recomputed per pair from `used` and the pair's balls.
struct ForbiddenLedger {
    std::unordered_set<EdgeId> used;                     // all previous path edges
    std::map<VertexId, std::vector<EdgeId>> per_source;  // edges of paths starting there
    std::map<VertexId, std::vector<EdgeId>> per_sink;    // edges of paths ending there

    /// Edges incident to a vertex outside `ball_union` whose in- or
    /// out-degree within `used` reaches `degree_threshold`.
    std::vector<EdgeId> saturated(const MultiDigraph& g,
                                  const std::vector<bool>& ball_union,
                                  std::size_t degree_threshold) const;
};

/// Thresholds for the section-4 constructions. Factors scale with k and
/// carry the paper defaults; the *_override knobs replace the paper's
/// polylog formulas with absolute values (0 keeps the formula).
struct DenseOptions {
    bool strict = false;
    ExpansionParams expansion{};

    double beta = 100.0;
    double min_indegree_factor = 100.0;
    double regularize_d_factor = 50.0;
    double max_degree_factor = 100.0;
    double density_factor = 100.0;
    double vplus_out_factor = 3.0;
    double sel_degree_factor = 50.0; // small case: out-degree for block vertices
    double w_size_factor = 20.0;     // small case: |W(u)|

    std::size_t r_override = 0;              // ball radius (paper (loglog n)^6)
    std::size_t path_cap_override = 0;       // path length cap (paper (log n)^4)
    std::size_t sat_degree_override = 0;     // saturation degree (paper k/(loglog n)^3)
    std::size_t small_a_override = 0;        // block width a (paper min{k, l/(log l)^8})
    std::size_t small_path_cap_override = 0; // small-case path cap (paper (log l)^5)

    std::size_t separation_radius(std::size_t n) const;
    std::size_t path_length_cap(std::size_t n) const;
    std::size_t saturation_degree(std::size_t n, std::size_t k) const;
    std::size_t small_block_width(std::size_t n, std::size_t k) const;
    std::size_t small_path_cap(std::size_t n, std::size_t k) const;
};

/// Greedy far-apart terminal selection: sources from the vertices of
/// orientation out-degree >= out_threshold, sinks analogously, excluding
/// radius-2r balls around everything already placed. The orientation keeps
/// the lexicographically-least directed edge per undirected pair.
TerminalSystem separated_terminals(const MultiDigraph& g, std::size_t k, std::size_t r,
                                   std::size_t out_threshold, std::size_t in_threshold);

struct BallGrowthStep {
    std::size_t layer = 0;            // i: the step grows X_i to X_{i+1}
    std::size_t size_before = 0;      // |X_i| including the center
    std::size_t size_after = 0;       // |X_{i+1}| including the center
    std::size_t forbidden_incident = 0;
    double budget = 0.0;              // d(D) * rho(|X_i|) * |X_i|
    bool budget_ok = false;
    double growth_required = 0.0;     // (1 + rho(|X_i|)) * |X_i|
    bool growth_ok = false;
};

struct BallGrowth {
    /// Layer i holds the vertices at distance in [1, i+1] from the center
    /// (the center itself is excluded), in g minus F minus F_prime.
    std::vector<std::vector<VertexId>> layers;
    std::vector<BallGrowthStep> steps; // growth audit, center included in sizes
};

enum class BallDirection { forward, backward };

BallGrowth grow_ball(const MultiDigraph& g, VertexId x, BallDirection direction,
                     const std::vector<EdgeId>& F, const std::vector<EdgeId>& F_prime,
                     std::size_t r, const ExpansionParams& p);

/// K_{k,k} immersion in a large robust expander: per source/sink pair,
/// update the forbidden ledger, grow a forward and a backward ball, and
/// connect them avoiding the ledger. Trails are pairwise edge-disjoint by
/// construction and capped at path_length_cap.
ImmersionCertificate immerse_biclique_large(const MultiDigraph& d_graph, std::size_t k,
                                            const DenseOptions& opts);

/// Small-expander case: block layout with private out/in fans, a round-
/// robin matching schedule, and maximal edge-disjoint path collections per
/// matching. The pattern is the subgraph of K_{2k,2k} of connected pairs.
ImmersionCertificate immerse_biclique_small(const MultiDigraph& d_graph, std::size_t k,
                                            const DenseOptions& opts);

struct DenseResult {
    ImmersionCertificate certificate;
    std::string branch; // "biclique-shortcut" | "direct" | "small" | "large"
};

/// The three-way dispatch: regularize (or win a biclique outright), immerse
/// a directed expander, then hand the expander to the branch the inequality
/// chain selects: return it directly when it is small enough, or run the
/// small/large biclique construction.
DenseResult find_dense_immersion(const MultiDigraph& d_graph, std::size_t k,
                                 const DenseOptions& opts);

} // namespace immersion
