#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "immersion/immersion_calc.hpp"

namespace immersion {

/// Every constant of the sublinear expansion machinery, overridable.
/// Logarithms are base 2 throughout.
struct ExpansionConstants {
    double rho_denom = 256.0;
    double edge_factor_undirected = 32.0;
    double edge_factor_directed = 4.0;
    double vertex_factor_undirected = 2.0;
    double vertex_factor_directed = 1.0;
    double connector_len = 1600.0;
    double connector_half = 800.0;
};

struct ExpansionParams {
    double t = 1.0;
    ExpansionConstants constants{};

    /// Exhaustive subset enumeration is allowed up to this many vertices.
    std::size_t exhaustive_cap = 16;

    /// The directed robust definition as written has no |X| <= n/2 cap,
    /// but without one every graph fails (X = V has empty external
    /// neighbourhood), so the cap is applied unless this is cleared.
    bool cap_robust_directed = true;

    /// Randomized cut probing for graphs above the exhaustive cap.
    std::uint64_t probe_seed = 1;
    std::size_t probe_trials = 64;
};

/// Expansion rate: 0 below t, 1/(rho_denom * log2(4x/t)^2) for x >= t.
double rho(const ExpansionParams& p, double x);

/// min{1, 1/log2(2x/t)}, capped at 1 for x <= t.
double gamma_factor(const ExpansionParams& p, double x);

/// d(g) * (1 + gamma(|g|)).
double phi_potential(const ExpansionParams& p, const SimpleGraph& g);

enum class ExpansionKind {
    edge_undirected,
    robust_vertex_undirected,
    edge_directed,
    robust_vertex_directed,
};

struct CheckMode {
    enum class Kind { exhaustive, sampled } kind = Kind::exhaustive;
    std::uint64_t seed = 0;
    std::size_t trials = 200;

    static CheckMode exhaustive() { return {}; }
    static CheckMode sampled(std::uint64_t seed, std::size_t trials) {
        return {Kind::sampled, seed, trials};
    }
};

/// A violation found by a check; re-checkable by direct recomputation.
/// For undirected kinds `forbidden` holds indices into g.edges().
struct ExpansionWitness {
    std::vector<VertexId> x;
    std::vector<EdgeId> forbidden;
    double measured = 0.0;
    double required = 0.0;
    std::string quantity;
};

struct ExpansionReport {
    bool holds = true;
    std::optional<ExpansionWitness> witness;
    std::string mode;
};

/// Undirected kinds only.
ExpansionReport check_expansion(const SimpleGraph& g, const ExpansionParams& p,
                                ExpansionKind kind, const CheckMode& mode);
/// Directed kinds only.
ExpansionReport check_expansion(const MultiDigraph& g, const ExpansionParams& p,
                                ExpansionKind kind, const CheckMode& mode);

struct ExtractedExpander {
    SimpleGraph graph;              // compacted onto `vertices`
    std::vector<VertexId> vertices; // original labels, ascending
    std::size_t ascent_moves = 0;
};

/// Certified phi-ascent: repeatedly delete a vertex of degree < d(H)/2 or
/// restrict to the better side of a violating cut, accepting a move only
/// when phi strictly increases. The result has average degree >= d(g)/2
/// and minimum degree >= d(g)/4; under the exhaustive cap it additionally
/// passes the exhaustive edge-expansion check.
ExtractedExpander extract_expander(const SimpleGraph& g, const ExpansionParams& p);

/// Directed expander immersion for a d-in/d-out-regular simple Eulerian
/// digraph: orient the extracted undirected expander inside the input and
/// repair it to an Eulerian multi-digraph. The four output properties
/// (underlying average degree >= d/2, min in/out degree >= d/8 on active
/// vertices, directed edge-expansion, robust vertex-expansion) are
/// re-verified, exhaustively under the cap and sampled above it.
/// With `require_oriented`, antiparallel pairs in the input are rejected.
LiftedGraph directed_expander_immersion(const MultiDigraph& d_graph, std::size_t d,
                                        const ExpansionParams& p,
                                        bool require_oriented = true);

/// Shortest-ish trail from X to Y avoiding the edge set F, found by
/// growing a forward ball from X and a backward ball from Y until they
/// meet. Length-0 connections (X meets Y) are only returned when
/// allow_trivial is set; otherwise a genuine edge sequence is required.
Trail connect_avoiding(const MultiDigraph& d_graph, const std::vector<VertexId>& X,
                       const std::vector<VertexId>& Y, const std::vector<EdgeId>& F,
                       const ExpansionParams& p, bool allow_trivial = false);

} // namespace immersion
