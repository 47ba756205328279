#pragma once

#include <variant>

#include "immersion/immersion_calc.hpp"

namespace immersion {

/// Sum over vertices of |d+(v) - d-(v)|; zero exactly for Eulerian graphs.
struct ImbalanceMeasure {
    std::size_t value = 0;

    friend bool operator==(const ImbalanceMeasure&, const ImbalanceMeasure&) = default;
};

ImbalanceMeasure imbalance(const MultiDigraph& g);

/// Repair an immersed sub-digraph into an Eulerian super-multi-digraph.
///
/// host must be Eulerian and sub a lifted view of it. The result's
/// current graph is Eulerian, contains every directed pair of
/// sub.current() (with at least its multiplicity), and its certificate
/// verifies against host. Each repair round joins a vertex with in-surplus
/// to one with out-surplus through host edges unused by any provenance
/// trail, and strictly decreases the imbalance sum; the number of rounds
/// is bounded by the initial imbalance.
LiftedGraph eulerianize_immersion(const MultiDigraph& host, const LiftedGraph& sub);

/// Either a 2d-regular reduction or a biclique found on the way.
using RegularOrBiclique = std::variant<LiftedGraph, ImmersionCertificate>;

/// Given a simple Eulerian digraph with minimum in-degree >= 2d, split
/// edges off over-degree vertices until the current graph is simple,
/// Eulerian and exactly 2d-regular, or exhibit a one-directional
/// K_{d,d} certificate when no split is available. Every intermediate
/// step is re-checked for simplicity, Eulerianness and min in-degree.
RegularOrBiclique regularize_or_biclique(const MultiDigraph& d_graph, std::size_t d);

} // namespace immersion
