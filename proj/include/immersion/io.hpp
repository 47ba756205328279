#pragma once

#include <iosfwd>
#include <string>

#include "immersion/core_graph.hpp"
#include "immersion/immersion_calc.hpp"

namespace immersion {

/// Graph text format: first line "n m", then m lines "tail head"
/// (0-based); parallel edges repeated. Edge ids are assigned in file
/// order, so write(read(x)) is byte-identical for well-formed input.
MultiDigraph read_graph(std::istream& in);
MultiDigraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const MultiDigraph& g);
void write_graph_file(const std::string& path, const MultiDigraph& g);

/// Certificate files are JSON: the pattern graph, the vertex map as
/// pairs, and each pattern edge's trail as a sequence of host edge ids.
/// The host graph travels separately (its own graph file).
std::string certificate_to_json(const ImmersionCertificate& cert);
ImmersionCertificate certificate_from_json(const std::string& text,
                                           const MultiDigraph& host);
void write_certificate_file(const std::string& path, const ImmersionCertificate& cert);
ImmersionCertificate read_certificate_file(const std::string& path,
                                           const MultiDigraph& host);

} // namespace immersion
