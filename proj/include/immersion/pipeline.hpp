#pragma once

#include <cstdint>
#include <optional>

#include "immersion/dense_immersion.hpp"

namespace immersion {

/// Every named constant with its paper value, plus a desk profile whose
/// overrides make the construction exercisable on small graphs. The paper
/// profile reproduces the text's literals and will report HypothesisNotMet
/// on any desk-scale input; it never misrepresents the theorem's constants.
struct Constants {
    enum class Profile { paper, desk };
    Profile profile = Profile::desk;

    double beta = 100.0;       // dense-immersion theorem constant
    double k_scale = 1.0;      // k = k_scale * t
    double alpha_main = 2.0;   // headline min in-degree factor (alpha * t)
    double alpha_local = 0.0;  // completion density; 0 = measured from the graph

    DenseOptions dense{};
    std::size_t completion_pack_target = 0; // 0 = pack as many cycles as possible

    static Constants paper();
    static Constants desk();
};

struct StageOutcome {
    std::string name;
    std::size_t input_size = 0;
    std::string outcome; // "ok" or a failure description
    double millis = 0.0;
};

struct RunReport {
    std::vector<StageOutcome> stages;
    bool success = false;
    std::string failure_stage;
    std::string summary; // e.g. "K_3 certificate, 6 trails"
};

std::string report_to_json(const RunReport& report);

struct PipelineResult {
    std::optional<ImmersionCertificate> certificate; // set exactly on success
    RunReport report;
};

/// Complete-digraph immersion pipeline: dense immersion, min-degree
/// subgraph of its underlying graph, orientation, Eulerian repair, then
/// the cycle-packing completion. The final certificate's pattern is a
/// complete digraph on at least t vertices and verifies against the input.
PipelineResult immerse_complete(const MultiDigraph& d_graph, std::size_t t,
                                const Constants& c);

/// Peel vertices of degree < c * d(g) (threshold fixed at the original
/// average degree) until none remain. Nonempty whenever c <= 1/2.
SimpleGraph min_degree_subgraph(const SimpleGraph& g, double c);

MultiDigraph gen_random_eulerian(std::size_t n, std::size_t d, std::uint64_t seed);
MultiDigraph gen_complete_digraph(std::size_t k);
MultiDigraph gen_biclique(std::size_t k);
MultiDigraph gen_circulant(std::size_t n, const std::vector<std::size_t>& offsets);

struct InstanceSpec {
    std::string kind; // random_eulerian | complete_digraph | biclique | circulant
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> offsets;
};

MultiDigraph generate_instance(const InstanceSpec& spec);

} // namespace immersion
