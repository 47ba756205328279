#include "immersion/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"

#include "immersion/cycle_clique.hpp"
#include "immersion/eulerian_tools.hpp"

namespace immersion {

namespace {
constexpr double kEps = 1e-9;
} // namespace

Constants Constants::paper() {
    Constants c;
    c.profile = Profile::paper;
    c.beta = 100.0;
    c.k_scale = 1e11 * std::pow(c.beta, 8.0);
    c.alpha_main = 1e13 * std::pow(c.beta, 8.0);
    c.alpha_local = 1.0 / (2.0 * c.beta * c.beta);
    c.dense.strict = true;
    c.dense.beta = c.beta;
    // section-4 factors keep their paper defaults; overrides stay 0 so the
    // polylog formulas apply
    c.completion_pack_target = 0;
    return c;
}

Constants Constants::desk() {
    Constants c;
    c.profile = Profile::desk;
    c.beta = 4.0;
    c.k_scale = 1.0;
    c.alpha_main = 2.0; // = min_indegree_factor * k_scale
    c.alpha_local = 0.0;
    c.dense.strict = false;
    c.dense.beta = c.beta;
    c.dense.min_indegree_factor = 2.0;
    c.dense.regularize_d_factor = 1.0;
    c.dense.max_degree_factor = 100.0;
    c.dense.density_factor = 1.0;
    c.dense.vplus_out_factor = 1.0;
    c.dense.sel_degree_factor = 1.0;
    c.dense.w_size_factor = 1.0;
    c.dense.r_override = 2;
    c.dense.path_cap_override = 100000;
    c.dense.sat_degree_override = 4;
    c.dense.small_a_override = 1;
    c.dense.small_path_cap_override = 100000;
    c.completion_pack_target = 0;
    return c;
}

std::string report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["success"] = report.success;
    j["failure_stage"] = report.failure_stage;
    j["summary"] = report.summary;
    nlohmann::json stages = nlohmann::json::array();
    for (const StageOutcome& s : report.stages)
        stages.push_back({{"name", s.name},
                          {"input_size", s.input_size},
                          {"outcome", s.outcome},
                          {"millis", s.millis}});
    j["stages"] = std::move(stages);
    return j.dump(2);
}

namespace {

struct StageTimer {
    RunReport& report;
    std::string name;
    std::size_t input_size;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void done(const std::string& outcome) const {
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        report.stages.push_back({name, input_size, outcome, ms});
    }
};

ImmersionCertificate k1_certificate(const MultiDigraph& g) {
    ImmersionCertificate cert;
    cert.host = g;
    cert.pattern = MultiDigraph(1, {});
    cert.vertex_map[0] = 0;
    return cert;
}

} // namespace

PipelineResult immerse_complete(const MultiDigraph& d_graph, std::size_t t,
                                const Constants& c) {
    PipelineResult res;
    if (!d_graph.is_simple() || !is_eulerian(d_graph))
        throw PreconditionError("immerse_complete: input must be simple and Eulerian");
    for (VertexId v = 0; v < d_graph.vertex_count(); ++v) {
        if (static_cast<double>(d_graph.in_degree(v)) + kEps <
            c.alpha_main * static_cast<double>(t)) {
            res.report.stages.push_back({"dense-immersion", d_graph.vertex_count(),
                                         "HypothesisNotMet: minimum in-degree below alpha*t",
                                         0.0});
            res.report.failure_stage = "dense-immersion";
            return res;
        }
    }

    if (t <= 1) {
        if (d_graph.vertex_count() == 0)
            throw PreconditionError("immerse_complete: empty graph");
        res.certificate = k1_certificate(d_graph);
        res.report.success = true;
        res.report.summary = "K_1 certificate";
        res.report.stages.push_back({"trivial", d_graph.vertex_count(), "ok", 0.0});
        return res;
    }

    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(c.k_scale * static_cast<double>(t) - kEps)));
    DenseOptions dopts = c.dense;
    dopts.expansion.t = static_cast<double>(k);

    DenseResult dense;
    {
        StageTimer st{res.report, "dense-immersion", d_graph.vertex_count()};
        try {
            dense = find_dense_immersion(d_graph, k, dopts);
        } catch (const HypothesisNotMet& e) {
            st.done(std::string("HypothesisNotMet: ") + e.what());
            res.report.failure_stage = "dense-immersion";
            return res;
        }
        st.done("ok (" + dense.branch + ")");
    }

    SimpleGraph g2;
    {
        StageTimer st{res.report, "min-degree-subgraph",
                      dense.certificate.pattern.vertex_count()};
        SimpleGraph g1 = underlying_simple(dense.certificate.pattern);
        g2 = min_degree_subgraph(g1, 0.5);
        st.done("ok");
    }

    ImmersionCertificate oriented;
    {
        StageTimer st{res.report, "orientation", g2.edge_count()};
        std::vector<EdgeId> chosen;
        for (auto [u, v] : g2.edges()) {
            std::vector<EdgeId> cands = dense.certificate.pattern.edges_between(u, v);
            std::vector<EdgeId> back = dense.certificate.pattern.edges_between(v, u);
            cands.insert(cands.end(), back.begin(), back.end());
            chosen.push_back(*std::min_element(cands.begin(), cands.end()));
        }
        oriented = restrict_pattern(dense.certificate, chosen);
        st.done("ok");
    }

    LiftedGraph repaired(d_graph);
    {
        StageTimer st{res.report, "eulerianize", oriented.pattern.edge_count()};
        LiftedGraph sub = LiftedGraph::from_certificate(oriented);
        repaired = eulerianize_immersion(d_graph, sub);
        st.done("ok");
    }

    {
        const MultiDigraph& cur = repaired.current();
        std::vector<VertexId> active = cur.active_vertices();
        StageTimer st{res.report, "dense-to-complete", active.size()};
        double alpha = c.alpha_local;
        if (alpha <= 0.0) {
            SimpleGraph und = underlying_simple(cur);
            std::size_t dmin = active.empty() ? 0 : und.degree(active.front());
            for (VertexId v : active)
                dmin = std::min(dmin, und.degree(v));
            alpha = active.empty()
                        ? 0.0
                        : static_cast<double>(dmin) / static_cast<double>(active.size());
        }
        DenseCompletionOptions dco;
        dco.strict = c.profile == Constants::Profile::paper;
        dco.target_s = t;
        dco.pack_target = c.completion_pack_target;
        try {
            ImmersionCertificate final_cert = dense_to_complete(repaired, alpha, dco);
            ValidityReport rep = verify_certificate(final_cert);
            if (!rep.valid)
                throw InternalError("immerse_complete: final certificate invalid");
            if (final_cert.pattern.vertex_count() < t)
                throw InternalError("immerse_complete: pattern smaller than requested");
            st.done("ok");
            res.report.success = true;
            res.report.summary = "K_" + std::to_string(final_cert.pattern.vertex_count()) +
                                 " certificate, " +
                                 std::to_string(final_cert.trail_map.size()) + " trails";
            res.certificate = std::move(final_cert);
        } catch (const HypothesisNotMet& e) {
            st.done(std::string("HypothesisNotMet: ") + e.what());
            res.report.failure_stage = "dense-to-complete (" + e.stage + ")";
        }
    }
    return res;
}

SimpleGraph min_degree_subgraph(const SimpleGraph& g, double c) {
    if (g.edge_count() == 0)
        throw InputError("min_degree_subgraph: graph has no edges");
    const double threshold = c * average_degree(g);
    std::vector<std::size_t> deg(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        deg[v] = g.degree(v);
    std::vector<bool> removed(g.vertex_count(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            if (removed[v])
                continue;
            if (static_cast<double>(deg[v]) + kEps < threshold) {
                removed[v] = true;
                changed = true;
                for (VertexId w : g.neighbours(v))
                    if (!removed[w])
                        --deg[w];
            }
        }
    }
    std::vector<VertexId> keep;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (!removed[v])
            keep.push_back(v);
    if (keep.empty())
        throw InputError("min_degree_subgraph: peeling emptied the graph (c > 1/2?)");
    return g.induced(keep);
}

MultiDigraph gen_random_eulerian(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n < 2)
        throw InputError("gen_random_eulerian: need n >= 2");
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    std::vector<VertexId> order(n);
    for (std::size_t round = 0; round < d; ++round) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < n; ++i)
            edges.push_back({edges.size(), order[i], order[(i + 1) % n]});
    }
    return MultiDigraph(n, std::move(edges));
}

MultiDigraph gen_complete_digraph(std::size_t k) {
    std::vector<Edge> edges;
    for (VertexId i = 0; i < k; ++i)
        for (VertexId j = 0; j < k; ++j)
            if (i != j)
                edges.push_back({edges.size(), i, j});
    return MultiDigraph(k, std::move(edges));
}

MultiDigraph gen_biclique(std::size_t k) {
    std::vector<Edge> edges;
    for (VertexId i = 0; i < k; ++i)
        for (VertexId j = 0; j < k; ++j)
            edges.push_back({edges.size(), i, k + j});
    return MultiDigraph(2 * k, std::move(edges));
}

MultiDigraph gen_circulant(std::size_t n, const std::vector<std::size_t>& offsets) {
    if (n == 0)
        throw InputError("gen_circulant: empty vertex set");
    std::vector<Edge> edges;
    for (std::size_t o : offsets) {
        if (o % n == 0)
            throw InputError("gen_circulant: offset would create loops");
        for (VertexId v = 0; v < n; ++v)
            edges.push_back({edges.size(), v, (v + o) % n});
    }
    return MultiDigraph(n, std::move(edges));
}

MultiDigraph generate_instance(const InstanceSpec& spec) {
    if (spec.kind == "random_eulerian")
        return gen_random_eulerian(spec.n, spec.d, spec.seed);
    if (spec.kind == "complete_digraph")
        return gen_complete_digraph(spec.k);
    if (spec.kind == "biclique")
        return gen_biclique(spec.k);
    if (spec.kind == "circulant")
        return gen_circulant(spec.n, spec.offsets);
    throw InputError("generate_instance: unknown kind '" + spec.kind + "'");
}

} // namespace immersion
