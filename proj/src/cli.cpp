#include "immersion/cli.hpp"

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "immersion/cycle_clique.hpp"
#include "immersion/eulerian_tools.hpp"
#include "immersion/io.hpp"
#include "immersion/pipeline.hpp"

namespace immersion {

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kHypothesis = 2;
constexpr int kUsage = 3;

Constants profile_constants(const std::string& name) {
    if (name == "paper")
        return Constants::paper();
    if (name == "desk")
        return Constants::desk();
    throw InputError("unknown profile '" + name + "' (expected paper or desk)");
}

nlohmann::json witness_json(const ExpansionReport& rep) {
    nlohmann::json j;
    j["holds"] = rep.holds;
    j["mode"] = rep.mode;
    if (rep.witness) {
        j["witness"] = {{"x", rep.witness->x},
                        {"forbidden", rep.witness->forbidden},
                        {"measured", rep.witness->measured},
                        {"required", rep.witness->required},
                        {"quantity", rep.witness->quantity}};
    }
    return j;
}

nlohmann::json pack_json(const CyclePack& pack) {
    nlohmann::json cycles = nlohmann::json::array();
    for (std::size_t i = 0; i < pack.cycles.size(); ++i) {
        nlohmann::json c;
        c["edges"] = pack.cycles[i].edge_ids;
        c["start"] = pack.cycles[i].start;
        if (pack.chosen_simple[i])
            c["simple_edge"] = *pack.chosen_simple[i];
        cycles.push_back(std::move(c));
    }
    return cycles;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"constructive immersion certificates for Eulerian digraphs"};
    app.require_subcommand(0, 1);

    struct {
        std::string kind, output;
        std::size_t n = 0, d = 0, k = 0;
        std::uint64_t seed = 0;
        std::vector<std::size_t> offsets;
    } gen_opts;
    CLI::App* gen = app.add_subcommand("gen", "generate an instance graph");
    gen->add_option("--kind", gen_opts.kind,
                    "random_eulerian | complete_digraph | biclique | circulant")
        ->required();
    gen->add_option("--n", gen_opts.n, "vertex count");
    gen->add_option("--d", gen_opts.d, "regular degree");
    gen->add_option("--k", gen_opts.k, "half-order / clique order");
    gen->add_option("--seed", gen_opts.seed, "generator seed");
    gen->add_option("--offsets", gen_opts.offsets, "circulant offsets")->delimiter(',');
    gen->add_option("--output,-o", gen_opts.output, "output file (stdout when omitted)");

    struct {
        std::string graph, profile = "desk", output, report;
        std::size_t t = 0;
    } im_opts;
    CLI::App* im = app.add_subcommand("immerse", "run the full pipeline");
    im->add_option("graph", im_opts.graph, "input graph file")->required();
    im->add_option("--order,-t", im_opts.t, "target complete digraph order")->required();
    im->add_option("--profile", im_opts.profile, "paper | desk");
    im->add_option("--output,-o", im_opts.output, "certificate file");
    im->add_option("--report", im_opts.report, "report file");

    struct {
        std::string graph, profile = "desk", output;
        std::size_t k = 0;
    } de_opts;
    CLI::App* de = app.add_subcommand("dense", "dense immersion only");
    de->add_option("graph", de_opts.graph, "input graph file")->required();
    de->add_option("--k", de_opts.k, "density parameter k")->required();
    de->add_option("--profile", de_opts.profile, "paper | desk");
    de->add_option("--output,-o", de_opts.output, "certificate file");

    struct {
        std::string graph, check = "edge_directed", mode = "exhaustive";
        double t = 1.0;
        bool extract = false;
        std::uint64_t seed = 0;
        std::size_t trials = 200;
    } ex_opts;
    CLI::App* ex = app.add_subcommand("expander", "expansion checks and extraction");
    ex->add_option("graph", ex_opts.graph, "input graph file")->required();
    ex->add_option("--t", ex_opts.t, "expansion parameter t");
    ex->add_flag("--extract", ex_opts.extract, "extract an expander from the underlying graph");
    ex->add_option("--check", ex_opts.check,
                   "edge_directed | robust_vertex_directed | edge_undirected | "
                   "robust_vertex_undirected");
    ex->add_option("--mode", ex_opts.mode, "exhaustive | sampled");
    ex->add_option("--seed", ex_opts.seed, "sampling seed");
    ex->add_option("--trials", ex_opts.trials, "sampling trials");

    struct {
        std::string graph;
        double alpha = 0.5;
        std::size_t pack = 1;
        bool few_simple = false, normalize = false;
    } cy_opts;
    CLI::App* cy = app.add_subcommand("cycles", "cycle tools");
    cy->add_option("graph", cy_opts.graph, "input graph file")->required();
    cy->add_option("--alpha", cy_opts.alpha, "density parameter alpha");
    cy->add_option("--pack", cy_opts.pack, "number of cycles to pack");
    cy->add_flag("--few-simple", cy_opts.few_simple, "one cycle with few simple edges");
    cy->add_flag("--normalize", cy_opts.normalize, "normalize multi-edges only");

    struct {
        std::string graph, certificate;
    } ve_opts;
    CLI::App* ve = app.add_subcommand("verify", "verify a certificate file");
    ve->add_option("graph", ve_opts.graph, "host graph file")->required();
    ve->add_option("certificate", ve_opts.certificate, "certificate file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kOk : kUsage;
    }

    try {
        if (gen->parsed()) {
            InstanceSpec spec;
            spec.kind = gen_opts.kind;
            spec.n = gen_opts.n;
            spec.d = gen_opts.d;
            spec.k = gen_opts.k;
            spec.seed = gen_opts.seed;
            spec.offsets = gen_opts.offsets;
            MultiDigraph g = generate_instance(spec);
            if (gen_opts.output.empty())
                write_graph(std::cout, g);
            else
                write_graph_file(gen_opts.output, g);
            return kOk;
        }

        if (im->parsed()) {
            MultiDigraph g = read_graph_file(im_opts.graph);
            Constants c = profile_constants(im_opts.profile);
            PipelineResult res = immerse_complete(g, im_opts.t, c);
            if (!im_opts.report.empty()) {
                std::ofstream f(im_opts.report);
                f << report_to_json(res.report) << '\n';
            }
            std::cout << report_to_json(res.report) << '\n';
            if (!res.certificate)
                return kHypothesis;
            if (!im_opts.output.empty())
                write_certificate_file(im_opts.output, *res.certificate);
            return kOk;
        }

        if (de->parsed()) {
            MultiDigraph g = read_graph_file(de_opts.graph);
            Constants c = profile_constants(de_opts.profile);
            DenseOptions opts = c.dense;
            opts.expansion.t = static_cast<double>(de_opts.k);
            DenseResult r = find_dense_immersion(g, de_opts.k, opts);
            nlohmann::json j;
            j["branch"] = r.branch;
            j["pattern_vertices"] = r.certificate.pattern.vertex_count();
            j["pattern_edges"] = r.certificate.pattern.edge_count();
            std::cout << j.dump(2) << '\n';
            if (!de_opts.output.empty())
                write_certificate_file(de_opts.output, r.certificate);
            return kOk;
        }

        if (ex->parsed()) {
            MultiDigraph g = read_graph_file(ex_opts.graph);
            ExpansionParams p;
            p.t = ex_opts.t;
            if (ex_opts.extract) {
                ExtractedExpander x = extract_expander(underlying_simple(g), p);
                nlohmann::json j;
                j["vertices"] = x.vertices;
                j["edge_count"] = x.graph.edge_count();
                j["ascent_moves"] = x.ascent_moves;
                std::cout << j.dump(2) << '\n';
                return kOk;
            }
            CheckMode mode = ex_opts.mode == "sampled"
                                 ? CheckMode::sampled(ex_opts.seed, ex_opts.trials)
                                 : CheckMode::exhaustive();
            ExpansionReport rep;
            if (ex_opts.check == "edge_directed")
                rep = check_expansion(g, p, ExpansionKind::edge_directed, mode);
            else if (ex_opts.check == "robust_vertex_directed")
                rep = check_expansion(g, p, ExpansionKind::robust_vertex_directed, mode);
            else if (ex_opts.check == "edge_undirected")
                rep = check_expansion(underlying_simple(g), p,
                                      ExpansionKind::edge_undirected, mode);
            else if (ex_opts.check == "robust_vertex_undirected")
                rep = check_expansion(underlying_simple(g), p,
                                      ExpansionKind::robust_vertex_undirected, mode);
            else
                throw InputError("unknown expansion kind '" + ex_opts.check + "'");
            std::cout << witness_json(rep).dump(2) << '\n';
            return kOk;
        }

        if (cy->parsed()) {
            MultiDigraph g = read_graph_file(cy_opts.graph);
            nlohmann::json j;
            if (cy_opts.normalize) {
                LiftedGraph norm = normalize_multiedges(LiftedGraph(g));
                j["edges_after"] = norm.current().edge_count();
                std::cout << j.dump(2) << '\n';
                return kOk;
            }
            if (cy_opts.few_simple) {
                auto [cycle, simple] = few_simple_edge_cycle(g, cy_opts.alpha);
                j["cycle"] = cycle.edge_ids;
                j["simple_edges"] = simple;
                std::cout << j.dump(2) << '\n';
                return kOk;
            }
            LiftedGraph norm = normalize_multiedges(LiftedGraph(g));
            CyclePack pack = pack_cycles(norm.current(), cy_opts.pack, cy_opts.alpha);
            j["cycles"] = pack_json(pack);
            std::cout << j.dump(2) << '\n';
            return kOk;
        }

        if (ve->parsed()) {
            MultiDigraph g = read_graph_file(ve_opts.graph);
            ImmersionCertificate cert = read_certificate_file(ve_opts.certificate, g);
            ValidityReport rep = verify_certificate(cert);
            nlohmann::json j;
            j["valid"] = rep.valid;
            j["violations"] = rep.violations;
            j["warnings"] = rep.warnings;
            std::cout << j.dump(2) << '\n';
            return rep.valid ? kOk : kInvalid;
        }

        std::cout << app.help() << '\n';
        return kUsage;
    } catch (const HypothesisNotMet& e) {
        std::cerr << "hypotheses not met [" << e.stage << "]: " << e.what() << '\n';
        return kHypothesis;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace immersion
