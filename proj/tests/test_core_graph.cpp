#include "doctest.h"

#include <sstream>

#include "immersion/core_graph.hpp"
#include "immersion/io.hpp"
#include "immersion/pipeline.hpp"
#include "test_support.hpp"

using namespace immersion;
using namespace immersion::testing;

TEST_CASE("degree profile counts identities and distinct neighbours") {
    MultiDigraph tri = directed_triangle();
    CHECK(degree_profile(tri, 0) == DegreeProfile{1, 1, 1, 1});

    MultiDigraph parallel = make_graph(2, {{0, 1}, {0, 1}});
    CHECK(degree_profile(parallel, 0) == DegreeProfile{2, 0, 1, 0});

    MultiDigraph pair = make_graph(2, {{0, 1}, {1, 0}});
    CHECK(degree_profile(pair, 1) == DegreeProfile{1, 1, 1, 1});

    CHECK_THROWS_AS(degree_profile(tri, 7), InputError);
}

TEST_CASE("eulerian test is per-vertex balance only") {
    CHECK(is_eulerian(directed_triangle()));
    CHECK_FALSE(is_eulerian(make_graph(2, {{0, 1}})));
    MultiDigraph two_triangles =
        make_graph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    CHECK(is_eulerian(two_triangles));
}

TEST_CASE("underlying simple graph collapses directions and multiplicities") {
    MultiDigraph anti = make_graph(2, {{0, 1}, {1, 0}});
    CHECK(underlying_simple(anti).edge_count() == 1);

    MultiDigraph parallel = make_graph(2, {{0, 1}, {0, 1}});
    CHECK(underlying_simple(parallel).edge_count() == 1);

    SimpleGraph tri = underlying_simple(directed_triangle());
    CHECK(tri.edge_count() == 3);
    CHECK(tri.has_edge(0, 1));
    CHECK(tri.has_edge(1, 2));
    CHECK(tri.has_edge(0, 2));
}

TEST_CASE("average degree normalizations") {
    CHECK(average_degree(directed_triangle()) == doctest::Approx(1.0));
    SimpleGraph und_tri(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(average_degree(und_tri) == doctest::Approx(2.0));
    MultiDigraph parallel = make_graph(2, {{0, 1}, {0, 1}});
    CHECK(average_degree(parallel) == doctest::Approx(1.0));
    CHECK_THROWS_AS(average_degree(MultiDigraph(0, {})), InputError);
    CHECK_THROWS_AS(average_degree(SimpleGraph(0, {})), InputError);
}

TEST_CASE("degree sums match the edge count on generated instances") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        MultiDigraph g = gen_random_eulerian(8 + seed % 5, 1 + seed % 3, seed);
        std::size_t dout = 0, din = 0;
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            dout += g.out_degree(v);
            din += g.in_degree(v);
        }
        CHECK(dout == g.edge_count());
        CHECK(din == g.edge_count());
        SimpleGraph und = underlying_simple(g);
        CHECK(und.edge_count() <= g.edge_count());
    }
}

TEST_CASE("eulerian is invariant under vertex relabeling") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 20; ++round) {
        MultiDigraph g = gen_random_eulerian(9, 2, rng());
        std::vector<VertexId> perm(g.vertex_count());
        for (std::size_t i = 0; i < perm.size(); ++i)
            perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Edge> relabeled;
        for (const Edge& e : g.edges())
            relabeled.push_back({e.id, perm[e.tail], perm[e.head]});
        MultiDigraph h(g.vertex_count(), std::move(relabeled));
        CHECK(is_eulerian(g) == is_eulerian(h));
    }
}

TEST_CASE("graph construction rejects bad input") {
    CHECK_THROWS_AS(make_graph(2, {{0, 2}}), InputError);
    CHECK_THROWS_AS(make_graph(2, {{1, 1}}), LoopError);
    CHECK_THROWS_AS(MultiDigraph(2, {{0, 0, 1}, {0, 1, 0}}), InputError); // duplicate id
    CHECK_NOTHROW(make_graph(2, {{1, 1}}, true));
    CHECK_THROWS_AS(SimpleGraph(3, {{1, 1}}), InputError);
}

TEST_CASE("multiplicity and neighbour queries") {
    MultiDigraph g = make_graph(3, {{0, 1}, {0, 1}, {1, 0}, {1, 2}});
    CHECK(g.multiplicity(0, 1) == 2);
    CHECK(g.multiplicity(1, 0) == 1);
    CHECK(g.multiplicity(2, 0) == 0);
    CHECK(g.out_neighbours(1) == std::vector<VertexId>{0, 2});
    CHECK_FALSE(g.is_simple());
    CHECK(directed_triangle().is_simple());
}

TEST_CASE("restriction preserves edge ids") {
    MultiDigraph g = make_graph(5, {{0, 1}, {1, 4}, {4, 0}, {2, 3}});
    MultiDigraph r = restrict_to(g, {0, 1, 4});
    CHECK(r.vertex_count() == 3);
    CHECK(r.edge_count() == 3);
    CHECK(r.edge(1).tail == 1); // vertex 1 kept its position in the keep list
    CHECK(r.edge(1).head == 2); // vertex 4 became 2
}

TEST_CASE("graph text format round-trips byte-exactly") {
    MultiDigraph g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 1}});
    std::ostringstream first;
    write_graph(first, g);
    std::istringstream back(first.str());
    MultiDigraph g2 = read_graph(back);
    std::ostringstream second;
    write_graph(second, g2);
    CHECK(first.str() == second.str());
    CHECK(g == g2);
    std::istringstream bad("3");
    CHECK_THROWS_AS(read_graph(bad), InputError);
}
