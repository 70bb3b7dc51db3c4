#include <doctest.h>

#include <random>

#include "glauber/graph.hpp"

using namespace glauber;

TEST_CASE("cycle of four has degree two everywhere") {
    auto g = cycle_graph(4);
    CHECK(g->vertex_count() == 4);
    for (Vertex v = 0; v < 4; ++v) CHECK(g->degree(v) == 2);
}

TEST_CASE("binary tree of height two") {
    auto g = tree_graph(2, 2);
    CHECK(g->vertex_count() == 7);
    CHECK(g->edge_count() == 6);
    CHECK(g->max_degree() == 3);
}

TEST_CASE("square of a path adds distance-two pairs") {
    auto base = path_graph(4);
    auto sq = graph_square(base);
    CHECK(sq->edge_count() == 5);
    CHECK(sq->adjacent(0, 2));
    CHECK(sq->adjacent(1, 3));
    CHECK_FALSE(sq->adjacent(0, 3));
    CHECK(sq->max_degree() == 3);
    CHECK(sq->base() == base);
}

TEST_CASE("adjacency is symmetric and sorted") {
    for (auto g : {grid_graph(3, 4), tree_graph(3, 3), complete_graph(6), graph_square(cycle_graph(9))}) {
        std::size_t maxd = 0;
        for (Vertex u = 0; u < Vertex(g->vertex_count()); ++u) {
            const auto& nb = g->neighbors(u);
            CHECK(std::is_sorted(nb.begin(), nb.end()));
            CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
            maxd = std::max(maxd, nb.size());
            for (Vertex w : nb) {
                CHECK(w != u);
                CHECK(g->adjacent(w, u));
            }
        }
        CHECK(maxd == g->max_degree());
    }
}

TEST_CASE("invalid graph parameters are rejected") {
    CHECK_THROWS_AS(cycle_graph(0), std::invalid_argument);
    std::vector<std::pair<Vertex, Vertex>> loop{{1, 1}};
    CHECK_THROWS_AS(edge_list_graph(3, loop), std::invalid_argument);
    std::vector<std::pair<Vertex, Vertex>> out_of_range{{0, 5}};
    CHECK_THROWS_AS(edge_list_graph(3, out_of_range), std::invalid_argument);
}

TEST_CASE("balls") {
    auto p5 = path_graph(5);
    CHECK(ball(*p5, 2, 1) == VertexSet{1, 2, 3});
    CHECK(ball(*p5, 3, 0) == VertexSet{3});
    auto c8 = cycle_graph(8);
    auto b = ball(*c8, 0, 3);
    CHECK(b.size() == 7);
    CHECK_FALSE(b.contains(4));
    CHECK_THROWS(ball(*p5, 9, 1));
}

TEST_CASE("ball recursion through the external boundary") {
    auto g = grid_graph(5, 5);
    for (int r = 1; r <= 4; ++r) {
        auto prev = ball(*g, 12, r - 1);
        CHECK(ball(*g, 12, r) == set_union(prev, boundary(*g, prev, BoundaryMode::external)));
    }
}

TEST_CASE("boundaries") {
    auto c6 = cycle_graph(6);
    VertexSet s{0, 1};
    CHECK(boundary(*c6, s, BoundaryMode::external) == VertexSet{2, 5});
    CHECK(boundary(*c6, s, BoundaryMode::internal) == VertexSet{0, 1});
    CHECK(boundary(*c6, all_vertices(*c6), BoundaryMode::internal).empty());
    auto g = grid_graph(4, 4);
    VertexSet t{0, 1, 4, 5, 6};
    CHECK(is_subset(boundary(*g, t, BoundaryMode::internal), t));
    for (Vertex v : boundary(*g, t, BoundaryMode::external)) CHECK_FALSE(t.contains(v));
}

TEST_CASE("center packing") {
    auto c12 = cycle_graph(12);
    CHECK(pack_centers(*c12, 4) == std::vector<Vertex>{0, 4, 8});
    auto g = grid_graph(3, 3);
    CHECK(pack_centers(*g, 1).size() == 9);
    for (std::size_t n : {32, 64, 128}) {
        auto c = cycle_graph(n);
        for (int r = 1; r <= 3; ++r) {
            auto centers = pack_centers(*c, 2 * r);
            CHECK(double(centers.size()) >= double(n) / std::pow(2.0, 2 * r));
            for (std::size_t i = 0; i < centers.size(); ++i)
                for (std::size_t j = i + 1; j < centers.size(); ++j)
                    CHECK(*distance(*c, centers[i], centers[j]) >= 2 * r);
        }
    }
}

TEST_CASE("packing meets the target size on built-in families") {
    for (auto g : {cycle_graph(1000), grid_graph(40, 40), tree_graph(2, 9), graph_square(path_graph(300))}) {
        const double d = double(g->max_degree());
        for (int r = 1; r <= 2; ++r) {
            auto centers = pack_centers(*g, 2 * r);
            CHECK(double(centers.size()) >= std::ceil(double(g->vertex_count()) / std::pow(d, 2 * r)));
            // maximality
            auto dist = bfs_distances(*g, centers);
            for (int x : dist) CHECK((x >= 0 && x <= 2 * r - 1));
        }
    }
}

TEST_CASE("distances") {
    auto p5 = path_graph(5);
    CHECK(*distance(*p5, 3, 3) == 0);
    CHECK(*distance(*p5, 0, 4) == 4);
    std::vector<std::pair<Vertex, Vertex>> e{{0, 1}, {2, 3}};
    auto two = edge_list_graph(4, e);
    CHECK_FALSE(distance(*two, 0, 3).has_value());
    auto g = grid_graph(6, 7);
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, 41);
    for (int i = 0; i < 200; ++i) {
        Vertex a = pick(rng), b = pick(rng), c = pick(rng);
        CHECK(*distance(*g, a, c) <= *distance(*g, a, b) + *distance(*g, b, c));
        CHECK(*distance(*g, a, b) == *distance(*g, b, a));
    }
}
