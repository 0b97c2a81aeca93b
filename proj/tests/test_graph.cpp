#include "mdimpute/error.hpp"
#include "mdimpute/graph.hpp"
#include "mdimpute/preset.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace mdi;

namespace {

MissingDataGraph fixture(const char* name) { return parse_graph(builtin_fixture(name)); }

NodeSet random_subset(std::mt19937_64& gen, const std::vector<NodeId>& pool, double p) {
    std::bernoulli_distribution coin(p);
    NodeSet out;
    for (const auto& v : pool)
        if (coin(gen)) out.insert(v);
    return out;
}

}  // namespace

TEST_CASE("parse fig1a fixture") {
    const auto g = fixture("fig1a.graph");
    CHECK(g.node_count() == 4);
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge("X", "Y"));
    CHECK(g.has_edge("X", "R_Y"));
    CHECK_FALSE(g.has_edge("Y", "X"));
    CHECK(g.is_partial("X"));
    CHECK(g.is_indicator("R_Y"));
    CHECK(g.indicator_of("Y") == "R_Y");
    CHECK(g.role("R_X") == NodeRole::indicator("X"));
    CHECK(g.substantive() == std::vector<NodeId>{"X", "Y"});
    CHECK(g.indicators() == std::vector<NodeId>{"R_X", "R_Y"});
    CHECK(g.parents("R_Y") == NodeSet{"X"});
    CHECK(g.children("X") == NodeSet{"R_Y", "Y"});
}

TEST_CASE("graph text round trip") {
    for (const char* name : {"fig1a.graph", "fig1b.graph", "fig2.graph"}) {
        const auto g = fixture(name);
        CHECK(parse_graph(g.to_text()) == g);
    }
}

TEST_CASE("fully observed nodes and comments") {
    const auto g = parse_graph(R"(
        # comment
        nodes:
          A observed   # trailing comment
          X partial
          R_X indicator X
        edges:
          A -> X
          A -> R_X
    )");
    CHECK(g.partially_observed() == std::vector<NodeId>{"X"});
    CHECK(g.substantive() == std::vector<NodeId>{"A", "X"});
}

TEST_CASE("graph validation errors") {
    auto bad = [](const char* text) { CHECK_THROWS_AS(parse_graph(text), GraphError); };
    // indicator with unknown owner
    bad("nodes:\n X partial\n R_X indicator Q\n");
    // partial without indicator
    bad("nodes:\n X partial\n");
    // two indicators for one variable
    bad("nodes:\n X partial\n R_X indicator X\n R2 indicator X\n");
    // indicator owned by a fully observed variable
    bad("nodes:\n X observed\n R_X indicator X\n");
    // indicator as parent of a substantive node
    bad("nodes:\n X partial\n Y observed\n R_X indicator X\nedges:\n R_X -> Y\n");
    // cycle
    bad("nodes:\n A observed\n B observed\n C observed\nedges:\n A -> B\n B -> C\n C -> A\n");
    // self loop
    bad("nodes:\n A observed\nedges:\n A -> A\n");
    // unknown node in edge
    bad("nodes:\n A observed\nedges:\n A -> B\n");
    // duplicate node
    bad("nodes:\n A observed\n A observed\n");
    // missing nodes section and stray text
    bad("edges:\n A -> B\n");
    bad("hello\n");
    bad("nodes:\n A sometimes\n");
    bad("nodes:\n A observed\nedges:\n A B\n");
}

TEST_CASE("parse errors carry line numbers") {
    try {
        parse_graph("nodes:\n  X partial\n  R_X indicator X\nedges:\n  X => R_X\n");
        FAIL("expected a parse error");
    } catch (const GraphError& e) {
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
}

TEST_CASE("indicator to indicator edges are allowed") {
    const auto g = fixture("fig1b.graph");
    CHECK(g.has_edge("R_X", "R_Y"));
}

TEST_CASE("topological order is deterministic and valid") {
    const auto g = fixture("fig2.graph");
    const auto order = topological_order(g);
    CHECK(order.size() == g.node_count());
    std::map<NodeId, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& [p, c] : g.edges()) CHECK(pos[p] < pos[c]);
    CHECK(order == topological_order(g));
}

TEST_CASE("d-separation on the example graphs") {
    const auto a = fixture("fig1a.graph");
    CHECK(d_separated(a, {"X"}, {"R_X"}, {}));
    CHECK(d_separated(a, {"Y"}, {"R_X", "R_Y"}, {"X"}));
    CHECK_FALSE(d_separated(a, {"Y"}, {"R_Y"}, {}));

    const auto b = fixture("fig1b.graph");
    CHECK_FALSE(d_separated(b, {"Y"}, {"R_Y"}, {}));
    CHECK(d_separated(b, {"Y"}, {"R_X", "R_Y"}, {"X"}));

    const auto f2 = fixture("fig2.graph");
    CHECK(d_separated(f2, {"Z"}, {"R_Z"}, {}));
    CHECK(d_separated(f2, {"W"}, {"R_Z", "R_W"}, {"Z"}));
    CHECK(d_separated(f2, {"X"}, {"R_Z", "R_W", "R_X"}, {"Z", "W"}));
    CHECK(d_separated(f2, {"Y"}, {"R_Z", "R_W", "R_X", "R_Y"}, {"Z", "W", "X"}));
    CHECK_FALSE(d_separated(f2, {"X"}, {"R_X"}, {}));
}

TEST_CASE("d-separation edge cases") {
    const auto g = fixture("fig1a.graph");
    CHECK(d_separated(g, {}, {"X"}, {}));
    CHECK(d_separated(g, {"X"}, {}, {"Y"}));
    CHECK_THROWS_AS(d_separated(g, {"X"}, {"X"}, {}), GraphError);
    CHECK_THROWS_AS(d_separated(g, {"X"}, {"Y"}, {"Y"}), GraphError);
    CHECK_THROWS_AS(d_separated(g, {"Q"}, {"Y"}, {}), GraphError);
}

TEST_CASE("d-separation agrees with path enumeration on random graphs") {
    std::mt19937_64 gen(20240611);
    std::uniform_int_distribution<int> size(2, 7);
    std::uniform_real_distribution<double> density(0.1, 0.7);
    for (int graph = 0; graph < 60; ++graph) {
        const int k = size(gen);
        const auto g = oracle::random_dag(gen, k, density(gen));
        std::vector<NodeId> names;
        for (int i = 0; i < k; ++i) names.push_back(oracle::node_name(i));
        for (int q = 0; q < 60; ++q) {
            std::vector<NodeId> shuffled = names;
            std::shuffle(shuffled.begin(), shuffled.end(), gen);
            const NodeSet a{shuffled[0]};
            const NodeSet b{shuffled[1]};
            const auto z = random_subset(gen, {shuffled.begin() + 2, shuffled.end()}, 0.4);
            const bool fast = d_separated(g, a, b, z);
            REQUIRE(fast == oracle::d_separated_by_paths(g, a, b, z));
            CHECK(fast == d_separated(g, b, a, z));
        }
    }
}

TEST_CASE("adding an edge never creates d-separation between its endpoints") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = oracle::random_dag(gen, 6, 0.3);
        const auto order = topological_order(g);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const auto& p = order[i];
            const auto& c = order[i + 1];
            if (g.has_edge(p, c)) continue;
            auto edges = g.edges();
            edges.emplace_back(p, c);
            const MissingDataGraph h(g.nodes(), edges);
            const auto z = random_subset(gen, {order.begin() + i + 2, order.end()}, 0.5);
            CHECK_FALSE(d_separated(h, {p}, {c}, z));
        }
    }
}

TEST_CASE("row patterns") {
    const auto g = fixture("fig1a.graph");
    const auto p = row_pattern(g, {{"R_X", 1}, {"R_Y", 0}});
    CHECK(p.observed == NodeSet{"X"});
    CHECK(p.missing == NodeSet{"Y"});
    CHECK_THROWS_AS(row_pattern(g, {{"R_X", 1}}), DataError);
    CHECK_THROWS_AS(row_pattern(g, {{"R_X", 1}, {"R_Y", 2}}), DataError);
}
