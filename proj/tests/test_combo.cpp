#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "regionet/combo.hpp"
#include "regionet/io.hpp"
#include "regionet/modularity.hpp"
#include "regionet/synth.hpp"

using namespace regionet;

namespace {

WeightedDigraph two_cliques(std::size_t size) {
    std::vector<NodeRecord> nodes(2 * size);
    for (std::size_t v = 0; v < nodes.size(); ++v) nodes[v].id = "c" + std::to_string(v);
    std::vector<Arc> arcs;
    auto clique = [&](std::uint32_t base) {
        for (std::uint32_t i = 0; i < size; ++i)
            for (std::uint32_t j = 0; j < size; ++j)
                if (i != j) arcs.push_back({base + i, base + j, 1.0});
    };
    clique(0);
    clique(static_cast<std::uint32_t>(size));
    return WeightedDigraph::from_arcs(std::move(nodes), std::move(arcs));
}

// Best bisection by brute force over all 2-colorings with node 0 fixed.
double exhaustive_best_bisection(const WeightedDigraph& g, std::vector<std::uint32_t>* out) {
    const std::size_t n = g.n();
    double best = -2.0;
    for (std::uint64_t mask = 0; mask < (1ull << (n - 1)); ++mask) {
        std::vector<std::uint32_t> labels(n, 0);
        for (std::size_t v = 1; v < n; ++v) labels[v] = (mask >> (v - 1)) & 1;
        const double q = oracles::naive_modularity(g, labels);
        if (q > best) {
            best = q;
            if (out) *out = labels;
        }
    }
    return best;
}

} // namespace

TEST_SUITE("combo") {

TEST_CASE("barbell optimum is the two triangles") {
    const auto g = oracles::barbell();
    const Partition p = optimize(g, {});
    CHECK(p.community_count() == 2);
    CHECK(p.same_clustering(Partition(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1})));
    CHECK(*p.q == doctest::Approx(5.0 / 14.0).epsilon(1e-9));
}

TEST_CASE("single node with a self-loop stays one community") {
    std::vector<NodeRecord> nodes(1);
    nodes[0].id = "solo";
    const auto g = WeightedDigraph::from_arcs(std::move(nodes), {{0, 0, 2.0}});
    const Partition p = optimize(g, {});
    CHECK(p.community_count() == 1);
    CHECK(*p.q == 0.0);
}

TEST_CASE("zero-weight or empty graphs are rejected") {
    const auto empty_weight = build_network({{.id = "a"}, {.id = "b"}}, {});
    CHECK_THROWS_AS(optimize(empty_weight, {}), std::invalid_argument);
    CHECK_THROWS_AS(optimize(WeightedDigraph{}, {}), std::invalid_argument);
}

TEST_CASE("near-optimality against exhaustive enumeration at n = 7") {
    OptimizerConfig cfg;
    cfg.restarts = 5;
    int hits = 0;
    const int instances = 25;
    for (int seed = 0; seed < instances; ++seed) {
        const auto g = oracles::random_digraph(7, 0.5, 1000 + seed);
        const auto [best_q, best_labels] = oracles::exhaustive_best(g);
        const Partition p = optimize(g, cfg);
        if (std::abs(*p.q - best_q) <= 1e-9) ++hits;
        CHECK(*p.q <= best_q + 1e-9);
    }
    CHECK(hits >= instances * 95 / 100);
}

TEST_CASE("optimize dominates the greedy baseline") {
    // With a second restart the optimizer refines the greedy partition
    // itself, so it can never land below it.
    OptimizerConfig cfg;
    cfg.restarts = 2;
    for (int seed = 0; seed < 30; ++seed) {
        const auto g = oracles::random_digraph(16, 0.3, 500 + seed);
        const Partition fast = greedy_baseline(g);
        const Partition full = optimize(g, cfg);
        CHECK(*full.q >= *fast.q - 1e-12);
    }
}

TEST_CASE("determinism: identical seed and config give identical bytes") {
    const auto country = generate_country({.region_count = 3,
                                           .nodes_per_region = 15,
                                           .gravity_exponent = 2.0,
                                           .intra_boost = 6.0,
                                           .population_spread = 0.3,
                                           .seed = 11});
    OptimizerConfig cfg;
    cfg.seed = 42;
    cfg.restarts = 3;
    const Partition a = optimize(country.graph, cfg);
    const Partition b = optimize(country.graph, cfg);
    CHECK(partition_to_string(country.graph, a) == partition_to_string(country.graph, b));
    CHECK(*a.q == *b.q);
}

TEST_CASE("determinism: thread count does not change the result") {
    const auto country = generate_country({.region_count = 4,
                                           .nodes_per_region = 12,
                                           .gravity_exponent = 2.0,
                                           .intra_boost = 4.0,
                                           .population_spread = 0.5,
                                           .seed = 5});
    OptimizerConfig serial;
    serial.seed = 9;
    serial.restarts = 2;
    OptimizerConfig parallel = serial;
    parallel.threads = 4;
    const Partition a = optimize(country.graph, serial);
    const Partition b = optimize(country.graph, parallel);
    CHECK(a.labels() == b.labels());
    CHECK(*a.q == *b.q);
}

TEST_CASE("max_communities is respected") {
    for (int seed = 0; seed < 10; ++seed) {
        const auto g = oracles::random_digraph(14, 0.4, 300 + seed);
        for (std::uint32_t cap = 1; cap <= 4; ++cap) {
            OptimizerConfig cfg;
            cfg.max_communities = cap;
            const Partition p = optimize(g, cfg);
            CHECK(p.community_count() <= cap);
        }
    }
}

TEST_CASE("planted 4-block synthetic is recovered exactly") {
    const auto country = generate_country({.region_count = 4,
                                           .nodes_per_region = 20,
                                           .gravity_exponent = 2.0,
                                           .intra_boost = 10.0,
                                           .population_spread = 0.0,
                                           .seed = 3});
    const Partition p = optimize(country.graph, {});
    CHECK(p.same_clustering(country.planted));
}

TEST_CASE("bisect") {
    SUBCASE("barbell splits into the triangles") {
        const auto g = oracles::barbell();
        const Partition p = bisect(g, {});
        CHECK(p.community_count() == 2);
        CHECK(p.same_clustering(Partition(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1})));
        CHECK(cross_weight_fraction(g, p) == doctest::Approx(1.0 / 7.0).epsilon(1e-9));
        // Exhaustive over all 2-colorings confirms this is the best bisection.
        std::vector<std::uint32_t> best_labels;
        const double best = exhaustive_best_bisection(g, &best_labels);
        CHECK(*p.q == doctest::Approx(best).epsilon(1e-9));
    }
    SUBCASE("two disjoint cliques split with zero crossing weight") {
        const auto g = two_cliques(4);
        const Partition p = bisect(g, {});
        CHECK(p.community_count() == 2);
        CHECK(cross_weight_fraction(g, p) == 0.0);
        const std::vector<std::uint32_t> expect{0, 0, 0, 0, 1, 1, 1, 1};
        CHECK(p.same_clustering(Partition(expect)));
    }
    SUBCASE("planted 2-block: measured cross fraction tracks the generator") {
        const auto country = generate_country({.region_count = 2,
                                               .nodes_per_region = 25,
                                               .gravity_exponent = 2.0,
                                               .intra_boost = 8.0,
                                               .population_spread = 0.2,
                                               .seed = 21});
        const Partition p = bisect(country.graph, {});
        CHECK(p.community_count() == 2);
        CHECK(std::abs(cross_weight_fraction(country.graph, p) -
                       country.planted_cross_fraction) <= 0.01);
    }
    SUBCASE("random graphs match the exhaustive best bisection") {
        for (int seed = 0; seed < 15; ++seed) {
            const auto g = oracles::random_digraph(8, 0.5, 700 + seed);
            OptimizerConfig cfg;
            cfg.restarts = 5;
            const Partition p = bisect(g, cfg);
            const double best = exhaustive_best_bisection(g, nullptr);
            if (best > 1e-9) {
                CHECK(p.community_count() == 2);
                CHECK(*p.q == doctest::Approx(best).epsilon(1e-7));
            } else {
                CHECK(p.community_count() == 1);
            }
        }
    }
}

TEST_CASE("bisect needs at least two nodes") {
    std::vector<NodeRecord> nodes(1);
    nodes[0].id = "solo";
    const auto g = WeightedDigraph::from_arcs(std::move(nodes), {{0, 0, 1.0}});
    CHECK_THROWS_AS(bisect(g, {}), std::invalid_argument);
}

TEST_CASE("invalid optimizer configs are rejected") {
    const auto g = oracles::barbell();
    OptimizerConfig cfg;
    cfg.gain_tolerance = 0.0;
    CHECK_THROWS_AS(optimize(g, cfg), std::invalid_argument);
    cfg = {};
    cfg.kl_sweeps = 0;
    CHECK_THROWS_AS(optimize(g, cfg), std::invalid_argument);
    cfg = {};
    cfg.restarts = 0;
    CHECK_THROWS_AS(optimize(g, cfg), std::invalid_argument);
    cfg = {};
    cfg.threads = 0;
    CHECK_THROWS_AS(optimize(g, cfg), std::invalid_argument);
    cfg = {};
    cfg.max_communities = 0;
    CHECK_THROWS_AS(optimize(g, cfg), std::invalid_argument);
}

TEST_CASE("gain tolerance gates every move") {
    // No single move on the barbell gains more than 5/14, so a tolerance
    // above that freezes the initial single community.
    const auto g = oracles::barbell();
    OptimizerConfig cfg;
    cfg.gain_tolerance = 0.5;
    const Partition p = optimize(g, cfg);
    CHECK(p.community_count() == 1);
    CHECK(*p.q == 0.0);
}

TEST_CASE("a single refinement sweep still yields a valid partition") {
    OptimizerConfig cfg;
    cfg.kl_sweeps = 1;
    for (int seed = 0; seed < 5; ++seed) {
        const auto g = oracles::random_digraph(12, 0.4, 800 + seed);
        const Partition p = optimize(g, cfg);
        CHECK(p.n() == g.n());
        CHECK(p.is_canonical());
        CHECK(*p.q == doctest::Approx(modularity(g, p)).epsilon(1e-12));
    }
}

TEST_CASE("zero-activity nodes ride along without disturbing the partition") {
    std::vector<NodeRecord> nodes(8);
    for (int v = 0; v < 8; ++v) nodes[v].id = "i" + std::to_string(v);
    std::vector<Arc> arcs;
    for (std::uint32_t i = 0; i < 3; ++i)
        for (std::uint32_t j = 0; j < 3; ++j)
            if (i != j) {
                arcs.push_back({i, j, 1.0});
                arcs.push_back({i + 3, j + 3, 1.0});
            }
    // Nodes 6 and 7 have no arcs at all.
    const auto g = WeightedDigraph::from_arcs(std::move(nodes), std::move(arcs));
    CHECK(g.zero_activity_count() == 2);
    const Partition p = optimize(g, {});
    CHECK(p.n() == 8);
    CHECK(p.label(0) == p.label(1));
    CHECK(p.label(3) == p.label(4));
    CHECK(p.label(0) != p.label(3));
}

TEST_CASE("greedy baseline") {
    SUBCASE("finds the barbell triangles") {
        const auto g = oracles::barbell();
        const Partition p = greedy_baseline(g);
        CHECK(p.same_clustering(Partition(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1})));
        CHECK(*p.q == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
    }
    SUBCASE("single directed edge merges into one community") {
        std::vector<NodeRecord> nodes(2);
        nodes[0].id = "u";
        nodes[1].id = "v";
        const auto g = WeightedDigraph::from_arcs(std::move(nodes), {{0, 1, 4.0}});
        const Partition p = greedy_baseline(g);
        CHECK(p.community_count() == 1);
    }
    SUBCASE("disjoint cliques are never merged") {
        const Partition p = greedy_baseline(two_cliques(3));
        CHECK(p.community_count() == 2);
    }
}

} // TEST_SUITE
