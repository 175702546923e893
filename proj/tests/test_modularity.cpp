#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "regionet/graph.hpp"
#include "regionet/modularity.hpp"
#include "regionet/partition.hpp"
#include "regionet/rng.hpp"

using namespace regionet;

namespace {

WeightedDigraph two_loops() {
    std::vector<NodeRecord> nodes(2);
    nodes[0].id = "u";
    nodes[1].id = "v";
    return WeightedDigraph::from_arcs(std::move(nodes), {{0, 0, 1.0}, {1, 1, 1.0}});
}

WeightedDigraph complete3() {
    std::vector<NodeRecord> nodes(3);
    for (int v = 0; v < 3; ++v) nodes[v].id = std::string(1, char('a' + v));
    std::vector<Arc> arcs;
    for (std::uint32_t i = 0; i < 3; ++i)
        for (std::uint32_t j = 0; j < 3; ++j)
            if (i != j) arcs.push_back({i, j, 1.0});
    return WeightedDigraph::from_arcs(std::move(nodes), std::move(arcs));
}

} // namespace

TEST_SUITE("modularity") {

TEST_CASE("single community scores exactly zero") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = oracles::random_digraph(9, 0.5, seed);
        CHECK(modularity(g, Partition::single_community(g.n())) == 0.0);
    }
}

TEST_CASE("two self-loop singletons score one half") {
    const auto g = two_loops();
    CHECK(modularity(g, Partition::singletons(2)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("barbell split into its triangles scores 5/14") {
    const auto g = oracles::barbell();
    const Partition p(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
    CHECK(modularity(g, p) == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
    // Exhaustive enumeration over all Bell(6) = 203 partitions confirms the optimum.
    const auto [best_q, best_labels] = oracles::exhaustive_best(g);
    CHECK(best_q == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
    CHECK(Partition(best_labels).same_clustering(p));
}

TEST_CASE("matches the dense-sum oracle on random graphs") {
    SplitMix64 rng(7);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto g = oracles::random_digraph(8, 0.6, seed);
        const auto labels = oracles::random_labels(8, 3, seed + 1000);
        const double q = modularity(g, Partition(labels));
        CHECK(q == doctest::Approx(oracles::naive_modularity(g, labels)).epsilon(1e-12));
        CHECK(q < 1.0);
        CHECK(q >= -1.0);
    }
}

TEST_CASE("label and scale invariance") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = oracles::random_digraph(10, 0.5, seed);
        const auto labels = oracles::random_labels(10, 4, seed + 50);
        const double q = modularity(g, Partition(labels));

        // Bijective relabeling.
        auto relabeled = labels;
        for (auto& l : relabeled) l = 7 - l;
        CHECK(modularity(g, Partition(relabeled)) == doctest::Approx(q).epsilon(1e-9));

        // Uniform weight rescaling.
        std::vector<Arc> scaled;
        g.for_each_arc([&](NodeId u, NodeId v, double w) { scaled.push_back({u, v, w * 37.5}); });
        const auto g2 = WeightedDigraph::from_arcs(g.nodes(), std::move(scaled));
        CHECK(modularity(g2, Partition(labels)) == doctest::Approx(q).epsilon(1e-9));
    }
}

TEST_CASE("edge scores") {
    SUBCASE("self-loop graph") {
        const auto g = two_loops();
        const EdgeScores scores(g);
        CHECK(scores.score(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("uniform complete digraph on 3 nodes") {
        const auto g = complete3();
        const EdgeScores scores(g);
        for (NodeId i = 0; i < 3; ++i)
            for (NodeId j = 0; j < 3; ++j)
                if (i != j)
                    CHECK(scores.score(i, j) == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
    }
    SUBCASE("dense sum over all pairs vanishes") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto g = oracles::random_digraph(11, 0.5, seed);
            const EdgeScores scores(g);
            double total = 0;
            for (NodeId i = 0; i < g.n(); ++i)
                for (NodeId j = 0; j < g.n(); ++j) total += scores.score(i, j);
            CHECK(total == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
    SUBCASE("zero-weight graph is an error") {
        const auto g = build_network({{.id = "a"}, {.id = "b"}}, {});
        CHECK_THROWS_AS(EdgeScores{g}, std::invalid_argument);
    }
}

TEST_CASE("gain") {
    const auto g = oracles::barbell();
    SUBCASE("whole community to a new community is exactly zero") {
        const Partition p = Partition::single_community(6);
        const std::vector<NodeId> all{0, 1, 2, 3, 4, 5};
        CHECK(gain(g, p, all, kNewCommunity) == 0.0);
    }
    SUBCASE("splitting off one triangle gains 5/14") {
        const Partition p = Partition::single_community(6);
        const std::vector<NodeId> triangle{3, 4, 5};
        CHECK(gain(g, p, triangle, kNewCommunity) ==
              doctest::Approx(5.0 / 14.0).epsilon(1e-12));
    }
    SUBCASE("moving and moving back nets zero") {
        const Partition p(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
        const std::vector<NodeId> movers{0, 1};
        const double there = gain(g, p, movers, 1);
        Partition q(std::vector<std::uint32_t>{1, 1, 0, 1, 1, 1});
        const double back = gain(g, q, movers, 0);
        CHECK(there + back == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("matches a full recompute on random moves") {
        SplitMix64 rng(123);
        int checked = 0;
        while (checked < 200) {
            const std::uint64_t seed = rng.next();
            const auto rg = oracles::random_digraph(9, 0.5, seed);
            auto labels = oracles::random_labels(9, 3, rng.next());
            Partition p(labels);
            // Pick a random nonempty subset of one community and a target.
            const std::uint32_t source = labels[rng.next_below(9)];
            std::vector<NodeId> movers;
            for (NodeId v = 0; v < 9; ++v)
                if (labels[v] == source && rng.next_below(2) == 0) movers.push_back(v);
            if (movers.empty()) continue;
            const std::uint32_t target =
                rng.next_below(2) == 0 ? kNewCommunity : (source + 1 + rng.next_below(3)) % 4;
            if (target == source) continue;
            bool target_exists = target == kNewCommunity;
            for (std::uint32_t l : labels) target_exists = target_exists || l == target;
            if (!target_exists) continue;

            const double predicted = gain(rg, p, movers, target);
            auto after = labels;
            const std::uint32_t fresh = 1000;
            for (NodeId v : movers) after[v] = target == kNewCommunity ? fresh : target;
            const double actual =
                oracles::naive_modularity(rg, after) - oracles::naive_modularity(rg, labels);
            CHECK(predicted == doctest::Approx(actual).epsilon(1e-12));
            ++checked;
        }
    }
    SUBCASE("movers spanning two communities is an error") {
        const Partition p(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
        const std::vector<NodeId> movers{2, 3};
        CHECK_THROWS_AS(gain(g, p, movers, kNewCommunity), std::invalid_argument);
    }
}

TEST_CASE("cross weight fraction") {
    const auto g = oracles::barbell();
    SUBCASE("single community has no crossing weight") {
        CHECK(cross_weight_fraction(g, Partition::single_community(6)) == 0.0);
    }
    SUBCASE("all singletons on a loop-free graph put all weight across") {
        CHECK(cross_weight_fraction(g, Partition::singletons(6)) == 1.0);
    }
    SUBCASE("triangle split crosses only the bridge") {
        const Partition p(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
        CHECK(cross_weight_fraction(g, p) == doctest::Approx(2.0 / 14.0).epsilon(1e-12));
    }
}

TEST_CASE("partition canonicalization and bookkeeping") {
    Partition p(std::vector<std::uint32_t>{5, 5, 2, 9, 2});
    CHECK(p.community_count() == 3);
    CHECK(!p.is_canonical());
    p.canonicalize();
    CHECK(p.is_canonical());
    CHECK(p.labels() == std::vector<std::uint32_t>{0, 0, 1, 2, 1});
    const auto comms = p.communities();
    REQUIRE(comms.size() == 3);
    CHECK(comms[0] == std::vector<NodeId>{0, 1});
    CHECK(comms[2] == std::vector<NodeId>{3});
    CHECK(p.same_clustering(Partition(std::vector<std::uint32_t>{7, 7, 0, 4, 0})));
    CHECK(!p.same_clustering(Partition(std::vector<std::uint32_t>{0, 0, 1, 2, 2})));
}

TEST_CASE("partition/graph mismatch is an error") {
    const auto g = oracles::barbell();
    CHECK_THROWS_AS(modularity(g, Partition::single_community(5)), std::invalid_argument);
}

} // TEST_SUITE
