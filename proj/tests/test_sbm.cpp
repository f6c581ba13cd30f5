#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pclique/sbm.hpp"
#include "support/oracles.hpp"

using namespace pclique;

namespace {

BlockModelSpec table1_spec() {
    BlockModelSpec spec;
    spec.sizes = {100, 10, 10};
    spec.link_probs = {{0.2, 0.05, 0.05}, {0.05, 0.5, 0.05}, {0.05, 0.05, 0.5}};
    return spec;
}

BlockModelSpec table2_spec() {
    BlockModelSpec spec;
    spec.sizes = {100, 20, 20};
    spec.link_probs = {{0.2, 0.05, 0.05}, {0.05, 0.6, 0.12}, {0.05, 0.12, 0.8}};
    return spec;
}

}  // namespace

TEST_CASE("spec validation", "[sbm]") {
    CHECK(validate_spec(table1_spec()).empty());
    CHECK(validate_spec(table2_spec()).empty());

    BlockModelSpec assort = table1_spec();
    assort.link_probs[0][1] = assort.link_probs[1][0] = 0.3;  // exceeds B11 = 0.2
    const auto v1 = validate_spec(assort);
    REQUIRE_FALSE(v1.empty());
    CHECK(v1[0].find("assortativity") != std::string::npos);

    BlockModelSpec asym = table1_spec();
    asym.link_probs[0][1] = 0.04;
    const auto v2 = validate_spec(asym);
    REQUIRE_FALSE(v2.empty());
    CHECK(v2[0].find("symmetric") != std::string::npos);

    BlockModelSpec zero = table1_spec();
    zero.sizes[1] = 0;
    CHECK_FALSE(validate_spec(zero).empty());

    BlockModelSpec range = table1_spec();
    range.link_probs[0][0] = 1.5;
    CHECK_FALSE(validate_spec(range).empty());
}

TEST_CASE("expected density", "[sbm]") {
    CHECK_THAT(expected_density(table1_spec()), Catch::Matchers::WithinAbs(0.1597, 5e-4));
    CHECK_THAT(expected_density(table2_spec()), Catch::Matchers::WithinAbs(0.1546, 5e-4));

    BlockModelSpec single;
    single.sizes = {17};
    single.link_probs = {{0.42}};
    CHECK_THAT(expected_density(single), Catch::Matchers::WithinAbs(0.42, 1e-15));

    BlockModelSpec bad = table1_spec();
    bad.link_probs[0][0] = -1.0;
    CHECK_THROWS_AS(expected_density(bad), std::invalid_argument);
}

TEST_CASE("generation extremes", "[sbm]") {
    BlockModelSpec zeros;
    zeros.sizes = {4, 3};
    zeros.link_probs = {{0.0, 0.0}, {0.0, 0.0}};
    const GeneratedNetwork empty = generate(zeros, 5);
    CHECK(empty.graph.edge_count() == 0);
    CHECK(empty.graph.node_count() == 7);

    BlockModelSpec ones;
    ones.sizes = {3, 3};
    ones.link_probs = {{1.0, 1.0}, {1.0, 1.0}};
    const GeneratedNetwork full = generate(ones, 5);
    CHECK(full.graph.edge_count() == 15);
}

TEST_CASE("generation structure and determinism", "[sbm]") {
    const BlockModelSpec spec = table1_spec();
    const GeneratedNetwork a = generate(spec, 42);
    const GeneratedNetwork b = generate(spec, 42);
    CHECK(a.graph.edges() == b.graph.edges());
    CHECK(a.truth.membership == b.truth.membership);

    const GeneratedNetwork c = generate(spec, 43);
    CHECK(a.graph.edges() != c.graph.edges());

    CHECK(a.truth.sizes == std::vector<NodeId>{100, 10, 10});
    for (NodeId i = 0; i < 100; ++i) CHECK(a.truth.membership[static_cast<std::size_t>(i)] == 0);
    CHECK_THAT(a.expected_density, Catch::Matchers::WithinAbs(0.1597, 5e-4));
}

TEST_CASE("edge counts concentrate around the expectation", "[sbm]") {
    const BlockModelSpec spec = table1_spec();
    double expected = 0.0, variance = 0.0;
    const std::size_t h = spec.sizes.size();
    for (std::size_t k = 0; k < h; ++k)
        for (std::size_t l = k; l < h; ++l) {
            const double pairs =
                k == l ? static_cast<double>(spec.sizes[k]) * (spec.sizes[k] - 1.0) / 2.0
                       : static_cast<double>(spec.sizes[k]) * static_cast<double>(spec.sizes[l]);
            const double prob = spec.link_probs[k][l];
            expected += pairs * prob;
            variance += pairs * prob * (1.0 - prob);
        }
    const double sd = std::sqrt(variance);

    int outside = 0;
    for (int seed = 0; seed < 200; ++seed) {
        const GeneratedNetwork net = generate(spec, 1000 + static_cast<std::uint64_t>(seed));
        const double z = (static_cast<double>(net.graph.edge_count()) - expected) / sd;
        if (std::abs(z) > 4.0) ++outside;
    }
    CHECK(outside <= 2);  // >= 99% inside four standard deviations
}

TEST_CASE("per-block densities concentrate", "[sbm]") {
    const BlockModelSpec spec = table2_spec();
    for (int seed = 0; seed < 5; ++seed) {
        const GeneratedNetwork net = generate(spec, 7000 + static_cast<std::uint64_t>(seed));
        const auto& truth = net.truth;
        for (std::size_t k = 0; k < spec.sizes.size(); ++k)
            for (std::size_t l = k; l < spec.sizes.size(); ++l) {
                const double pairs =
                    k == l ? static_cast<double>(spec.sizes[k]) * (spec.sizes[k] - 1.0) / 2.0
                           : static_cast<double>(spec.sizes[k]) * static_cast<double>(spec.sizes[l]);
                if (pairs < 100.0) continue;
                const double prob = spec.link_probs[k][l];
                std::int64_t observed = 0;
                if (k == l) {
                    observed = internal_edge_count(net.graph, truth.community(static_cast<NodeId>(k)));
                } else {
                    observed = cut(net.graph, truth.community(static_cast<NodeId>(k)),
                                   truth.community(static_cast<NodeId>(l)));
                }
                const double sd = std::sqrt(pairs * prob * (1.0 - prob));
                CHECK(std::abs(static_cast<double>(observed) - pairs * prob) <= 5.0 * sd);
            }
    }
}

TEST_CASE("shuffled generation permutes labels consistently", "[sbm]") {
    const BlockModelSpec spec = table1_spec();
    const GeneratedNetwork net = generate(spec, 11, /*shuffle=*/true);
    CHECK(net.graph.node_count() == 120);
    // Sizes are preserved even though labels moved.
    std::vector<NodeId> counts(3, 0);
    for (NodeId c : net.truth.membership) ++counts[static_cast<std::size_t>(c)];
    std::sort(counts.begin(), counts.end());
    CHECK(counts == std::vector<NodeId>{10, 10, 100});
    // Not community-contiguous anymore (overwhelmingly likely).
    bool contiguous = true;
    for (NodeId i = 1; i < 120; ++i)
        if (net.truth.membership[static_cast<std::size_t>(i)] <
            net.truth.membership[static_cast<std::size_t>(i - 1)])
            contiguous = false;
    CHECK_FALSE(contiguous);
}
