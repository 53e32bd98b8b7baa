#include <gtest/gtest.h>

#include <random>

#include "pinkey/bounds.hpp"
#include "support/generators.hpp"

namespace pinkey {
namespace {

NetworkSpec star(std::initializer_list<std::uint64_t> leaves) {
    NetworkSpec spec(leaves.size() + 1);
    TerminalId i = 1;
    for (auto b : leaves) spec.set_budget(0, i++, b);
    return spec;
}

TEST(BroadcastBound, MinimumLeaf) {
    const auto r = broadcast_bound(star({7, 5, 9}));
    EXPECT_EQ(r.value, Rational(5));
    EXPECT_EQ(r.witness.str(), "{0,1,3}|{2}");
    EXPECT_EQ(normalized_weight(WeightedGraph::from(star({7, 5, 9})), r.witness), r.value);
}

TEST(BroadcastBound, TwoTerminals) { EXPECT_EQ(broadcast_bound(star({5})).value, Rational(5)); }

TEST(BroadcastBound, ZeroLeaf) { EXPECT_EQ(broadcast_bound(star({3, 0, 4})).value, Rational(0)); }

TEST(BroadcastBound, RejectsNonStars) { EXPECT_THROW(broadcast_bound(testing::triangle_5_4_3()), NotAStar); }

TEST(SubgroupBound, Triangle) {
    const auto r = subgroup_bound(testing::triangle_5_4_3(), 0, 2);
    EXPECT_EQ(r.value, Rational(7));
    EXPECT_EQ(r.witness.str(), "{0,1}|{2}");
}

TEST(SubgroupBound, SingleEdgeAndDisconnected) {
    EXPECT_EQ(subgroup_bound(star({5}), 0, 1).value, Rational(5));
    NetworkSpec spec(4);
    spec.set_budget(0, 1, 2);
    spec.set_budget(2, 3, 2);
    EXPECT_EQ(subgroup_bound(spec, 0, 3).value, Rational(0));
}

TEST(SubgroupBound, EqualsMaxFlow) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = static_cast<std::size_t>(testing::uniform(rng, 2, 7));
        const auto spec = testing::random_spec(rng, m, 8);
        const auto r = subgroup_bound(spec, 0, m - 1);
        EXPECT_EQ(r.value, Rational(static_cast<std::int64_t>(max_flow(WeightedGraph::from(spec), 0, m - 1).value)));
        EXPECT_EQ(Rational(static_cast<std::int64_t>(crossing_weight(WeightedGraph::from(spec), r.witness))), r.value);
    }
}

TEST(GroupBound, ReferenceInstances) {
    EXPECT_EQ(group_bound(testing::triangle_5_4_3()).value, Rational(6));
    EXPECT_EQ(group_bound(testing::complete(4, 1)).value, Rational(2));
    EXPECT_EQ(group_bound(testing::complete(4, 4)).value, Rational(8));  // m=4, u=2
}

TEST(GroupBound, GuardIsAnError) { EXPECT_THROW(group_bound(testing::complete(13, 1)), InstanceTooLarge); }

TEST(GroupBound, EqualsBroadcastBoundOnStars) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const auto spec = testing::random_star(rng, testing::uniform(rng, 2, 8), 9);
        EXPECT_EQ(group_bound(spec).value, broadcast_bound(spec).value) << "trial " << trial;
    }
}

TEST(CutBounds, GroupBoundIsBelowMinCutAndAverage) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = static_cast<std::size_t>(testing::uniform(rng, 2, 6));
        const auto spec = testing::random_spec(rng, m, 8);
        const auto g = WeightedGraph::from(spec);
        const auto gb = group_bound(spec).value;
        EXPECT_LE(gb, Rational(static_cast<std::int64_t>(global_min_cut(g))));
        EXPECT_LE(gb, total_weight_bound(g));
    }
}

TEST(EntropyDecomposition, BitCountingMatchesMulticutWeight) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = static_cast<std::size_t>(testing::uniform(rng, 2, 6));
        const auto spec = testing::random_spec(rng, m, 5);
        const auto store = generate_pairwise_keys(spec, trial);
        const auto g = WeightedGraph::from(spec);
        EXPECT_EQ(observation_entropy_bits(store, all_terminals(m)), spec.total_budget());
        for (const auto& p : enumerate_partitions(m, all_terminals(m)))
            EXPECT_EQ(partition_entropy_excess(store, p), static_cast<std::int64_t>(crossing_weight(g, p)))
                << p.str();
    }
}

} // namespace
} // namespace pinkey
