#include <gtest/gtest.h>

#include <random>

#include "pinkey/protocols.hpp"
#include "pinkey/secrecy.hpp"
#include "support/generators.hpp"

namespace pinkey {
namespace {

SpanningTree tree(std::initializer_list<std::pair<TerminalId, TerminalId>> edges) {
    SpanningTree t;
    for (auto [a, b] : edges) t.edges.push_back(Pair::of(a, b));
    std::sort(t.edges.begin(), t.edges.end());
    return t;
}

std::string form_text(const PairwiseKeyStore& store, const LinearForm& f) { return f.str(store.basis()); }

void expect_secret(const GroupKeyResult& r, const PairwiseKeyStore& store) {
    const auto forms = r.transcript.forms();
    const auto rep = verify_independence(r.key_forms, forms, store.basis());
    EXPECT_EQ(rep.leaked_bits, 0u);
    EXPECT_TRUE(rep.uniform);
}

TEST(RunBroadcast, ShortestLeafKeyIsRelayed) {
    NetworkSpec spec(4);
    spec.set_budget(0, 1, 7);
    spec.set_budget(0, 2, 5);
    spec.set_budget(0, 3, 9);
    auto store = generate_pairwise_keys(spec, 3);
    const auto r = run_broadcast(store, spec);
    EXPECT_EQ(r.key, store.key_values(0, 2));
    ASSERT_EQ(r.transcript.size(), 2u);
    for (const auto& m : r.transcript.messages()) EXPECT_EQ(m.payload.size(), 5u);
    EXPECT_EQ(*r.transcript.messages()[0].receiver, 1u);
    EXPECT_EQ(*r.transcript.messages()[1].receiver, 3u);
    EXPECT_EQ(form_text(store, r.transcript.messages()[0].forms[0]), "k0.1:0^k0.2:0");
    EXPECT_EQ(*r.stats.gap, Rational(0));
    for (TerminalId h = 0; h < 4; ++h) EXPECT_EQ(replay_key(store.basis(), r.transcript, h, r.key_forms), r.key);
    expect_secret(r, store);
}

TEST(RunBroadcast, TieGoesToSmallestLeaf) {
    NetworkSpec spec(3);
    spec.set_budget(0, 1, 4);
    spec.set_budget(0, 2, 4);
    auto store = generate_pairwise_keys(spec, 1);
    EXPECT_EQ(run_broadcast(store, spec).key, store.key_values(0, 1));
}

TEST(RunBroadcast, TwoTerminals) {
    NetworkSpec spec(2);
    spec.set_budget(0, 1, 6);
    auto store = generate_pairwise_keys(spec, 1);
    const auto r = run_broadcast(store, spec);
    EXPECT_EQ(r.key_length(), 6u);
    EXPECT_TRUE(r.transcript.empty());
}

TEST(RunBroadcast, ZeroLeafGivesEmptyKey) {
    NetworkSpec spec(4);
    spec.set_budget(0, 1, 3);
    spec.set_budget(0, 3, 4);
    auto store = generate_pairwise_keys(spec, 1);
    const auto r = run_broadcast(store, spec);
    EXPECT_EQ(r.key_length(), 0u);
    EXPECT_TRUE(r.transcript.empty());
    EXPECT_EQ(*r.stats.bound, Rational(0));
    EXPECT_EQ(*r.stats.gap, Rational(0));
}

TEST(RunBroadcast, RejectsNonStar) {
    const auto spec = testing::triangle_5_4_3();
    auto store = generate_pairwise_keys(spec, 1);
    EXPECT_THROW(run_broadcast(store, spec), NotAStar);
}

TEST(RunSubgroup, TriangleRoutesSevenBits) {
    const auto spec = testing::triangle_5_4_3();
    auto store = generate_pairwise_keys(spec, 7);
    const auto r = run_subgroup(store, spec, 0, 2, 7);
    EXPECT_EQ(r.key_length(), 7u);
    EXPECT_EQ(r.stats.flow_value, 7u);
    EXPECT_EQ(r.transcript.total_bits(), 10u);  // 4 direct + 3 + 3 relayed
    ASSERT_EQ(r.transcript.size(), 3u);
    const auto& hop2 = r.transcript.messages()[2];
    EXPECT_EQ(hop2.sender, 1u);
    EXPECT_EQ(*hop2.receiver, 2u);
    EXPECT_EQ(hop2.round, 1u);
    EXPECT_EQ(form_text(store, hop2.forms[0]), "k1.2:0^r0:0");
    EXPECT_EQ(r.holders, (std::vector<TerminalId>{0, 2}));
    EXPECT_EQ(replay_key(store.basis(), r.transcript, 2, r.key_forms), r.key);
    expect_secret(r, store);
}

TEST(RunSubgroup, SingleEdge) {
    NetworkSpec spec(2);
    spec.set_budget(0, 1, 5);
    auto store = generate_pairwise_keys(spec, 1);
    const auto r = run_subgroup(store, spec, 0, 1, 1);
    EXPECT_EQ(r.key_length(), 5u);
    EXPECT_EQ(r.transcript.total_bits(), 5u);
}

TEST(RunSubgroup, DisconnectedGivesEmptyKey) {
    NetworkSpec spec(4);
    spec.set_budget(0, 1, 2);
    spec.set_budget(2, 3, 2);
    auto store = generate_pairwise_keys(spec, 1);
    const auto r = run_subgroup(store, spec, 0, 3, 1);
    EXPECT_EQ(r.key_length(), 0u);
    EXPECT_TRUE(r.transcript.empty());
}

TEST(RunSubgroup, OutsidersCannotRebuildTheKey) {
    NetworkSpec spec(4);
    spec.set_budget(0, 1, 3);
    spec.set_budget(1, 2, 3);
    spec.set_budget(2, 3, 1);
    auto store = generate_pairwise_keys(spec, 2);
    const auto r = run_subgroup(store, spec, 0, 2, 2);
    EXPECT_EQ(r.key_length(), 3u);
    EXPECT_FALSE(replay_key(store.basis(), r.transcript, 3, r.key_forms));
}

TEST(SingleBitRound, PathTree) {
    NetworkSpec spec(3);
    spec.set_budget(0, 1, 1);
    spec.set_budget(1, 2, 1);
    auto store = generate_pairwise_keys(spec, 1);
    const auto round = single_bit_round(tree({{0, 1}, {1, 2}}), store, spec);
    EXPECT_EQ(store.basis().label(round.bit).str(), "k0.1:0");
    ASSERT_EQ(round.messages.size(), 1u);
    const auto& m = round.messages.messages()[0];
    EXPECT_EQ(m.sender, 1u);
    EXPECT_EQ(*m.receiver, 2u);
    EXPECT_EQ(form_text(store, m.forms[0]), "k0.1:0^k1.2:0");
}

TEST(SingleBitRound, SingleEdgeSendsNothing) {
    NetworkSpec spec(2);
    spec.set_budget(0, 1, 2);
    auto store = generate_pairwise_keys(spec, 1);
    const auto round = single_bit_round(tree({{0, 1}}), store, spec);
    EXPECT_TRUE(round.messages.empty());
    EXPECT_EQ(store.remaining(0, 1), 1u);
}

TEST(SingleBitRound, StarTreeSendsFromCenter) {
    const auto spec = testing::complete(4, 1);
    auto store = generate_pairwise_keys(spec, 1);
    const auto round = single_bit_round(tree({{0, 1}, {0, 2}, {0, 3}}), store, spec);
    ASSERT_EQ(round.messages.size(), 2u);
    EXPECT_EQ(form_text(store, round.messages.messages()[0].forms[0]), "k0.1:0^k0.2:0");
    EXPECT_EQ(form_text(store, round.messages.messages()[1].forms[0]), "k0.1:0^k0.3:0");
    for (const auto& m : round.messages.messages()) EXPECT_EQ(m.sender, 0u);
}

TEST(SingleBitRound, EveryNodeLearnsTheBitOnRandomTrees) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = static_cast<std::size_t>(testing::uniform(rng, 2, 8));
        const auto spec = testing::random_connected_spec(rng, m, 3);
        auto store = generate_pairwise_keys(spec, trial);
        const auto t = maximum_spanning_tree(WeightedGraph::from(spec));
        const auto round = single_bit_round(t, store, spec);
        EXPECT_EQ(round.messages.size(), m - 2);
        const std::vector<LinearForm> key{LinearForm::of(round.bit)};
        for (TerminalId h = 0; h < m; ++h) {
            const auto got = replay_key(store.basis(), round.messages, h, key);
            ASSERT_TRUE(got) << "terminal " << h;
            EXPECT_EQ((*got)[0] != 0, store.basis().value(round.bit));
        }
    }
}

TEST(SingleBitRound, InsufficientKeyMaterial) {
    NetworkSpec spec(3);
    spec.set_budget(0, 1, 1);
    spec.set_budget(1, 2, 1);
    auto store = generate_pairwise_keys(spec, 1);
    single_bit_round(tree({{0, 1}, {1, 2}}), store, spec);
    EXPECT_THROW(single_bit_round(tree({{0, 1}, {1, 2}}), store, spec), InsufficientKeyMaterial);
}

TEST(SingleBitRound, RejectsNonTrees) {
    const auto spec = testing::complete(4, 2);
    auto store = generate_pairwise_keys(spec, 1);
    EXPECT_THROW(single_bit_round(tree({{0, 1}, {1, 2}}), store, spec), ValidationError);
    EXPECT_THROW(single_bit_round(tree({{0, 1}, {1, 2}, {0, 2}}), store, spec), ValidationError);
}

TEST(RunGroupKey, TriangleIsOptimalUnderEitherPolicy) {
    for (auto policy : {TieBreak::lex_kruskal, TieBreak::degree_min}) {
        const auto spec = testing::triangle_5_4_3();
        auto store = generate_pairwise_keys(spec, 7);
        const auto r = run_group_key(store, spec, policy);
        EXPECT_EQ(r.key_length(), 6u);
        EXPECT_EQ(r.stats.iterations, 6u);
        EXPECT_EQ(*r.stats.gap, Rational(0));
        expect_secret(r, store);
    }
}

TEST(RunGroupKey, HandPickedTreeSequenceReproducesKnownTranscript) {
    // Trees chosen in the worked three-terminal example, 0-indexed.
    const std::vector<SpanningTree> sequence{tree({{0, 1}, {0, 2}}), tree({{0, 1}, {0, 2}}), tree({{0, 1}, {1, 2}}),
                                             tree({{0, 1}, {1, 2}}), tree({{0, 2}, {1, 2}}), tree({{0, 1}, {0, 2}})};
    std::size_t next = 0;
    const auto spec = testing::triangle_5_4_3();
    auto store = generate_pairwise_keys(spec, 7);
    const auto r = run_group_key(store, spec, [&](const WeightedGraph&) { return sequence.at(next++); });
    std::vector<std::string> sent, key;
    for (const auto& f : r.transcript.forms()) sent.push_back(form_text(store, f));
    for (const auto& f : r.key_forms) key.push_back(form_text(store, f));
    EXPECT_EQ(sent, (std::vector<std::string>{"k0.1:0^k0.2:0", "k0.1:1^k0.2:1", "k0.1:2^k1.2:0", "k0.1:3^k1.2:1",
                                              "k0.2:2^k1.2:2", "k0.1:4^k0.2:3"}));
    EXPECT_EQ(key, (std::vector<std::string>{"k0.1:0", "k0.1:1", "k0.1:2", "k0.1:3", "k0.2:2", "k0.1:4"}));
}

TEST(RunGroupKey, StarFirstOnUnitK4GivesOneBit) {
    const auto spec = testing::complete(4, 1);
    auto store = generate_pairwise_keys(spec, 1);
    const auto star = tree({{0, 1}, {0, 2}, {0, 3}});
    const auto r = run_group_key(store, spec, [&](const WeightedGraph& g) {
        return g.edges().size() == 6 ? star : maximum_spanning_tree(g);
    });
    EXPECT_EQ(r.key_length(), 1u);
    EXPECT_FALSE(is_connected(r.stats.residual));
    EXPECT_EQ(*r.stats.gap, Rational(1));
}

TEST(RunGroupKey, DegreeMinOnUnitK4GivesTwoBits) {
    const auto spec = testing::complete(4, 1);
    auto store = generate_pairwise_keys(spec, 1);
    const auto r = run_group_key(store, spec, TieBreak::degree_min);
    EXPECT_EQ(r.key_length(), 2u);
    EXPECT_EQ(r.key_length(), optimal_tree_packing_bruteforce(WeightedGraph::from(spec)));
    expect_secret(r, store);
}

TEST(RunGroupKey, RejectsSelectorsThatAreNotMaximum) {
    const auto spec = testing::triangle_5_4_3();
    auto store = generate_pairwise_keys(spec, 1);
    EXPECT_THROW(run_group_key(store, spec, [](const WeightedGraph&) { return tree({{0, 2}, {1, 2}}); }),
                 ValidationError);
}

TEST(RunGroupKey, DisconnectedGivesEmptyKey) {
    NetworkSpec spec(3);
    spec.set_budget(0, 1, 4);
    auto store = generate_pairwise_keys(spec, 1);
    const auto r = run_group_key(store, spec);
    EXPECT_EQ(r.key_length(), 0u);
    EXPECT_TRUE(r.transcript.empty());
}

TEST(Protocols, RandomRunsAreSecretAndWithinBounds) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = static_cast<std::size_t>(testing::uniform(rng, 2, 5));
        const auto spec = testing::random_spec(rng, m, 6);
        {
            auto store = generate_pairwise_keys(spec, trial);
            const auto r = run_group_key(store, spec, trial % 2 ? TieBreak::degree_min : TieBreak::lex_kruskal);
            EXPECT_LE(static_cast<std::int64_t>(r.key_length()), floor(group_bound(spec).value));
            EXPECT_EQ(r.key_length(), r.stats.iterations);
            expect_secret(r, store);
        }
        {
            auto store = generate_pairwise_keys(spec, trial);
            const auto r = run_subgroup(store, spec, 0, m - 1, trial);
            EXPECT_EQ(Rational(static_cast<std::int64_t>(r.key_length())), subgroup_bound(spec, 0, m - 1).value);
            expect_secret(r, store);
        }
        {
            const auto star = testing::random_star(rng, m, 6);
            auto store = generate_pairwise_keys(star, trial);
            const auto r = run_broadcast(store, star);
            EXPECT_EQ(Rational(static_cast<std::int64_t>(r.key_length())), broadcast_bound(star).value);
            expect_secret(r, store);
        }
    }
}

TEST(Audit, CatchesPadReuseAndBadForms) {
    NetworkSpec spec(3);
    spec.set_budget(0, 1, 2);
    spec.set_budget(0, 2, 2);
    auto store = generate_pairwise_keys(spec, 1);
    const auto k01 = store.consume(0, 1, 2);
    const auto k02 = store.consume(0, 2, 2);

    GroupKeyResult r;
    r.holders = {0, 1};
    r.key = {k01.values[0]};
    r.key_forms = {LinearForm::of(k01.labels[0])};
    audit(r, store.basis());

    PublicMessage m;
    m.sender = 0;
    m.receiver = 2;
    m.payload = {static_cast<std::uint8_t>(k02.values[0] ^ k01.values[1])};
    m.forms = {LinearForm::of({k02.labels[0], k01.labels[1]})};
    m.masks = {k02.labels[0]};
    r.transcript.append(m);
    audit(r, store.basis());

    auto reused = r;
    reused.transcript.append(m);
    EXPECT_THROW(audit(reused, store.basis()), InvariantViolation);

    auto wrong = r;
    auto flipped = m;
    flipped.payload[0] ^= 1;
    wrong.transcript = {};
    wrong.transcript.append(flipped);
    EXPECT_THROW(audit(wrong, store.basis()), InvariantViolation);

    auto outsider = r;
    outsider.holders.push_back(2);
    EXPECT_THROW(audit(outsider, store.basis()), InvariantViolation);
}

} // namespace
} // namespace pinkey
