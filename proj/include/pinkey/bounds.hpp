#ifndef PINKEY_BOUNDS_HPP
#define PINKEY_BOUNDS_HPP

// Upper bounds on the group secret-key length, in bits, for the three cases.
//
// With pairwise-independent sources, the partition bound reduces to a graph
// quantity: for a partition (B_1..B_k) whose blocks each meet the key group A,
// sum_l H(X_{B_l}) - H(X) equals the total budget of the pairs split by the
// partition. The bound is the minimum of that weight over k-1.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinkey/errors.hpp"
#include "pinkey/gf2.hpp"
#include "pinkey/graph.hpp"
#include "pinkey/model.hpp"
#include "pinkey/rational.hpp"

namespace pinkey {

enum class BoundCase { broadcast, subgroup, group };

inline std::string to_string(BoundCase c) {
    switch (c) {
    case BoundCase::broadcast: return "broadcast";
    case BoundCase::subgroup: return "subgroup";
    case BoundCase::group: return "group";
    }
    return "?";
}

struct BoundReport {
    BoundCase bound_case = BoundCase::group;
    Rational value;
    Partition witness;
    std::string formula;
};

/// Value of a witness partition under the normalized multi-cut measure.
inline Rational normalized_weight(const WeightedGraph& g, const Partition& p) {
    return {static_cast<std::int64_t>(crossing_weight(g, p)), static_cast<std::int64_t>(p.k() - 1)};
}

/// Star network centered at terminal 0: the smallest leaf budget.
inline BoundReport broadcast_bound(const NetworkSpec& spec) {
    if (!spec.is_star(0)) throw NotAStar("broadcast case needs every positive budget to involve terminal 0");
    const auto m = spec.terminals();
    TerminalId argmin = 1;
    for (TerminalId i = 2; i < m; ++i)
        if (spec.budget(0, i) < spec.budget(0, argmin)) argmin = i;

    BoundReport r;
    r.bound_case = BoundCase::broadcast;
    r.value = static_cast<std::int64_t>(spec.budget(0, argmin));
    r.witness.blocks.resize(2);
    for (TerminalId n = 0; n < m; ++n)
        if (n != argmin) r.witness.blocks[0].push_back(n);
    r.witness.blocks[1] = {argmin};
    r.formula = "min_i budget(0,i)";
    return r;
}

/// Minimum s-t cut of the budget graph. Cross-checked against the exhaustive cut
/// oracle whenever the instance is within its guard.
inline BoundReport subgroup_bound(const NetworkSpec& spec, TerminalId s, TerminalId t) {
    spec.check_terminal(s);
    spec.check_terminal(t);
    const auto g = WeightedGraph::from(spec);
    const auto flow = max_flow(g, s, t);
    auto cut = min_st_cut(g, s, t);
    if (cut.value != flow.value)
        throw InvariantViolation("max-flow " + std::to_string(flow.value) + " != residual cut " +
                                 std::to_string(cut.value));
    if (g.nodes() <= kCutOracleMaxNodes) {
        const auto oracle = min_st_cut_bruteforce(g, s, t);
        if (oracle.value != flow.value)
            throw InvariantViolation("max-flow " + std::to_string(flow.value) + " != cut oracle " +
                                     std::to_string(oracle.value));
    }
    BoundReport r;
    r.bound_case = BoundCase::subgroup;
    r.value = static_cast<std::int64_t>(flow.value);
    r.witness = std::move(cut.witness);
    r.formula = "min s-t cut";
    return r;
}

/// Minimal normalized multi-cut over all partitions of all terminals.
inline BoundReport group_bound(const NetworkSpec& spec) {
    auto mc = min_normalized_multicut(WeightedGraph::from(spec));
    BoundReport r;
    r.bound_case = BoundCase::group;
    r.value = mc.value;
    r.witness = std::move(mc.witness);
    r.formula = "min normalized multi-cut";
    return r;
}

/// Weight of the lightest 2-block cut, via n-1 max-flow computations.
inline std::uint64_t global_min_cut(const WeightedGraph& g) {
    std::uint64_t best = g.total_weight();
    for (TerminalId t = 1; t < g.nodes(); ++t) best = std::min(best, max_flow(g, 0, t).value);
    return best;
}

/// Total budget over m-1: the all-singletons multi-cut.
inline Rational total_weight_bound(const WeightedGraph& g) {
    return {static_cast<std::int64_t>(g.total_weight()), static_cast<std::int64_t>(g.nodes() - 1)};
}

/// H(X_B) in bits, counted as the rank of every key bit visible to some terminal of
/// the block. Pairwise keys are independent uniform bits, so rank is entropy.
inline std::size_t observation_entropy_bits(const PairwiseKeyStore& store, std::span<const TerminalId> block) {
    const auto& basis = store.basis();
    Gf2Span span(basis.size());
    for (BasisIndex i = 0; i < basis.size(); ++i) {
        const auto& label = basis.label(i);
        if (label.kind != BitLabel::Kind::pair_key) continue;
        for (auto t : block)
            if (label.visible_to(t)) {
                span.insert(LinearForm::of(i));
                break;
            }
    }
    return span.rank();
}

/// sum over blocks of H(X_B) minus H(X_1..X_m), by bit counting.
inline std::int64_t partition_entropy_excess(const PairwiseKeyStore& store, const Partition& p) {
    std::int64_t sum = 0;
    for (const auto& b : p.blocks) sum += static_cast<std::int64_t>(observation_entropy_bits(store, b));
    const auto all = all_terminals(store.terminals());
    return sum - static_cast<std::int64_t>(observation_entropy_bits(store, all));
}

} // namespace pinkey

#endif
