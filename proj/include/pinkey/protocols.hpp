#ifndef PINKEY_PROTOCOLS_HPP
#define PINKEY_PROTOCOLS_HPP

// The three key agreement protocols, run as deterministic simulations over a
// public channel. Every public bit is recorded together with its GF(2) form over
// the run's source bits, and every run is audited before it is returned:
//  - each recorded form evaluates to the bit actually sent,
//  - each pad bit masks at most one public bit,
//  - every key holder can rebuild the key from its own bits and the transcript.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pinkey/bounds.hpp"
#include "pinkey/errors.hpp"
#include "pinkey/gf2.hpp"
#include "pinkey/graph.hpp"
#include "pinkey/model.hpp"
#include "pinkey/rational.hpp"
#include "pinkey/transcript.hpp"

namespace pinkey {

struct ProtocolStats {
    std::uint64_t iterations = 0;  // group: spanning trees used
    std::uint64_t flow_value = 0;  // subgroup: max-flow value
    std::vector<FlowPath> paths;
    std::vector<SpanningTree> trees;
    WeightedGraph residual;  // group: graph left when the loop stopped
    std::optional<Rational> bound;
    std::optional<Rational> gap;
};

struct GroupKeyResult {
    std::vector<TerminalId> holders;
    std::vector<std::uint8_t> key;
    std::vector<LinearForm> key_forms;
    Transcript transcript;
    ProtocolStats stats;

    std::size_t key_length() const noexcept { return key.size(); }
};

/// Rebuilds the key bits defined by `key_forms` using only what `holder` knows:
/// its own pairwise keys and local randomness, plus the public transcript.
/// Returns nullopt if some key bit is not determined by that knowledge.
inline std::optional<std::vector<std::uint8_t>> replay_key(const SourceBitBasis& basis, const Transcript& transcript,
                                                           TerminalId holder,
                                                           std::span<const LinearForm> key_forms) {
    // Only basis bits that occur somewhere matter; compact them into columns.
    std::map<BasisIndex, BasisIndex> column;
    auto note = [&](const LinearForm& f) {
        for (auto i : f.terms()) column.emplace(i, 0);
    };
    for (const auto& m : transcript.messages())
        for (const auto& f : m.forms) note(f);
    for (const auto& f : key_forms) note(f);
    BasisIndex next = 0;
    for (auto& [idx, col] : column) col = next++;
    auto remap = [&](const LinearForm& f) {
        std::vector<BasisIndex> terms;
        for (auto i : f.terms()) terms.push_back(column.at(i));
        return LinearForm::of(std::move(terms));
    };

    Gf2Span knowledge(column.size());
    for (const auto& [idx, col] : column)
        if (basis.label(idx).visible_to(holder)) knowledge.insert(LinearForm::of(col), basis.value(idx));
    for (const auto& m : transcript.messages())
        for (std::size_t n = 0; n < m.forms.size(); ++n) knowledge.insert(remap(m.forms[n]), m.payload[n] != 0);

    std::vector<std::uint8_t> key;
    for (const auto& f : key_forms) {
        const auto bit = knowledge.solve(remap(f));
        if (!bit) return std::nullopt;
        key.push_back(*bit ? 1 : 0);
    }
    return key;
}

/// Runtime self-checks shared by every protocol; throws InvariantViolation.
inline void audit(const GroupKeyResult& r, const SourceBitBasis& basis) {
    if (r.key_forms.size() != r.key.size()) throw InvariantViolation("key form count differs from key length");
    for (std::size_t n = 0; n < r.key.size(); ++n)
        if (r.key_forms[n].evaluate(basis) != (r.key[n] != 0))
            throw InvariantViolation("key form " + std::to_string(n) + " does not evaluate to the key bit");

    std::set<BasisIndex> masks;
    for (const auto& m : r.transcript.messages()) {
        for (std::size_t n = 0; n < m.forms.size(); ++n)
            if (m.forms[n].evaluate(basis) != (m.payload[n] != 0))
                throw InvariantViolation("public form does not evaluate to the transmitted bit");
        if (m.masks.size() != m.payload.size()) throw InvariantViolation("public bit without a recorded pad");
        for (std::size_t n = 0; n < m.masks.size(); ++n) {
            if (!m.forms[n].contains(m.masks[n])) throw InvariantViolation("pad bit missing from its form");
            if (!masks.insert(m.masks[n]).second)
                throw InvariantViolation("pad bit " + basis.label(m.masks[n]).str() + " reused");
        }
    }

    for (auto h : r.holders) {
        const auto rebuilt = replay_key(basis, r.transcript, h, r.key_forms);
        if (!rebuilt || *rebuilt != r.key)
            throw InvariantViolation("terminal " + std::to_string(h) + " cannot rebuild the key");
    }
    if (r.stats.gap && *r.stats.gap < 0) throw InvariantViolation("key longer than its upper bound");
}

namespace detail {

inline void check_store(const PairwiseKeyStore& store, const NetworkSpec& spec) {
    if (store.terminals() != spec.terminals())
        throw ValidationError("store", "key store and network disagree on terminal count");
}

inline void append_key_bits(GroupKeyResult& r, const KeyBits& bits) {
    r.key.insert(r.key.end(), bits.values.begin(), bits.values.end());
    for (auto l : bits.labels) r.key_forms.push_back(LinearForm::of(l));
}

inline void set_bound(GroupKeyResult& r, const Rational& bound) {
    r.stats.bound = bound;
    r.stats.gap = bound - Rational(static_cast<std::int64_t>(r.key.size()));
}

// One public message carrying `data ^ pad`, bit by bit.
inline PublicMessage padded_message(TerminalId from, TerminalId to, std::uint64_t round,
                                    std::span<const std::uint8_t> data, std::span<const LinearForm> data_forms,
                                    const KeyBits& pad) {
    PublicMessage m;
    m.sender = from;
    m.receiver = to;
    m.round = round;
    for (std::size_t n = 0; n < pad.size(); ++n) {
        m.payload.push_back(data[n] ^ pad.values[n]);
        m.forms.push_back(data_forms[n] ^ LinearForm::of(pad.labels[n]));
        m.masks.push_back(pad.labels[n]);
    }
    return m;
}

} // namespace detail

/// Star network centered at terminal 0. The shortest leaf key K_{0,i*} becomes the
/// group key; the center sends every other leaf the XOR of K_{0,i*} with the
/// first |K_{0,i*}| bits of that leaf's key. Ties for i* go to the smallest id.
inline GroupKeyResult run_broadcast(PairwiseKeyStore& store, const NetworkSpec& spec) {
    detail::check_store(store, spec);
    const auto bound = broadcast_bound(spec);  // throws NotAStar
    const auto m = spec.terminals();
    const auto leaf = bound.witness.blocks[1].front();
    const auto length = spec.budget(0, leaf);

    GroupKeyResult r;
    r.holders = all_terminals(m);
    const auto key = store.consume(0, leaf, length);
    detail::append_key_bits(r, key);
    if (length > 0) {
        for (TerminalId i = 1; i < m; ++i) {
            if (i == leaf) continue;
            const auto prefix = store.consume(0, i, length);
            r.transcript.append(detail::padded_message(0, i, 0, r.key, r.key_forms, prefix));
        }
    }
    detail::set_bound(r, bound.value);
    audit(r, store.basis());
    return r;
}

/// Two-terminal key between s and t with every other terminal relaying. Terminal
/// s draws F fresh random bits (F = max flow of the budget graph) and routes
/// them along the flow's path decomposition; on every hop the sender one-time
/// pads the bits with the next unused bits of the hop's pairwise key and the
/// receiver strips the pad before forwarding. Hops are sent in rounds by hop
/// depth, paths in lexicographic order within a round.
inline GroupKeyResult run_subgroup(PairwiseKeyStore& store, const NetworkSpec& spec, TerminalId s, TerminalId t,
                                   std::uint64_t seed) {
    detail::check_store(store, spec);
    const auto bound = subgroup_bound(spec, s, t);
    const auto flow = max_flow(WeightedGraph::from(spec), s, t);

    GroupKeyResult r;
    r.holders = {s, t};
    detail::append_key_bits(r, draw_local_bits(store, s, flow.value, seed));

    struct InFlight {
        const FlowPath* path;
        std::vector<std::uint8_t> bits;  // as decrypted by the current holder
        std::vector<LinearForm> forms;
    };
    std::vector<InFlight> inflight;
    std::size_t offset = 0;
    std::size_t longest = 0;
    for (const auto& p : flow.paths) {
        const auto begin = static_cast<std::ptrdiff_t>(offset);
        const auto end = static_cast<std::ptrdiff_t>(offset + p.amount);
        inflight.push_back({&p, {r.key.begin() + begin, r.key.begin() + end},
                            {r.key_forms.begin() + begin, r.key_forms.begin() + end}});
        offset += p.amount;
        longest = std::max(longest, p.nodes.size() - 1);
    }

    for (std::size_t hop = 0; hop < longest; ++hop) {
        for (auto& f : inflight) {
            if (hop + 1 >= f.path->nodes.size()) continue;
            const auto from = f.path->nodes[hop], to = f.path->nodes[hop + 1];
            const auto pad = store.consume(from, to, f.bits.size());
            auto msg = detail::padded_message(from, to, hop, f.bits, f.forms, pad);
            // the receiver strips its copy of the pad
            for (std::size_t n = 0; n < pad.size(); ++n) f.bits[n] = msg.payload[n] ^ pad.values[n];
            r.transcript.append(std::move(msg));
        }
    }

    r.stats.flow_value = flow.value;
    r.stats.paths = flow.paths;
    detail::set_bound(r, bound.value);
    audit(r, store.basis());
    return r;
}

struct SingleBitRound {
    BasisIndex bit;  // the shared bit that every terminal ends up knowing
    Transcript messages;
};

inline void check_spanning_tree(const SpanningTree& tree, std::size_t nodes) {
    if (tree.edges.size() + 1 != nodes) throw ValidationError("tree", "a spanning tree needs m-1 edges");
    DisjointSets ds(nodes);
    for (auto p : tree.edges) {
        if (p.hi >= nodes) throw ValidationError("tree", "edge endpoint out of range");
        if (!ds.unite(p.lo, p.hi)) throw ValidationError("tree", "edges contain a cycle");
    }
}

/// Spreads one secret bit over a spanning tree. The lexicographically smallest
/// tree edge (i*,j*) supplies the bit B; one bit is consumed from every tree
/// edge's key; then, breadth-first from {i*, j*} with children in id order, each
/// node that knows B sends B ^ B_uv to each tree neighbor v that does not.
/// Round numbers are `first_round` plus the sender's distance from the edge.
inline SingleBitRound single_bit_round(const SpanningTree& tree, PairwiseKeyStore& store, const NetworkSpec& spec,
                                       std::uint64_t first_round = 0) {
    detail::check_store(store, spec);
    const auto m = spec.terminals();
    check_spanning_tree(tree, m);
    for (auto p : tree.edges)
        if (store.remaining(p.lo, p.hi) < 1)
            throw InsufficientKeyMaterial("tree edge (" + std::to_string(p.lo) + "," + std::to_string(p.hi) +
                                          ") has no key bits left");

    std::map<Pair, KeyBits> bits;
    for (auto p : tree.edges) bits.emplace(p, store.consume(p.lo, p.hi, 1));
    const auto selected = *std::min_element(tree.edges.begin(), tree.edges.end());
    const auto& secret = bits.at(selected);

    std::vector<std::vector<TerminalId>> adj(m);
    for (auto p : tree.edges) {
        adj[p.lo].push_back(p.hi);
        adj[p.hi].push_back(p.lo);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    SingleBitRound out{secret.labels[0], {}};
    std::vector<std::optional<std::uint64_t>> depth(m);
    std::queue<TerminalId> frontier;
    for (auto n : {selected.lo, selected.hi}) {
        depth[n] = 0;
        frontier.push(n);
    }
    const std::vector<LinearForm> secret_form{LinearForm::of(secret.labels[0])};
    while (!frontier.empty()) {
        const auto u = frontier.front();
        frontier.pop();
        for (auto v : adj[u]) {
            if (depth[v]) continue;
            depth[v] = *depth[u] + 1;
            out.messages.append(
                detail::padded_message(u, v, first_round + *depth[u], secret.values, secret_form, bits.at(Pair::of(u, v))));
            frontier.push(v);
        }
    }
    return out;
}

/// Picks the spanning tree for one iteration of run_group_key. Must return a
/// maximum spanning tree of the residual graph it is given.
using TreeSelector = std::function<SpanningTree(const WeightedGraph&)>;

/// Group key for all terminals: while the residual budget graph is connected,
/// choose a maximum spanning tree, spread one bit over it with
/// single_bit_round, and decrement the tree's edges (dropping zero edges). The
/// key is the sequence of spread bits, one per iteration.
inline GroupKeyResult run_group_key(PairwiseKeyStore& store, const NetworkSpec& spec, const TreeSelector& select) {
    detail::check_store(store, spec);
    const auto m = spec.terminals();
    GroupKeyResult r;
    r.holders = all_terminals(m);
    auto residual = WeightedGraph::from(spec);

    while (is_connected(residual)) {
        auto tree = select(residual);
        check_spanning_tree(tree, m);
        const auto best = maximum_spanning_tree(residual).weight(residual);
        for (auto p : tree.edges)
            if (residual.weight(p.lo, p.hi) == 0) throw ValidationError("tree", "selected tree uses a spent edge");
        if (tree.weight(residual) != best) throw ValidationError("tree", "selected tree is not a maximum spanning tree");

        auto round = single_bit_round(tree, store, spec, r.transcript.next_round());
        r.key.push_back(store.basis().value(round.bit) ? 1 : 0);
        r.key_forms.push_back(LinearForm::of(round.bit));
        r.transcript.append(round.messages);
        for (auto p : tree.edges) residual.decrement(p);
        r.stats.trees.push_back(std::move(tree));
    }
    r.stats.iterations = r.stats.trees.size();
    r.stats.residual = std::move(residual);

    if (m <= kPartitionMaxNodes) {
        detail::set_bound(r, group_bound(spec).value);
        if (static_cast<std::int64_t>(r.key.size()) > floor(*r.stats.bound))
            throw InvariantViolation("group key exceeds the multi-cut bound");
    }
    audit(r, store.basis());
    return r;
}

inline GroupKeyResult run_group_key(PairwiseKeyStore& store, const NetworkSpec& spec,
                                    TieBreak tie_break = TieBreak::lex_kruskal) {
    return run_group_key(store, spec,
                         [tie_break](const WeightedGraph& g) { return maximum_spanning_tree(g, tie_break); });
}

} // namespace pinkey

#endif
