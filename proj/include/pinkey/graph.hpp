#ifndef PINKEY_GRAPH_HPP
#define PINKEY_GRAPH_HPP

// Weighted undirected graphs over terminals, plus the combinatorial machinery the
// protocols and bounds need: max-flow/min-cut, maximum spanning trees, set
// partitions, normalized multi-cuts and brute-force oracles for small instances.
//
// Capacity graphs are undirected: a pair's budget is one shared resource usable
// in either direction, so a directed graph with equal weights both ways collapses
// onto this representation.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pinkey/errors.hpp"
#include "pinkey/model.hpp"
#include "pinkey/rational.hpp"

namespace pinkey {

class WeightedGraph {
public:
    WeightedGraph() = default;
    explicit WeightedGraph(std::size_t nodes) : m_(nodes) {}

    static WeightedGraph from(const NetworkSpec& spec) {
        WeightedGraph g(spec.terminals());
        for (const auto& [p, b] : spec.budgets()) g.edges_[p] = b;
        return g;
    }

    std::size_t nodes() const noexcept { return m_; }

    /// Weight 0 removes the edge.
    void set_weight(TerminalId i, TerminalId j, std::uint64_t w) {
        check(i);
        check(j);
        const auto p = Pair::of(i, j);
        if (w == 0)
            edges_.erase(p);
        else
            edges_[p] = w;
    }

    std::uint64_t weight(TerminalId i, TerminalId j) const {
        if (i == j) return 0;
        auto it = edges_.find(Pair::of(i, j));
        return it == edges_.end() ? 0 : it->second;
    }

    /// Decrements an edge by one, removing it when it reaches zero.
    void decrement(Pair p) {
        auto it = edges_.find(p);
        if (it == edges_.end())
            throw InvariantViolation("decrement of absent edge (" + std::to_string(p.lo) + "," +
                                     std::to_string(p.hi) + ")");
        if (--it->second == 0) edges_.erase(it);
    }

    const std::map<Pair, std::uint64_t>& edges() const noexcept { return edges_; }

    std::uint64_t total_weight() const noexcept {
        std::uint64_t total = 0;
        for (const auto& [p, w] : edges_) total += w;
        return total;
    }

    std::uint64_t weighted_degree(TerminalId t) const {
        std::uint64_t d = 0;
        for (const auto& [p, w] : edges_)
            if (p.contains(t)) d += w;
        return d;
    }

    /// Neighbors of every node in ascending id order.
    std::vector<std::vector<TerminalId>> adjacency() const {
        std::vector<std::vector<TerminalId>> adj(m_);
        for (const auto& [p, w] : edges_) {
            adj[p.lo].push_back(p.hi);
            adj[p.hi].push_back(p.lo);
        }
        for (auto& a : adj) std::sort(a.begin(), a.end());
        return adj;
    }

    friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

private:
    void check(TerminalId t) const {
        if (t >= m_) throw ValidationError("node", "id " + std::to_string(t) + " out of range");
    }

    std::size_t m_ = 0;
    std::map<Pair, std::uint64_t> edges_;
};

struct SpanningTree {
    std::vector<Pair> edges;  // sorted

    std::uint64_t weight(const WeightedGraph& g) const {
        std::uint64_t w = 0;
        for (auto p : edges) w += g.weight(p.lo, p.hi);
        return w;
    }

    std::size_t max_degree(std::size_t nodes) const {
        std::vector<std::size_t> deg(nodes, 0);
        for (auto p : edges) {
            ++deg[p.lo];
            ++deg[p.hi];
        }
        return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
    }

    friend bool operator==(const SpanningTree&, const SpanningTree&) = default;
};

/// Blocks are sorted internally and ordered by their smallest member.
struct Partition {
    std::vector<std::vector<TerminalId>> blocks;

    std::size_t k() const noexcept { return blocks.size(); }

    /// From a block assignment (block_of[node] in [0,k)).
    static Partition from_assignment(std::span<const std::size_t> block_of, std::size_t k) {
        Partition p;
        p.blocks.resize(k);
        for (TerminalId n = 0; n < block_of.size(); ++n) p.blocks[block_of[n]].push_back(n);
        std::sort(p.blocks.begin(), p.blocks.end());
        return p;
    }

    std::vector<std::size_t> assignment(std::size_t nodes) const {
        std::vector<std::size_t> out(nodes, 0);
        for (std::size_t b = 0; b < blocks.size(); ++b)
            for (auto n : blocks[b]) out.at(n) = b;
        return out;
    }

    /// "{0,1}|{2}"
    std::string str() const {
        std::string out;
        for (const auto& b : blocks) {
            if (!out.empty()) out += '|';
            out += '{';
            for (std::size_t n = 0; n < b.size(); ++n) {
                if (n) out += ',';
                out += std::to_string(b[n]);
            }
            out += '}';
        }
        return out;
    }

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// Sum of weights of edges whose endpoints lie in different blocks.
inline std::uint64_t crossing_weight(const WeightedGraph& g, std::span<const std::size_t> block_of) {
    std::uint64_t w = 0;
    for (const auto& [p, wt] : g.edges())
        if (block_of[p.lo] != block_of[p.hi]) w += wt;
    return w;
}

inline std::uint64_t crossing_weight(const WeightedGraph& g, const Partition& partition) {
    const auto a = partition.assignment(g.nodes());
    return crossing_weight(g, a);
}

struct CutResult {
    std::uint64_t value = 0;
    Partition witness;  // two blocks
};

struct FlowPath {
    std::vector<TerminalId> nodes;
    std::uint64_t amount = 0;

    friend bool operator==(const FlowPath&, const FlowPath&) = default;
};

struct FlowAssignment {
    std::uint64_t value = 0;
    std::map<std::pair<TerminalId, TerminalId>, std::uint64_t> flow;  // directed, positive only
    std::vector<FlowPath> paths;                                      // lexicographic by nodes
};

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

/// True iff every node is reachable from node 0 over positive-weight edges.
inline bool is_connected(const WeightedGraph& g) {
    if (g.nodes() <= 1) return true;
    DisjointSets ds(g.nodes());
    std::size_t components = g.nodes();
    for (const auto& [p, w] : g.edges())
        if (ds.unite(p.lo, p.hi)) --components;
    return components == 1;
}

namespace detail {

using Matrix = std::vector<std::vector<std::int64_t>>;

inline void check_endpoints(const WeightedGraph& g, TerminalId s, TerminalId t) {
    if (s >= g.nodes() || t >= g.nodes()) throw ValidationError("endpoints", "terminal out of range");
    if (s == t) throw ValidationError("endpoints", "source equals target");
}

// Shortest path from s to t over entries with positive capacity, neighbors in id order.
inline std::vector<TerminalId> bfs_path(const Matrix& cap, TerminalId s, TerminalId t) {
    const auto m = cap.size();
    std::vector<std::size_t> prev(m, m);
    std::queue<TerminalId> q;
    prev[s] = s;
    q.push(s);
    while (!q.empty() && prev[t] == m) {
        const auto u = q.front();
        q.pop();
        for (TerminalId v = 0; v < m; ++v) {
            if (prev[v] == m && cap[u][v] > 0) {
                prev[v] = u;
                q.push(v);
            }
        }
    }
    if (prev[t] == m) return {};
    std::vector<TerminalId> path{t};
    while (path.back() != s) path.push_back(prev[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
}

inline std::int64_t bottleneck(const Matrix& cap, const std::vector<TerminalId>& path) {
    auto b = std::numeric_limits<std::int64_t>::max();
    for (std::size_t n = 0; n + 1 < path.size(); ++n) b = std::min(b, cap[path[n]][path[n + 1]]);
    return b;
}

// Edmonds-Karp; returns the antisymmetric net flow matrix.
inline Matrix edmonds_karp(const WeightedGraph& g, TerminalId s, TerminalId t) {
    const auto m = g.nodes();
    Matrix residual(m, std::vector<std::int64_t>(m, 0));
    for (const auto& [p, w] : g.edges()) {
        residual[p.lo][p.hi] = static_cast<std::int64_t>(w);
        residual[p.hi][p.lo] = static_cast<std::int64_t>(w);
    }
    Matrix flow(m, std::vector<std::int64_t>(m, 0));
    for (auto path = bfs_path(residual, s, t); !path.empty(); path = bfs_path(residual, s, t)) {
        const auto b = bottleneck(residual, path);
        for (std::size_t n = 0; n + 1 < path.size(); ++n) {
            const auto u = path[n], v = path[n + 1];
            residual[u][v] -= b;
            residual[v][u] += b;
            flow[u][v] += b;
            flow[v][u] -= b;
        }
    }
    return flow;
}

} // namespace detail

/// Integral maximum s-t flow by shortest augmenting paths, with a path
/// decomposition. Circulations left over by augmentation are cancelled, so the
/// per-edge flows are exactly the sum of the decomposed paths.
inline FlowAssignment max_flow(const WeightedGraph& g, TerminalId s, TerminalId t) {
    detail::check_endpoints(g, s, t);
    const auto net = detail::edmonds_karp(g, s, t);
    const auto m = g.nodes();

    std::int64_t value = 0;
    for (TerminalId v = 0; v < m; ++v) value += net[s][v];

    detail::Matrix positive(m, std::vector<std::int64_t>(m, 0));
    for (TerminalId u = 0; u < m; ++u)
        for (TerminalId v = 0; v < m; ++v) positive[u][v] = std::max<std::int64_t>(0, net[u][v]);

    FlowAssignment out;
    out.value = static_cast<std::uint64_t>(value);
    std::int64_t routed = 0;
    while (routed < value) {
        auto path = detail::bfs_path(positive, s, t);
        if (path.empty()) throw InvariantViolation("flow decomposition ran out of paths");
        const auto b = detail::bottleneck(positive, path);
        for (std::size_t n = 0; n + 1 < path.size(); ++n) positive[path[n]][path[n + 1]] -= b;
        routed += b;
        out.paths.push_back({std::move(path), static_cast<std::uint64_t>(b)});
    }
    std::sort(out.paths.begin(), out.paths.end(),
              [](const FlowPath& a, const FlowPath& b) { return a.nodes < b.nodes; });
    for (const auto& p : out.paths)
        for (std::size_t n = 0; n + 1 < p.nodes.size(); ++n) out.flow[{p.nodes[n], p.nodes[n + 1]}] += p.amount;
    return out;
}

/// Minimum s-t cut from the residual graph of a maximum flow; the witness's first
/// block is the set of nodes reachable from s.
inline CutResult min_st_cut(const WeightedGraph& g, TerminalId s, TerminalId t) {
    detail::check_endpoints(g, s, t);
    const auto net = detail::edmonds_karp(g, s, t);
    const auto m = g.nodes();
    std::vector<std::size_t> side(m, 1);
    std::queue<TerminalId> q;
    side[s] = 0;
    q.push(s);
    while (!q.empty()) {
        const auto u = q.front();
        q.pop();
        for (TerminalId v = 0; v < m; ++v) {
            const auto residual = static_cast<std::int64_t>(g.weight(u, v)) - net[u][v];
            if (side[v] == 1 && residual > 0) {
                side[v] = 0;
                q.push(v);
            }
        }
    }
    CutResult out;
    out.value = crossing_weight(g, side);
    out.witness.blocks.resize(2);
    for (TerminalId n = 0; n < m; ++n) out.witness.blocks[side[n]].push_back(n);
    return out;
}

inline constexpr std::size_t kCutOracleMaxNodes = 20;
inline constexpr std::size_t kPartitionMaxNodes = 12;
inline constexpr std::size_t kTreeEnumerationMaxNodes = 8;
inline constexpr std::size_t kPackingMaxNodes = 6;
inline constexpr std::uint64_t kPackingMaxWeight = 24;

/// Exhaustive minimum s-t cut over all 2^(m-2) bipartitions separating s from t.
inline CutResult min_st_cut_bruteforce(const WeightedGraph& g, TerminalId s, TerminalId t) {
    detail::check_endpoints(g, s, t);
    const auto m = g.nodes();
    if (m > kCutOracleMaxNodes)
        throw InstanceTooLarge("cut oracle limited to " + std::to_string(kCutOracleMaxNodes) + " nodes");
    std::vector<TerminalId> free_nodes;
    for (TerminalId n = 0; n < m; ++n)
        if (n != s && n != t) free_nodes.push_back(n);

    std::vector<std::size_t> side(m, 1);
    side[s] = 0;
    CutResult best;
    bool have = false;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free_nodes.size()); ++mask) {
        for (std::size_t n = 0; n < free_nodes.size(); ++n) side[free_nodes[n]] = ((mask >> n) & 1u) ? 0 : 1;
        const auto w = crossing_weight(g, side);
        if (!have || w < best.value) {
            have = true;
            best.value = w;
            best.witness.blocks.assign(2, {});
            for (TerminalId n = 0; n < m; ++n) best.witness.blocks[side[n]].push_back(n);
        }
    }
    return best;
}

/// Tie-breaking among equal-weight edges when growing a maximum spanning tree.
enum class TieBreak {
    /// Kruskal over edges sorted by (weight desc, lo asc, hi asc).
    lex_kruskal,
    /// Kruskal by weight class; inside a class, repeatedly take the edge that keeps
    /// the forest's maximum degree smallest, then lexicographically smallest.
    degree_min,
};

inline std::string to_string(TieBreak t) {
    return t == TieBreak::lex_kruskal ? "lex-kruskal" : "degree-min";
}

inline SpanningTree maximum_spanning_tree(const WeightedGraph& g, TieBreak policy = TieBreak::lex_kruskal) {
    if (!is_connected(g)) throw GraphDisconnected("maximum spanning tree needs a connected graph");
    const auto m = g.nodes();

    std::vector<std::pair<Pair, std::uint64_t>> edges(g.edges().begin(), g.edges().end());
    std::stable_sort(edges.begin(), edges.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    DisjointSets ds(m);
    SpanningTree tree;
    if (policy == TieBreak::lex_kruskal) {
        for (const auto& [p, w] : edges)
            if (ds.unite(p.lo, p.hi)) tree.edges.push_back(p);
    } else {
        std::vector<std::size_t> degree(m, 0);
        std::size_t max_degree = 0;
        for (std::size_t begin = 0; begin < edges.size();) {
            std::size_t end = begin;
            while (end < edges.size() && edges[end].second == edges[begin].second) ++end;
            std::vector<Pair> weight_class;
            for (auto n = begin; n < end; ++n) weight_class.push_back(edges[n].first);
            for (;;) {
                std::erase_if(weight_class, [&](Pair p) { return ds.find(p.lo) == ds.find(p.hi); });
                if (weight_class.empty()) break;
                // weight_class is in lex order, so min_element keeps the first of equals
                auto resulting = [&](Pair p) {
                    return std::max({max_degree, degree[p.lo] + 1, degree[p.hi] + 1});
                };
                auto best = std::min_element(weight_class.begin(), weight_class.end(),
                                             [&](Pair a, Pair b) { return resulting(a) < resulting(b); });
                const auto p = *best;
                max_degree = resulting(p);
                ++degree[p.lo];
                ++degree[p.hi];
                ds.unite(p.lo, p.hi);
                tree.edges.push_back(p);
                weight_class.erase(best);
            }
            begin = end;
        }
    }
    std::sort(tree.edges.begin(), tree.edges.end());
    return tree;
}

/// Visits every spanning tree of g (edges with positive weight only).
inline void for_each_spanning_tree(const WeightedGraph& g, const std::function<void(const SpanningTree&)>& visit) {
    const auto m = g.nodes();
    if (m > kTreeEnumerationMaxNodes)
        throw InstanceTooLarge("spanning tree enumeration limited to " +
                               std::to_string(kTreeEnumerationMaxNodes) + " nodes");
    std::vector<Pair> edges;
    for (const auto& [p, w] : g.edges()) edges.push_back(p);
    SpanningTree current;

    std::function<void(std::size_t, const DisjointSets&)> recurse = [&](std::size_t next, const DisjointSets& ds) {
        if (current.edges.size() + 1 == m) {
            visit(current);
            return;
        }
        const auto needed = m - 1 - current.edges.size();
        for (auto e = next; e + needed <= edges.size(); ++e) {
            DisjointSets extended = ds;
            if (!extended.unite(edges[e].lo, edges[e].hi)) continue;
            current.edges.push_back(edges[e]);
            recurse(e + 1, extended);
            current.edges.pop_back();
        }
    };
    recurse(0, DisjointSets(m));
}

/// Visits every partition of {0..m-1} into k >= 2 blocks in which each block meets
/// `must_meet`. The callback receives a block assignment (block ids follow first
/// occurrence) and k.
inline void for_each_partition(std::size_t m, std::span<const TerminalId> must_meet,
                               const std::function<void(std::span<const std::size_t>, std::size_t)>& visit) {
    if (m > kPartitionMaxNodes)
        throw InstanceTooLarge("partition enumeration limited to " + std::to_string(kPartitionMaxNodes) +
                               " nodes");
    if (m == 0) return;
    std::vector<bool> in_set(m, false);
    for (auto t : must_meet) in_set.at(t) = true;

    // restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1])
    std::vector<std::size_t> a(m, 0), prefix_max(m, 0);
    std::vector<bool> hit;
    for (;;) {
        const auto k = prefix_max[m - 1] + 1;
        if (k >= 2) {
            hit.assign(k, false);
            for (std::size_t n = 0; n < m; ++n)
                if (in_set[n]) hit[a[n]] = true;
            if (std::all_of(hit.begin(), hit.end(), [](bool h) { return h; })) visit(a, k);
        }
        std::size_t i = m - 1;
        while (i > 0 && a[i] == prefix_max[i - 1] + 1) --i;
        if (i == 0) return;
        ++a[i];
        prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
        for (auto j = i + 1; j < m; ++j) {
            a[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
}

inline std::vector<Partition> enumerate_partitions(std::size_t m, std::span<const TerminalId> must_meet) {
    std::vector<Partition> out;
    for_each_partition(m, must_meet, [&](std::span<const std::size_t> a, std::size_t k) {
        out.push_back(Partition::from_assignment(a, k));
    });
    return out;
}

inline std::vector<TerminalId> all_terminals(std::size_t m) {
    std::vector<TerminalId> out(m);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

struct MulticutResult {
    Rational value;
    std::uint64_t weight = 0;
    Partition witness;
};

/// Minimum over partitions whose blocks all meet `must_meet` of
/// crossing weight / (k - 1), as an exact rational. The first minimizer in
/// enumeration order is the witness.
inline MulticutResult min_normalized_multicut(const WeightedGraph& g, std::span<const TerminalId> must_meet) {
    if (must_meet.size() < 2) throw ValidationError("group", "needs at least two terminals");
    MulticutResult best;
    bool have = false;
    for_each_partition(g.nodes(), must_meet, [&](std::span<const std::size_t> a, std::size_t k) {
        const auto w = crossing_weight(g, a);
        const Rational value(static_cast<std::int64_t>(w), static_cast<std::int64_t>(k - 1));
        if (!have || value < best.value) {
            have = true;
            best.value = value;
            best.weight = w;
            best.witness = Partition::from_assignment(a, k);
        }
    });
    return best;
}

inline MulticutResult min_normalized_multicut(const WeightedGraph& g) {
    const auto all = all_terminals(g.nodes());
    return min_normalized_multicut(g, all);
}

/// Largest number of rounds "pick any spanning tree, decrement its edges, drop
/// zero edges" that can run before the graph disconnects, over every possible
/// sequence of tree choices. Depth-first search with memoization on residual
/// graphs, pruned by min(total/(m-1), smallest weighted degree).
inline std::uint64_t optimal_tree_packing_bruteforce(const WeightedGraph& g) {
    const auto m = g.nodes();
    if (m > kPackingMaxNodes)
        throw InstanceTooLarge("packing oracle limited to " + std::to_string(kPackingMaxNodes) + " nodes");
    if (g.total_weight() > kPackingMaxWeight)
        throw InstanceTooLarge("packing oracle limited to total weight " + std::to_string(kPackingMaxWeight));

    std::map<std::map<Pair, std::uint64_t>, std::uint64_t> memo;
    std::function<std::uint64_t(const WeightedGraph&)> search = [&](const WeightedGraph& h) -> std::uint64_t {
        if (!is_connected(h)) return 0;
        if (auto it = memo.find(h.edges()); it != memo.end()) return it->second;
        std::uint64_t ceiling = h.total_weight() / (m - 1);
        for (TerminalId n = 0; n < m; ++n) ceiling = std::min(ceiling, h.weighted_degree(n));

        std::uint64_t best = 0;
        std::vector<SpanningTree> trees;
        for_each_spanning_tree(h, [&](const SpanningTree& t) { trees.push_back(t); });
        for (const auto& t : trees) {
            if (best == ceiling) break;
            WeightedGraph next = h;
            for (auto p : t.edges) next.decrement(p);
            best = std::max(best, 1 + search(next));
        }
        memo.emplace(h.edges(), best);
        return best;
    };
    return search(g);
}

} // namespace pinkey

#endif
