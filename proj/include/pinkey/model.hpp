#ifndef PINKEY_MODEL_HPP
#define PINKEY_MODEL_HPP

// Pair-wise independent network model.
//
// Terminals are 0-indexed (0..m-1). Every unordered pair of terminals holds an
// ideal shared secret key whose length is the pair's budget. Every bit that a
// protocol touches lives in a SourceBitBasis, so any derived bit can be written
// as an XOR of basis bits.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pinkey/errors.hpp"

namespace pinkey {

using TerminalId = std::size_t;
using BasisIndex = std::uint32_t;

/// Unordered terminal pair, stored with lo < hi.
struct Pair {
    TerminalId lo = 0;
    TerminalId hi = 0;

    static Pair of(TerminalId i, TerminalId j) {
        if (i == j) throw ValidationError("pair", "self-pair " + std::to_string(i));
        return i < j ? Pair{i, j} : Pair{j, i};
    }

    bool contains(TerminalId t) const noexcept { return lo == t || hi == t; }
    TerminalId other(TerminalId t) const noexcept { return t == lo ? hi : lo; }

    friend auto operator<=>(const Pair&, const Pair&) = default;
};

/// Terminal count plus the per-pair key budgets in bits. Absent pairs have budget 0.
class NetworkSpec {
public:
    NetworkSpec() = default;

    explicit NetworkSpec(std::size_t terminals) : m_(terminals) {
        if (terminals < 2) throw ValidationError("terminals", "need at least 2 terminals");
    }

    std::size_t terminals() const noexcept { return m_; }

    void set_budget(TerminalId i, TerminalId j, std::uint64_t bits) {
        check_terminal(i);
        check_terminal(j);
        const auto p = Pair::of(i, j);
        if (bits == 0)
            budgets_.erase(p);
        else
            budgets_[p] = bits;
    }

    std::uint64_t budget(TerminalId i, TerminalId j) const {
        if (i == j) return 0;
        auto it = budgets_.find(Pair::of(i, j));
        return it == budgets_.end() ? 0 : it->second;
    }

    /// Positive-budget pairs in lexicographic order.
    const std::map<Pair, std::uint64_t>& budgets() const noexcept { return budgets_; }

    std::uint64_t total_budget() const noexcept {
        std::uint64_t total = 0;
        for (const auto& [p, b] : budgets_) total += b;
        return total;
    }

    /// True when every positive budget involves `center`.
    bool is_star(TerminalId center = 0) const noexcept {
        for (const auto& [p, b] : budgets_)
            if (!p.contains(center)) return false;
        return true;
    }

    void check_terminal(TerminalId t) const {
        if (t >= m_)
            throw ValidationError("terminal", "id " + std::to_string(t) + " out of range [0," +
                                                  std::to_string(m_) + ")");
    }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

private:
    std::size_t m_ = 0;
    std::map<Pair, std::uint64_t> budgets_;
};

/// Names one independent uniform bit: bit `index` of the key shared by pair (a,b),
/// or bit `index` of terminal a's local randomness.
struct BitLabel {
    enum class Kind : std::uint8_t { pair_key, local };

    Kind kind = Kind::pair_key;
    TerminalId a = 0;
    TerminalId b = 0;
    std::uint64_t index = 0;

    static BitLabel key(Pair p, std::uint64_t index) { return {Kind::pair_key, p.lo, p.hi, index}; }
    static BitLabel local(TerminalId t, std::uint64_t index) { return {Kind::local, t, 0, index}; }

    /// True when terminal t observes this bit directly.
    bool visible_to(TerminalId t) const noexcept {
        return kind == Kind::pair_key ? (a == t || b == t) : a == t;
    }

    /// "k<lo>.<hi>:<index>" for key bits, "r<terminal>:<index>" for local bits.
    std::string str() const {
        if (kind == Kind::pair_key)
            return "k" + std::to_string(a) + "." + std::to_string(b) + ":" + std::to_string(index);
        return "r" + std::to_string(a) + ":" + std::to_string(index);
    }

    static std::optional<BitLabel> parse(std::string_view text) {
        auto number = [](std::string_view s, std::uint64_t& out) {
            if (s.empty()) return false;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            return ec == std::errc{} && ptr == s.data() + s.size();
        };
        if (text.size() < 4) return std::nullopt;
        const auto colon = text.find(':');
        if (colon == std::string_view::npos) return std::nullopt;
        std::uint64_t index = 0;
        if (!number(text.substr(colon + 1), index)) return std::nullopt;
        const auto head = text.substr(1, colon - 1);
        if (text[0] == 'k') {
            const auto dot = head.find('.');
            std::uint64_t lo = 0, hi = 0;
            if (dot == std::string_view::npos || !number(head.substr(0, dot), lo) ||
                !number(head.substr(dot + 1), hi) || lo >= hi)
                return std::nullopt;
            return BitLabel{Kind::pair_key, lo, hi, index};
        }
        if (text[0] == 'r') {
            std::uint64_t t = 0;
            if (!number(head, t)) return std::nullopt;
            return BitLabel{Kind::local, t, 0, index};
        }
        return std::nullopt;
    }

    friend auto operator<=>(const BitLabel&, const BitLabel&) = default;
};

/// The ordered set of independent uniform bits of one simulation, together with
/// their realized values.
class SourceBitBasis {
public:
    BasisIndex add(const BitLabel& label, bool value) {
        if (index_.contains(label)) throw InvariantViolation("duplicate basis label " + label.str());
        const auto idx = static_cast<BasisIndex>(labels_.size());
        labels_.push_back(label);
        values_.push_back(value ? 1 : 0);
        index_.emplace(label, idx);
        return idx;
    }

    std::optional<BasisIndex> find(const BitLabel& label) const {
        auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const noexcept { return labels_.size(); }
    const BitLabel& label(BasisIndex i) const { return labels_.at(i); }
    bool value(BasisIndex i) const { return values_.at(i) != 0; }

private:
    std::vector<BitLabel> labels_;
    std::vector<std::uint8_t> values_;
    std::map<BitLabel, BasisIndex> index_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace detail

/// Reproducible bit stream. The engine seed mixes (seed, domain, a, b) through
/// splitmix64, and bits are taken LSB-first from successive mt19937_64 words, so
/// the stream is identical on every conforming standard library.
class BitStream {
public:
    enum class Domain : std::uint64_t { pair_key = 1, local = 2 };

    BitStream(std::uint64_t seed, Domain domain, std::uint64_t a, std::uint64_t b = 0)
        : engine_(derive(seed, domain, a, b)) {}

    bool next() {
        if (left_ == 0) {
            word_ = engine_();
            left_ = 64;
        }
        const bool bit = (word_ & 1u) != 0;
        word_ >>= 1;
        --left_;
        return bit;
    }

    static std::uint64_t derive(std::uint64_t seed, Domain domain, std::uint64_t a,
                                std::uint64_t b) noexcept {
        std::uint64_t h = detail::splitmix64(static_cast<std::uint64_t>(domain));
        h = detail::splitmix64(h ^ a);
        h = detail::splitmix64(h ^ b);
        return detail::splitmix64(h ^ seed);
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t word_ = 0;
    int left_ = 0;
};

/// Bits handed out by PairwiseKeyStore::consume.
struct KeyBits {
    std::vector<std::uint8_t> values;
    std::vector<BasisIndex> labels;

    std::size_t size() const noexcept { return values.size(); }
};

/// The realized pairwise keys of one network, with per-pair consumption cursors.
/// Owns the run's SourceBitBasis; protocols register local randomness here too.
class PairwiseKeyStore {
public:
    PairwiseKeyStore() = default;
    explicit PairwiseKeyStore(std::size_t terminals) : m_(terminals) {}

    std::size_t terminals() const noexcept { return m_; }

    /// Basis indices of the whole key of pair (i,j); empty if the pair has no key.
    std::span<const BasisIndex> key(TerminalId i, TerminalId j) const {
        auto it = keys_.find(Pair::of(i, j));
        if (it == keys_.end()) return {};
        return it->second.bits;
    }

    std::size_t remaining(TerminalId i, TerminalId j) const {
        auto it = keys_.find(Pair::of(i, j));
        if (it == keys_.end()) return 0;
        return it->second.bits.size() - it->second.cursor;
    }

    std::size_t cursor(TerminalId i, TerminalId j) const {
        auto it = keys_.find(Pair::of(i, j));
        return it == keys_.end() ? 0 : it->second.cursor;
    }

    /// Issues the next `count` unused bits of K_ij. Issued bits are never issued again.
    KeyBits consume(TerminalId i, TerminalId j, std::size_t count) {
        const auto p = Pair::of(i, j);
        if (remaining(i, j) < count)
            throw InsufficientKeyMaterial("pair (" + std::to_string(p.lo) + "," +
                                          std::to_string(p.hi) + ") has " +
                                          std::to_string(remaining(i, j)) + " bits left, " +
                                          std::to_string(count) + " requested");
        KeyBits out;
        if (count == 0) return out;
        auto& k = keys_.at(p);
        for (std::size_t n = 0; n < count; ++n) {
            const auto idx = k.bits[k.cursor++];
            out.labels.push_back(idx);
            out.values.push_back(basis_.value(idx) ? 1 : 0);
        }
        return out;
    }

    /// Registers fresh local random bits of terminal t, labelled r<t>:<n> consecutively.
    std::vector<BasisIndex> add_local_bits(TerminalId t, std::span<const std::uint8_t> values) {
        std::vector<BasisIndex> out;
        auto& next = local_count_[t];
        for (auto v : values) out.push_back(basis_.add(BitLabel::local(t, next++), v != 0));
        return out;
    }

    std::uint64_t local_count(TerminalId t) const {
        auto it = local_count_.find(t);
        return it == local_count_.end() ? 0 : it->second;
    }

    const SourceBitBasis& basis() const noexcept { return basis_; }

    void add_key(Pair p, std::span<const std::uint8_t> values) {
        auto& k = keys_[p];
        for (std::size_t n = 0; n < values.size(); ++n)
            k.bits.push_back(basis_.add(BitLabel::key(p, n), values[n] != 0));
    }

    /// Realized bit string of K_ij, for inspection.
    std::vector<std::uint8_t> key_values(TerminalId i, TerminalId j) const {
        std::vector<std::uint8_t> out;
        for (auto idx : key(i, j)) out.push_back(basis_.value(idx) ? 1 : 0);
        return out;
    }

private:
    struct PairKey {
        std::vector<BasisIndex> bits;
        std::size_t cursor = 0;
    };

    std::size_t m_ = 0;
    std::map<Pair, PairKey> keys_;
    std::map<TerminalId, std::uint64_t> local_count_;
    SourceBitBasis basis_;
};

/// Ideal pairwise key oracle: pair (i,j) with budget b receives b uniform bits from
/// BitStream(seed, pair_key, i, j). Same (spec, seed) always gives the same store.
inline PairwiseKeyStore generate_pairwise_keys(const NetworkSpec& spec, std::uint64_t seed) {
    PairwiseKeyStore store(spec.terminals());
    for (const auto& [p, bits] : spec.budgets()) {
        BitStream stream(seed, BitStream::Domain::pair_key, p.lo, p.hi);
        std::vector<std::uint8_t> values(bits);
        for (auto& v : values) v = stream.next() ? 1 : 0;
        store.add_key(p, values);
    }
    return store;
}

/// Draws `count` local random bits for terminal t and registers them in the store.
/// The stream is keyed by the first new label index, so repeated draws never repeat.
inline KeyBits draw_local_bits(PairwiseKeyStore& store, TerminalId t, std::size_t count,
                               std::uint64_t seed) {
    BitStream stream(seed, BitStream::Domain::local, t, store.local_count(t));
    KeyBits out;
    out.values.resize(count);
    for (auto& v : out.values) v = stream.next() ? 1 : 0;
    out.labels = store.add_local_bits(t, out.values);
    return out;
}

} // namespace pinkey

#endif
