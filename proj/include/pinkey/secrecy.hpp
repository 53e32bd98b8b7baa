#ifndef PINKEY_SECRECY_HPP
#define PINKEY_SECRECY_HPP

// Exact secrecy checks for keys built from XORs of independent uniform bits.
//
// If K and V are GF(2)-linear functions of i.i.d. uniform bits, then
//   H(K) = rank(K),  H(V) = rank(V),  H(K,V) = rank(K ∪ V)
// so I(K;V) = rank(K) + rank(V) - rank(K ∪ V) bits exactly. A key is secret when
// that is zero and uniform when its forms are linearly independent.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pinkey/errors.hpp"
#include "pinkey/gf2.hpp"
#include "pinkey/model.hpp"

namespace pinkey {

struct SecrecyReport {
    std::size_t key_length = 0;
    std::size_t rank_key = 0;
    std::size_t rank_transcript = 0;
    std::size_t rank_joint = 0;
    std::size_t leaked_bits = 0;
    bool uniform = false;

    bool secret() const noexcept { return leaked_bits == 0 && uniform; }
};

inline SecrecyReport verify_independence(std::span<const LinearForm> key_forms,
                                         std::span<const LinearForm> transcript_forms, std::size_t basis_size) {
    Gf2Span key(basis_size), transcript(basis_size), joint(basis_size);
    for (const auto& f : key_forms) {
        key.insert(f);
        joint.insert(f);
    }
    for (const auto& f : transcript_forms) {
        transcript.insert(f);
        joint.insert(f);
    }
    SecrecyReport r;
    r.key_length = key_forms.size();
    r.rank_key = key.rank();
    r.rank_transcript = transcript.rank();
    r.rank_joint = joint.rank();
    r.leaked_bits = r.rank_key + r.rank_transcript - r.rank_joint;
    r.uniform = r.rank_key == r.key_length;
    return r;
}

inline SecrecyReport verify_independence(std::span<const LinearForm> key_forms,
                                         std::span<const LinearForm> transcript_forms, const SourceBitBasis& basis) {
    return verify_independence(key_forms, transcript_forms, basis.size());
}

inline bool verify_uniformity(std::span<const LinearForm> key_forms, std::size_t basis_size) {
    return gf2_rank(key_forms, basis_size) == key_forms.size();
}

inline constexpr std::size_t kMutualInformationMaxBasis = 20;

struct MutualInformation {
    bool factorizes = false;  // exact: P(k,v) == P(k) P(v) for every outcome
    double bits = 0.0;
};

/// Exhaustive I(K;V) over all 2^basis_size assignments of the basis bits. The joint
/// histogram uses exact integer counts; `factorizes` is decided exactly and
/// `bits` is the mutual information from those counts.
inline MutualInformation brute_force_mutual_information(std::span<const LinearForm> key_forms,
                                                        std::span<const LinearForm> transcript_forms,
                                                        std::size_t basis_size) {
    if (basis_size > kMutualInformationMaxBasis)
        throw InstanceTooLarge("mutual information oracle limited to " + std::to_string(kMutualInformationMaxBasis) +
                               " basis bits");
    auto masks = [&](std::span<const LinearForm> forms) {
        std::vector<std::uint32_t> out;
        for (const auto& f : forms) {
            std::uint32_t mask = 0;
            for (auto i : f.terms()) {
                if (i >= basis_size) throw UnknownBasisLabel("basis index " + std::to_string(i) + " outside basis");
                mask |= std::uint32_t{1} << i;
            }
            out.push_back(mask);
        }
        return out;
    };
    const auto key = masks(key_forms);
    const auto transcript = masks(transcript_forms);
    auto evaluate = [](const std::vector<std::uint32_t>& forms, std::uint32_t x) {
        std::vector<bool> out(forms.size());
        for (std::size_t n = 0; n < forms.size(); ++n) out[n] = (std::popcount(forms[n] & x) & 1) != 0;
        return out;
    };

    std::map<std::pair<std::vector<bool>, std::vector<bool>>, std::uint64_t> joint;
    std::map<std::vector<bool>, std::uint64_t> k_count, v_count;
    const std::uint64_t total = std::uint64_t{1} << basis_size;
    for (std::uint64_t x = 0; x < total; ++x) {
        auto k = evaluate(key, static_cast<std::uint32_t>(x));
        auto v = evaluate(transcript, static_cast<std::uint32_t>(x));
        ++k_count[k];
        ++v_count[v];
        ++joint[{std::move(k), std::move(v)}];
    }

    MutualInformation mi;
    mi.factorizes = joint.size() == k_count.size() * v_count.size();
    const auto n = static_cast<double>(total);
    for (const auto& [kv, c] : joint) {
        // P(k,v) == P(k)P(v)  <=>  c * total == c_k * c_v, all in exact integers
        const auto ck = k_count.at(kv.first), cv = v_count.at(kv.second);
        if (c * total != ck * cv) mi.factorizes = false;
        const double ratio = (static_cast<double>(c) * n) / (static_cast<double>(ck) * static_cast<double>(cv));
        mi.bits += static_cast<double>(c) / n * std::log2(ratio);
    }
    if (mi.factorizes) mi.bits = 0.0;
    return mi;
}

} // namespace pinkey

#endif
