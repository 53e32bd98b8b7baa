#ifndef PINKEY_GF2_HPP
#define PINKEY_GF2_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pinkey/errors.hpp"
#include "pinkey/model.hpp"

namespace pinkey {

/// A bit expressed as the XOR of a set of basis bits. The empty form is the constant 0.
class LinearForm {
public:
    LinearForm() = default;

    static LinearForm of(BasisIndex i) {
        LinearForm f;
        f.terms_.push_back(i);
        return f;
    }

    static LinearForm of(std::vector<BasisIndex> terms) {
        std::sort(terms.begin(), terms.end());
        LinearForm f;
        // pairs cancel
        for (std::size_t n = 0; n < terms.size();) {
            std::size_t run = n;
            while (run < terms.size() && terms[run] == terms[n]) ++run;
            if ((run - n) % 2 == 1) f.terms_.push_back(terms[n]);
            n = run;
        }
        return f;
    }

    const std::vector<BasisIndex>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }
    bool contains(BasisIndex i) const { return std::binary_search(terms_.begin(), terms_.end(), i); }

    LinearForm& operator^=(const LinearForm& other) {
        std::vector<BasisIndex> out;
        out.reserve(terms_.size() + other.terms_.size());
        std::set_symmetric_difference(terms_.begin(), terms_.end(), other.terms_.begin(),
                                      other.terms_.end(), std::back_inserter(out));
        terms_ = std::move(out);
        return *this;
    }

    friend LinearForm operator^(LinearForm a, const LinearForm& b) { return a ^= b; }

    bool evaluate(const SourceBitBasis& basis) const {
        bool bit = false;
        for (auto i : terms_) bit ^= basis.value(i);
        return bit;
    }

    /// Labels joined by '^', or "0" for the empty form.
    std::string str(const SourceBitBasis& basis) const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto i : terms_) {
            if (!out.empty()) out += '^';
            out += basis.label(i).str();
        }
        return out;
    }

    static LinearForm parse(std::string_view text, const SourceBitBasis& basis) {
        if (text == "0") return {};
        std::vector<BasisIndex> terms;
        while (!text.empty()) {
            const auto cut = text.find('^');
            const auto token = text.substr(0, cut);
            const auto label = BitLabel::parse(token);
            if (!label) throw ParseError("malformed basis label '" + std::string(token) + "'");
            const auto idx = basis.find(*label);
            if (!idx) throw UnknownBasisLabel("label " + label->str() + " is not in the basis");
            terms.push_back(*idx);
            if (cut == std::string_view::npos) break;
            text.remove_prefix(cut + 1);
        }
        return of(std::move(terms));
    }

    friend bool operator==(const LinearForm&, const LinearForm&) = default;

private:
    std::vector<BasisIndex> terms_;
};

/// Incrementally built row-echelon basis of a subspace of GF(2)^dimension.
/// Each row can carry a known value, which lets `solve` evaluate any form in the
/// span from the values of the inserted forms alone.
class Gf2Span {
public:
    explicit Gf2Span(std::size_t dimension) : words_((dimension + 63) / 64), dimension_(dimension) {}

    /// Adds a form; returns true if it was independent of the current span.
    bool insert(const LinearForm& form, bool value = false) {
        auto [row, v] = reduce(dense(form), value);
        const auto pivot = first_set(row);
        if (!pivot) return false;
        rows_.push_back({std::move(row), *pivot, v});
        return true;
    }

    /// The value of `form` implied by the inserted (form, value) pairs, or nullopt if
    /// `form` is outside the span.
    std::optional<bool> solve(const LinearForm& form) const {
        auto [row, v] = reduce(dense(form), false);
        if (first_set(row)) return std::nullopt;
        return v;
    }

    bool spans(const LinearForm& form) const { return solve(form).has_value(); }

    std::size_t rank() const noexcept { return rows_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }

private:
    struct Row {
        std::vector<std::uint64_t> bits;
        std::size_t pivot;
        bool value;
    };

    std::vector<std::uint64_t> dense(const LinearForm& form) const {
        std::vector<std::uint64_t> out(words_, 0);
        for (auto i : form.terms()) {
            if (i >= dimension_)
                throw UnknownBasisLabel("basis index " + std::to_string(i) + " outside dimension " +
                                        std::to_string(dimension_));
            out[i / 64] |= std::uint64_t{1} << (i % 64);
        }
        return out;
    }

    std::pair<std::vector<std::uint64_t>, bool> reduce(std::vector<std::uint64_t> v, bool value) const {
        // rows are reduced against all earlier rows, so one forward pass suffices
        for (const auto& r : rows_) {
            if ((v[r.pivot / 64] >> (r.pivot % 64)) & 1u) {
                for (std::size_t w = 0; w < words_; ++w) v[w] ^= r.bits[w];
                value ^= r.value;
            }
        }
        return {std::move(v), value};
    }

    static std::optional<std::size_t> first_set(const std::vector<std::uint64_t>& v) {
        for (std::size_t w = 0; w < v.size(); ++w)
            if (v[w] != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(v[w]));
        return std::nullopt;
    }

    std::size_t words_;
    std::size_t dimension_;
    std::vector<Row> rows_;
};

inline std::size_t gf2_rank(std::span<const LinearForm> forms, std::size_t dimension) {
    Gf2Span span(dimension);
    for (const auto& f : forms) span.insert(f);
    return span.rank();
}

} // namespace pinkey

#endif
