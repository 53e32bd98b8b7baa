#ifndef PINKEY_TRANSCRIPT_HPP
#define PINKEY_TRANSCRIPT_HPP

// Public-channel transcript and its line-oriented text form:
//
//   pinkey-transcript 1
//   <round> <sender> <receiver|*> <bits> <hex|-> <form>,<form>,...|-
//
// Payload bits are packed MSB-first into hex nibbles. Each form is a '^'-joined
// list of basis labels (see BitLabel::str), one per payload bit.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pinkey/errors.hpp"
#include "pinkey/gf2.hpp"
#include "pinkey/model.hpp"

namespace pinkey {

struct PublicMessage {
    TerminalId sender = 0;
    std::optional<TerminalId> receiver;  // nullopt: broadcast
    std::uint64_t round = 0;
    std::vector<std::uint8_t> payload;
    std::vector<LinearForm> forms;
    /// One-time-pad bit used for each payload bit. Simulator bookkeeping, not serialized.
    std::vector<BasisIndex> masks;

    friend bool operator==(const PublicMessage& a, const PublicMessage& b) {
        return a.sender == b.sender && a.receiver == b.receiver && a.round == b.round &&
               a.payload == b.payload && a.forms == b.forms;
    }
};

class Transcript {
public:
    void append(PublicMessage msg) {
        if (msg.forms.size() != msg.payload.size())
            throw InvariantViolation("message form count differs from payload length");
        if (!messages_.empty() && msg.round < messages_.back().round)
            throw InvariantViolation("transcript rounds must be nondecreasing");
        messages_.push_back(std::move(msg));
    }

    void append(const Transcript& other) {
        for (const auto& m : other.messages_) append(m);
    }

    const std::vector<PublicMessage>& messages() const noexcept { return messages_; }
    std::size_t size() const noexcept { return messages_.size(); }
    bool empty() const noexcept { return messages_.empty(); }

    std::uint64_t next_round() const noexcept { return messages_.empty() ? 0 : messages_.back().round + 1; }

    std::size_t total_bits() const noexcept {
        std::size_t n = 0;
        for (const auto& m : messages_) n += m.payload.size();
        return n;
    }

    std::vector<LinearForm> forms() const {
        std::vector<LinearForm> out;
        for (const auto& m : messages_) out.insert(out.end(), m.forms.begin(), m.forms.end());
        return out;
    }

    friend bool operator==(const Transcript&, const Transcript&) = default;

private:
    std::vector<PublicMessage> messages_;
};

inline constexpr const char* kTranscriptHeader = "pinkey-transcript 1";

inline std::string to_hex(const std::vector<std::uint8_t>& bits) {
    if (bits.empty()) return "-";
    static constexpr char digits[] = "0123456789abcdef";
    std::string out((bits.size() + 3) / 4, '0');
    for (std::size_t n = 0; n < bits.size(); ++n)
        if (bits[n]) {
            auto& c = out[n / 4];
            const int nibble = (c <= '9' ? c - '0' : c - 'a' + 10) | (8 >> (n % 4));
            c = digits[nibble];
        }
    return out;
}

inline std::vector<std::uint8_t> from_hex(const std::string& hex, std::size_t bits) {
    if (bits == 0) {
        if (hex != "-") throw ParseError("empty payload must be written '-'");
        return {};
    }
    if (hex.size() != (bits + 3) / 4) throw ParseError("payload hex length does not match bit count");
    std::vector<std::uint8_t> out(bits, 0);
    for (std::size_t n = 0; n < bits; ++n) {
        const char c = hex[n / 4];
        int nibble;
        if (c >= '0' && c <= '9')
            nibble = c - '0';
        else if (c >= 'a' && c <= 'f')
            nibble = c - 'a' + 10;
        else
            throw ParseError(std::string("bad hex digit '") + c + "'");
        out[n] = (nibble & (8 >> (n % 4))) ? 1 : 0;
    }
    return out;
}

inline void write_transcript(std::ostream& os, const Transcript& t, const SourceBitBasis& basis) {
    os << kTranscriptHeader << '\n';
    for (const auto& m : t.messages()) {
        os << m.round << ' ' << m.sender << ' ';
        if (m.receiver)
            os << *m.receiver;
        else
            os << '*';
        os << ' ' << m.payload.size() << ' ' << to_hex(m.payload) << ' ';
        if (m.forms.empty()) os << '-';
        for (std::size_t n = 0; n < m.forms.size(); ++n) {
            if (n) os << ',';
            os << m.forms[n].str(basis);
        }
        os << '\n';
    }
}

inline std::string transcript_text(const Transcript& t, const SourceBitBasis& basis) {
    std::ostringstream os;
    write_transcript(os, t, basis);
    return os.str();
}

/// Parses the text form; labels are resolved against `basis`.
inline Transcript read_transcript(std::istream& is, const SourceBitBasis& basis) {
    std::string line;
    if (!std::getline(is, line) || line != kTranscriptHeader) throw ParseError("missing transcript header");
    Transcript t;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto where = "transcript line " + std::to_string(lineno) + ": ";
        std::istringstream ls(line);
        PublicMessage m;
        std::string receiver, hex, forms, extra;
        std::size_t bits = 0;
        if (!(ls >> m.round >> m.sender >> receiver >> bits >> hex >> forms) || (ls >> extra))
            throw ParseError(where + "expected 6 fields");
        if (receiver != "*") {
            try {
                m.receiver = std::stoull(receiver);
            } catch (const std::exception&) {
                throw ParseError(where + "bad receiver '" + receiver + "'");
            }
        }
        try {
            m.payload = from_hex(hex, bits);
            if (forms != "-") {
                std::string_view rest = forms;
                while (true) {
                    const auto cut = rest.find(',');
                    m.forms.push_back(LinearForm::parse(rest.substr(0, cut), basis));
                    if (cut == std::string_view::npos) break;
                    rest.remove_prefix(cut + 1);
                }
            }
        } catch (const ParseError& e) {
            throw ParseError(where + e.what());
        }
        if (m.forms.size() != m.payload.size()) throw ParseError(where + "form count differs from bit count");
        try {
            t.append(std::move(m));
        } catch (const InvariantViolation& e) {
            throw ParseError(where + e.what());
        }
    }
    return t;
}

} // namespace pinkey

#endif
