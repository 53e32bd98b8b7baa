#ifndef PINKEY_SCENARIO_HPP
#define PINKEY_SCENARIO_HPP

// Scenario files and the run pipeline behind the command-line tool.
//
// A scenario is a line-oriented text file:
//
//   format = pinkey-scenario/1
//   terminals = 3
//   protocol = group            # broadcast | subgroup | group
//   tie_break = lex-kruskal     # or degree-min
//   seed = 7
//   source = 0                  # subgroup only
//   target = 2                  # subgroup only
//   emit_transcript = out.txt   # optional
//   pair 0 1 5                  # budget in bits of pair (0,1)
//
// '#' starts a comment. Unknown keys, duplicate keys and duplicate pairs are
// rejected.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinkey/bounds.hpp"
#include "pinkey/errors.hpp"
#include "pinkey/model.hpp"
#include "pinkey/protocols.hpp"
#include "pinkey/rational.hpp"
#include "pinkey/secrecy.hpp"
#include "pinkey/transcript.hpp"

namespace pinkey {

inline constexpr const char* kScenarioFormat = "pinkey-scenario/1";

enum class Protocol { broadcast, subgroup, group };

inline std::string to_string(Protocol p) {
    switch (p) {
    case Protocol::broadcast: return "broadcast";
    case Protocol::subgroup: return "subgroup";
    case Protocol::group: return "group";
    }
    return "?";
}

inline std::optional<TieBreak> parse_tie_break(std::string_view s) {
    if (s == "lex-kruskal") return TieBreak::lex_kruskal;
    if (s == "degree-min") return TieBreak::degree_min;
    return std::nullopt;
}

struct Scenario {
    NetworkSpec network;
    Protocol protocol = Protocol::group;
    TerminalId source = 0;
    TerminalId target = 0;
    TieBreak tie_break = TieBreak::lex_kruskal;
    std::uint64_t seed = 0;
    std::optional<std::string> emit_transcript;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::int64_t parse_integer(const std::string& text, const std::string& field) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError(field + ": expected an integer, got '" + text + "'");
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& field) {
    if (!text.empty() && text[0] == '-') throw ValidationError(field, "must be nonnegative");
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError(field + ": expected a nonnegative integer, got '" + text + "'");
    return v;
}

} // namespace detail

inline Scenario parse_scenario(std::istream& is) {
    struct PairLine {
        std::int64_t i, j, bits;
        std::string field;
    };
    std::map<std::string, std::string> values;
    std::vector<PairLine> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto where = "line " + std::to_string(lineno);
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.rfind("pair", 0) == 0 && (line.size() == 4 || line[4] == ' ' || line[4] == '\t')) {
            std::istringstream ls(line.substr(4));
            std::string a, b, c, extra;
            if (!(ls >> a >> b >> c) || (ls >> extra)) throw ParseError(where + ": expected 'pair <i> <j> <bits>'");
            const auto field = "pair[" + where + "]";
            pairs.push_back({detail::parse_integer(a, field + ".i"), detail::parse_integer(b, field + ".j"),
                             detail::parse_integer(c, field + ".bits"), field});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(where + ": expected 'key = value' or 'pair <i> <j> <bits>'");
        auto key = detail::trim(std::string_view(line).substr(0, eq));
        auto value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key.empty() || value.empty()) throw ParseError(where + ": empty key or value");
        if (!values.emplace(key, value).second) throw ValidationError(key, "given more than once");
    }

    static const std::set<std::string> known{"format", "terminals", "protocol", "tie_break",
                                             "seed",   "source",    "target",   "emit_transcript"};
    for (const auto& [k, v] : values)
        if (!known.contains(k)) throw ValidationError(k, "unknown field");

    auto require = [&](const std::string& k) -> const std::string& {
        auto it = values.find(k);
        if (it == values.end()) throw ValidationError(k, "missing");
        return it->second;
    };

    if (require("format") != kScenarioFormat)
        throw ValidationError("format", "expected '" + std::string(kScenarioFormat) + "'");

    Scenario s;
    const auto m = detail::parse_unsigned(require("terminals"), "terminals");
    if (m < 2) throw ValidationError("terminals", "need at least 2 terminals");
    s.network = NetworkSpec(m);

    const auto& proto = require("protocol");
    if (proto == "broadcast")
        s.protocol = Protocol::broadcast;
    else if (proto == "subgroup")
        s.protocol = Protocol::subgroup;
    else if (proto == "group")
        s.protocol = Protocol::group;
    else
        throw ValidationError("protocol", "expected broadcast, subgroup or group, got '" + proto + "'");

    if (auto it = values.find("tie_break"); it != values.end()) {
        const auto t = parse_tie_break(it->second);
        if (!t) throw ValidationError("tie_break", "expected lex-kruskal or degree-min");
        s.tie_break = *t;
    }
    if (auto it = values.find("seed"); it != values.end()) s.seed = detail::parse_unsigned(it->second, "seed");
    if (auto it = values.find("emit_transcript"); it != values.end()) s.emit_transcript = it->second;

    if (s.protocol == Protocol::subgroup) {
        s.source = detail::parse_unsigned(require("source"), "source");
        s.target = detail::parse_unsigned(require("target"), "target");
        if (s.source >= m) throw ValidationError("source", "terminal out of range");
        if (s.target >= m) throw ValidationError("target", "terminal out of range");
        if (s.source == s.target) throw ValidationError("target", "must differ from source");
    } else {
        for (const char* k : {"source", "target"})
            if (values.contains(k)) throw ValidationError(k, "only valid for protocol = subgroup");
    }

    std::set<Pair> seen;
    for (const auto& p : pairs) {
        if (p.i < 0 || static_cast<std::uint64_t>(p.i) >= m) throw ValidationError(p.field + ".i", "terminal out of range");
        if (p.j < 0 || static_cast<std::uint64_t>(p.j) >= m) throw ValidationError(p.field + ".j", "terminal out of range");
        if (p.i == p.j) throw ValidationError(p.field, "self-pair");
        if (p.bits < 0) throw ValidationError(p.field + ".bits", "budget must be nonnegative");
        const auto key = Pair::of(static_cast<TerminalId>(p.i), static_cast<TerminalId>(p.j));
        if (!seen.insert(key).second) throw ValidationError(p.field, "pair listed twice");
        s.network.set_budget(key.lo, key.hi, static_cast<std::uint64_t>(p.bits));
    }
    if (s.protocol == Protocol::broadcast && !s.network.is_star(0))
        throw ValidationError("protocol", "broadcast needs every positive budget to involve terminal 0");
    return s;
}

inline Scenario parse_scenario(const std::string& text) {
    std::istringstream is(text);
    return parse_scenario(is);
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario '" + path + "'");
    return parse_scenario(in);
}

inline BoundReport scenario_bound(const Scenario& s) {
    switch (s.protocol) {
    case Protocol::broadcast: return broadcast_bound(s.network);
    case Protocol::subgroup: return subgroup_bound(s.network, s.source, s.target);
    case Protocol::group: return group_bound(s.network);
    }
    throw ValidationError("protocol", "unknown");
}

struct RunReport {
    Protocol protocol = Protocol::group;
    std::optional<Rational> bound;
    std::size_t key_length = 0;
    std::optional<Rational> gap;
    std::uint64_t iterations = 0;
    std::uint64_t flow_value = 0;
    SecrecyReport secrecy;
    std::size_t transcript_messages = 0;
    std::size_t transcript_bits = 0;
    double wall_ms = 0.0;

    bool ok() const noexcept { return secrecy.secret() && (!gap || *gap >= 0); }
};

struct RunOutcome {
    PairwiseKeyStore store;
    GroupKeyResult result;
    RunReport report;
};

/// Pairwise keys and protocol randomness both derive from `scenario.seed`.
inline RunOutcome run(const Scenario& s) {
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out{generate_pairwise_keys(s.network, s.seed), {}, {}};
    switch (s.protocol) {
    case Protocol::broadcast: out.result = run_broadcast(out.store, s.network); break;
    case Protocol::subgroup: out.result = run_subgroup(out.store, s.network, s.source, s.target, s.seed); break;
    case Protocol::group: out.result = run_group_key(out.store, s.network, s.tie_break); break;
    }
    const auto forms = out.result.transcript.forms();
    auto& r = out.report;
    r.protocol = s.protocol;
    r.bound = out.result.stats.bound;
    r.gap = out.result.stats.gap;
    r.key_length = out.result.key_length();
    r.iterations = out.result.stats.iterations;
    r.flow_value = out.result.stats.flow_value;
    r.secrecy = verify_independence(out.result.key_forms, forms, out.store.basis());
    r.transcript_messages = out.result.transcript.size();
    r.transcript_bits = out.result.transcript.total_bits();
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

struct VerifyReport {
    bool parsed = false;
    bool matches_rerun = false;
    bool forms_consistent = false;
    SecrecyReport secrecy;

    bool ok() const noexcept { return parsed && matches_rerun && forms_consistent && secrecy.secret(); }
};

/// Re-runs the scenario and checks a saved transcript against it: same messages,
/// every recorded form evaluates to its payload bit, and the key stays secret
/// given exactly the recorded forms.
inline VerifyReport verify_transcript(const Scenario& s, std::istream& saved) {
    const auto rerun = run(s);
    VerifyReport v;
    const auto transcript = read_transcript(saved, rerun.store.basis());
    v.parsed = true;
    v.matches_rerun = transcript == rerun.result.transcript;
    v.forms_consistent = true;
    for (const auto& m : transcript.messages())
        for (std::size_t n = 0; n < m.forms.size(); ++n)
            if (m.forms[n].evaluate(rerun.store.basis()) != (m.payload[n] != 0)) v.forms_consistent = false;
    const auto forms = transcript.forms();
    v.secrecy = verify_independence(rerun.result.key_forms, forms, rerun.store.basis());
    return v;
}

inline std::string bits_hex(const std::vector<std::uint8_t>& bits) { return to_hex(bits); }

/// Human-readable report. Wall time is printed only when asked, so reports are
/// byte-identical across runs by default.
inline std::string render_text(const Scenario& s, const RunOutcome& o, bool with_time = false) {
    const auto& r = o.report;
    std::ostringstream os;
    os << "protocol      " << to_string(r.protocol);
    if (r.protocol == Protocol::group) os << " (tie-break " << to_string(s.tie_break) << ")";
    if (r.protocol == Protocol::subgroup) os << " (source " << s.source << ", target " << s.target << ")";
    os << "\nterminals     " << s.network.terminals() << "\nseed          " << s.seed << "\n";
    if (r.bound)
        os << "bound         " << to_string(*r.bound) << " (floor " << floor(*r.bound) << ")\n";
    else
        os << "bound         not computed (too many terminals)\n";
    os << "key length    " << r.key_length << "\n";
    os << "key           " << bits_hex(o.result.key) << "\n";
    if (r.gap) os << "gap           " << to_string(*r.gap) << "\n";
    if (r.protocol == Protocol::group) os << "iterations    " << r.iterations << "\n";
    if (r.protocol == Protocol::subgroup) os << "max flow      " << r.flow_value << "\n";
    os << "transcript    " << r.transcript_messages << " messages, " << r.transcript_bits << " bits\n";
    os << "secrecy       rank_key " << r.secrecy.rank_key << ", rank_transcript " << r.secrecy.rank_transcript
       << ", rank_joint " << r.secrecy.rank_joint << ", leaked " << r.secrecy.leaked_bits << ", uniform "
       << (r.secrecy.uniform ? "yes" : "no") << "\n";
    if (with_time) os << "wall time     " << r.wall_ms << " ms\n";
    return os.str();
}

inline nlohmann::json render_json(const Scenario& s, const RunOutcome& o, bool with_time = false) {
    const auto& r = o.report;
    nlohmann::json j;
    j["protocol"] = to_string(r.protocol);
    j["terminals"] = s.network.terminals();
    j["seed"] = s.seed;
    if (r.protocol == Protocol::group) j["tie_break"] = to_string(s.tie_break);
    if (r.protocol == Protocol::subgroup) {
        j["source"] = s.source;
        j["target"] = s.target;
        j["max_flow"] = r.flow_value;
    }
    if (r.bound) {
        j["bound"] = to_string(*r.bound);
        j["bound_floor"] = floor(*r.bound);
    } else {
        j["bound"] = nullptr;
    }
    j["key_length"] = r.key_length;
    j["key"] = bits_hex(o.result.key);
    j["gap"] = r.gap ? nlohmann::json(to_string(*r.gap)) : nlohmann::json(nullptr);
    if (r.protocol == Protocol::group) j["iterations"] = r.iterations;
    j["transcript"] = {{"messages", r.transcript_messages}, {"bits", r.transcript_bits}};
    j["secrecy"] = {{"rank_key", r.secrecy.rank_key},
                    {"rank_transcript", r.secrecy.rank_transcript},
                    {"rank_joint", r.secrecy.rank_joint},
                    {"leaked_bits", r.secrecy.leaked_bits},
                    {"uniform", r.secrecy.uniform}};
    if (with_time) j["wall_ms"] = r.wall_ms;
    return j;
}

} // namespace pinkey

#endif
