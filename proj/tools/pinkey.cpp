// pinkey: command-line front end for the group key simulator.
//
//   pinkey bound  --scenario s.txt
//   pinkey run    --scenario s.txt [--seed N] [--tie-break P] [--emit-transcript out] [--format F]
//   pinkey verify --scenario s.txt --transcript out
//   pinkey oracle {mincut|partitions|multicut|packing|mi} (--scenario s.txt | --terminals N --edge i,j,w ...)
//
// Exit codes: 0 success, 1 other error, 2 validation, 3 guard exceeded,
// 4 secrecy or self-check violation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pinkey/pinkey.hpp"

namespace {

using namespace pinkey;

enum ExitCode : int { kOk = 0, kError = 1, kValidation = 2, kGuard = 3, kSecrecy = 4 };

enum class Format { text, machine };

struct Common {
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::string tie_break;
    std::string format = "text";
};

Format parse_format(const std::string& f) {
    if (f == "text") return Format::text;
    if (f == "machine-readable") return Format::machine;
    throw ValidationError("--format", "expected text or machine-readable");
}

Scenario load(const Common& c) {
    auto s = load_scenario(c.scenario_path);
    if (c.seed) s.seed = *c.seed;
    if (!c.tie_break.empty()) {
        const auto t = parse_tie_break(c.tie_break);
        if (!t) throw ValidationError("--tie-break", "expected lex-kruskal or degree-min");
        s.tie_break = *t;
    }
    return s;
}

int cmd_bound(const Common& c) {
    const auto s = load(c);
    const auto b = scenario_bound(s);
    if (parse_format(c.format) == Format::machine) {
        nlohmann::json j{{"case", to_string(b.bound_case)},
                         {"bound", to_string(b.value)},
                         {"bound_floor", floor(b.value)},
                         {"witness", b.witness.str()},
                         {"formula", b.formula}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "case          " << to_string(b.bound_case) << "\n"
                  << "bound         " << to_string(b.value) << " (floor " << floor(b.value) << ")\n"
                  << "witness       " << b.witness.str() << "\n"
                  << "formula       " << b.formula << "\n";
    }
    return kOk;
}

int cmd_run(const Common& c, const std::string& emit, bool timing) {
    const auto s = load(c);
    const auto outcome = run(s);
    const auto path = emit.empty() ? s.emit_transcript.value_or("") : emit;
    if (!path.empty()) {
        std::ofstream out(path);
        if (!out) throw ParseError("cannot write transcript to '" + path + "'");
        write_transcript(out, outcome.result.transcript, outcome.store.basis());
    }
    if (parse_format(c.format) == Format::machine)
        std::cout << render_json(s, outcome, timing).dump(2) << '\n';
    else
        std::cout << render_text(s, outcome, timing);
    return outcome.report.ok() ? kOk : kSecrecy;
}

int cmd_verify(const Common& c, const std::string& transcript_path) {
    const auto s = load(c);
    std::ifstream in(transcript_path);
    if (!in) throw ParseError("cannot open transcript '" + transcript_path + "'");
    const auto v = verify_transcript(s, in);
    if (parse_format(c.format) == Format::machine) {
        nlohmann::json j{{"matches_rerun", v.matches_rerun},
                         {"forms_consistent", v.forms_consistent},
                         {"leaked_bits", v.secrecy.leaked_bits},
                         {"uniform", v.secrecy.uniform},
                         {"ok", v.ok()}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "matches rerun     " << (v.matches_rerun ? "yes" : "no") << "\n"
                  << "forms consistent  " << (v.forms_consistent ? "yes" : "no") << "\n"
                  << "leaked bits       " << v.secrecy.leaked_bits << "\n"
                  << "uniform           " << (v.secrecy.uniform ? "yes" : "no") << "\n"
                  << (v.ok() ? "OK\n" : "FAILED\n");
    }
    return v.ok() ? kOk : kSecrecy;
}

struct OracleArgs {
    std::string kind;
    std::size_t terminals = 0;
    std::vector<std::string> edges;
    std::optional<std::size_t> source, target;
    std::vector<std::size_t> group;
};

WeightedGraph oracle_graph(const Common& c, const OracleArgs& o, std::optional<Scenario>& scenario) {
    if (!c.scenario_path.empty()) {
        scenario = load(c);
        return WeightedGraph::from(scenario->network);
    }
    if (o.terminals < 2) throw ValidationError("--terminals", "need --scenario or --terminals >= 2");
    NetworkSpec spec(o.terminals);
    for (const auto& e : o.edges) {
        std::istringstream es(e);
        std::int64_t i = 0, j = 0, w = 0;
        char c1 = 0, c2 = 0;
        if (!(es >> i >> c1 >> j >> c2 >> w) || c1 != ',' || c2 != ',')
            throw ParseError("--edge expects i,j,w, got '" + e + "'");
        if (i < 0 || j < 0 || w < 0) throw ValidationError("--edge", "values must be nonnegative");
        spec.set_budget(static_cast<TerminalId>(i), static_cast<TerminalId>(j), static_cast<std::uint64_t>(w));
    }
    return WeightedGraph::from(spec);
}

int cmd_oracle(const Common& c, const OracleArgs& o) {
    std::optional<Scenario> scenario;
    const auto g = oracle_graph(c, o, scenario);
    const auto m = g.nodes();
    const bool machine = parse_format(c.format) == Format::machine;
    nlohmann::json j{{"oracle", o.kind}};

    if (o.kind == "mincut") {
        auto s = o.source.value_or(scenario && scenario->protocol == Protocol::subgroup ? scenario->source : 0);
        auto t = o.target.value_or(scenario && scenario->protocol == Protocol::subgroup ? scenario->target : m - 1);
        const auto cut = min_st_cut_bruteforce(g, s, t);
        j["value"] = cut.value;
        j["witness"] = cut.witness.str();
    } else if (o.kind == "partitions") {
        const auto group = o.group.empty() ? all_terminals(m) : o.group;
        const auto parts = enumerate_partitions(m, group);
        j["count"] = parts.size();
        auto list = nlohmann::json::array();
        for (const auto& p : parts) list.push_back(p.str());
        j["partitions"] = list;
    } else if (o.kind == "multicut") {
        const auto group = o.group.empty() ? all_terminals(m) : o.group;
        const auto mc = min_normalized_multicut(g, group);
        j["value"] = to_string(mc.value);
        j["witness"] = mc.witness.str();
    } else if (o.kind == "packing") {
        j["value"] = optimal_tree_packing_bruteforce(g);
    } else if (o.kind == "mi") {
        if (!scenario) throw ValidationError("--scenario", "the mi oracle runs a scenario");
        const auto outcome = run(*scenario);
        const auto forms = outcome.result.transcript.forms();
        const auto mi = brute_force_mutual_information(outcome.result.key_forms, forms, outcome.store.basis().size());
        j["value"] = mi.bits;
        j["factorizes"] = mi.factorizes;
        j["rank_formula"] = outcome.report.secrecy.leaked_bits;
    } else {
        throw ValidationError("oracle", "unknown oracle '" + o.kind + "'");
    }

    if (machine) {
        std::cout << j.dump(2) << '\n';
    } else {
        for (const auto& [k, v] : j.items()) {
            if (k == "partitions") {
                for (const auto& p : v) std::cout << "partition     " << p.get<std::string>() << "\n";
                continue;
            }
            std::string key = k;
            key.resize(14, ' ');
            std::cout << key << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group secret key agreement simulator for pair-wise independent networks"};
    app.require_subcommand(1);
    Common common;
    std::string emit, transcript_path;
    bool timing = false;
    OracleArgs oracle;

    auto add_common = [&](CLI::App* sub, bool scenario_required) {
        auto* opt = sub->add_option("--scenario", common.scenario_path, "Scenario file");
        if (scenario_required) opt->required();
        sub->add_option("--seed", common.seed, "Override the scenario seed");
        sub->add_option("--tie-break", common.tie_break, "lex-kruskal or degree-min");
        sub->add_option("--format", common.format, "text or machine-readable");
    };

    auto* bound = app.add_subcommand("bound", "Upper bound on the key length for the scenario");
    add_common(bound, true);

    auto* run_cmd = app.add_subcommand("run", "Run the scenario's protocol and verify secrecy");
    add_common(run_cmd, true);
    run_cmd->add_option("--emit-transcript", emit, "Write the public transcript here");
    run_cmd->add_flag("--timing", timing, "Include wall time in the report");

    auto* verify = app.add_subcommand("verify", "Re-check a saved transcript against the scenario");
    add_common(verify, true);
    verify->add_option("--transcript", transcript_path, "Saved transcript")->required();

    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force oracles on small graphs");
    add_common(oracle_cmd, false);
    oracle_cmd->add_option("kind", oracle.kind, "mincut, partitions, multicut, packing or mi")->required();
    oracle_cmd->add_option("--terminals", oracle.terminals, "Node count when no scenario is given");
    oracle_cmd->add_option("--edge", oracle.edges, "Edge as i,j,w (repeatable)");
    oracle_cmd->add_option("--source", oracle.source, "mincut source");
    oracle_cmd->add_option("--target", oracle.target, "mincut target");
    oracle_cmd->add_option("--group", oracle.group, "Terminals every block must meet (default all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*bound) return cmd_bound(common);
        if (*run_cmd) return cmd_run(common, emit, timing);
        if (*verify) return cmd_verify(common, transcript_path);
        if (*oracle_cmd) return cmd_oracle(common, oracle);
    } catch (const InstanceTooLarge& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kGuard;
    } catch (const InvariantViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSecrecy;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const NotAStar& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const UnknownBasisLabel& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
