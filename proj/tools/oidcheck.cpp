// oidcheck: command-line front end for the sifo library.
//
// Exit codes: 0 positive verdict, 1 negative verdict, 2 input or usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sifo/sifo.hpp"

using json = nlohmann::json;
using namespace sifo;

namespace {

struct Config {
    bool json = false;
    std::uint64_t seed = 0;
    std::size_t max_domain = 4;
    std::size_t budget = 2000;
    bool no_dual_check = false;
    bool both = false;
    std::string output;
};

/// Output of one command: exit code, text form and JSON form.
struct Report {
    int code = 0;
    std::string text;
    json data = json::object();
};

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A library error tied to the file it came from.
struct FileError {
    std::string path;
    Error error;

    std::string describe() const {
        auto pos = error.position();
        std::string where = path;
        if (pos.line > 0) where += ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column);
        return where + ": " + to_string(error.kind()) + ": " + error.message();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Parse errors carry the file name.
template <typename F>
auto parse_file(const std::string& path, F&& parse) {
    auto text = slurp(path);
    try {
        return parse(text);
    } catch (const Error& e) {
        throw FileError{path, e};
    }
}

SifoQuery read_rule(const std::string& path) {
    return parse_file(path, [](const std::string& t) { return parse_rule(t); });
}

Instance read_instance(const std::string& path) {
    return parse_file(path, [](const std::string& t) { return parse_instance(t); });
}

std::pair<SifoQuery, SifoQuery> read_pair(const std::string& a, const std::string& b) {
    auto q = read_rule(a);
    auto qp = read_rule(b);
    std::map<std::string, std::size_t> seen;
    for (const auto* r : {&q, &qp})
        for (const auto& atom : r->body) {
            auto [it, fresh] = seen.emplace(atom.predicate, atom.args.size());
            if (!fresh && it->second != atom.args.size())
                throw Error(ErrorKind::ArityClash, "predicate " + atom.predicate + " has arity " +
                                                       std::to_string(it->second) + " in one rule and " +
                                                       std::to_string(atom.args.size()) + " in the other");
        }
    return {q, qp};
}

json facts_json(const Instance& i) {
    json out = json::array();
    for (const auto& f : i) out.push_back(render(f));
    return out;
}

json facts_json(const ExtendedInstance& j) {
    json out = json::array();
    for (const auto& f : j) out.push_back(render(f));
    return out;
}

std::string mapping_text(const VariableMapping& m) {
    std::vector<std::string> parts;
    for (const auto& [k, v] : m) parts.push_back(k + "->" + v);
    return "{" + join(parts, ", ") + "}";
}

std::string set_text(const std::set<Variable>& s) { return "{" + join({s.begin(), s.end()}, ",") + "}"; }

std::string indent(const std::string& block) {
    std::string out;
    std::istringstream in(block);
    for (std::string line; std::getline(in, line);) out += "  " + line + "\n";
    return out;
}

SearchOptions search_options(const Config& c) { return SearchOptions{c.max_domain, c.budget, c.seed, 6, true}; }

// ---------------------------------------------------------------------------
// Commands

Report cmd_parse(const std::string& path, std::string kind) {
    if (kind.empty()) {
        auto ext = std::filesystem::path(path).extension().string();
        kind = ext == ".facts" ? "facts" : ext == ".xfacts" ? "xfacts" : "rules";
    }
    Report r;
    r.data["kind"] = kind;
    auto text = slurp(path);
    try {
        if (kind == "rules") {
            json rules = json::array();
            for (const auto& q : parse_rules(text)) {
                r.text += render(q) + "\n";
                rules.push_back(render(q));
            }
            r.data["rules"] = rules;
        } else if (kind == "facts") {
            auto i = parse_instance(text);
            r.text = serialize_instance(i);
            r.data["facts"] = facts_json(i);
        } else {
            auto j = parse_extended_instance(text);
            r.text = serialize_extended_instance(j);
            r.data["facts"] = facts_json(j);
        }
    } catch (const Error& e) {
        throw FileError{path, e};
    }
    return r;
}

Report cmd_eval(const std::string& rules, const std::string& facts) {
    auto q = read_rule(rules);
    auto j = eval_ocq(q, read_instance(facts));
    Report r;
    r.text = serialize_extended_instance(j);
    r.data["result"] = facts_json(j);
    r.data["oids"] = oids(j).size();
    return r;
}

Report cmd_flatten(const std::string& rules) {
    auto f = flatten(read_rule(rules));
    Report r;
    r.text = render(f) + "\n";
    r.data["flattened"] = render(f);
    return r;
}

Report cmd_chase(const std::string& rules, const std::string& facts) {
    auto c = chase(read_rule(rules), read_instance(facts));
    Report r;
    r.text = serialize_instance(c.target);
    json assignment = json::object();
    for (const auto& [k, term] : c.assignment) assignment[k] = term.render();
    r.data["target"] = facts_json(c.target);
    r.data["assignment"] = assignment;
    return r;
}

Report cmd_satisfies(const std::string& source, const std::string& target, const std::string& rules) {
    auto q = read_rule(rules);
    auto rep = satisfies_sotgd(read_instance(source), read_instance(target), q);
    Report r;
    r.code = rep.satisfied ? 0 : 1;
    r.data["satisfied"] = rep.satisfied;
    if (rep.satisfied) {
        r.text = "satisfied: yes\n";
        json witness = json::array();
        for (const auto& [key, v] : rep.witness) {
            witness.push_back({{"args", key}, {"value", v}});
            r.text += "  " + q.func_symbol + "(" + join(key) + ") = " + v + "\n";
        }
        r.data["witness"] = witness;
    } else {
        r.text = "satisfied: no\n";
        const auto& v = *rep.violation;
        r.text += "violating group: (" + join(v.key) + ")\n";
        json required = json::array();
        for (const auto& [tuple, cands] : v.required) {
            r.text += "  (" + join(tuple) + ") admits {" + join({cands.begin(), cands.end()}) + "}\n";
            required.push_back({{"tuple", tuple}, {"candidates", cands}});
        }
        r.data["violation"] = {{"key", v.key}, {"required", required}};
    }
    return r;
}

void describe_counterexample(Report& r, const SifoQuery& q, const SifoQuery& qp, const Instance& i) {
    auto j1 = eval_ocq(q, i);
    auto j2 = eval_ocq(qp, i);
    r.text += "counterexample:\n" + indent(serialize_instance(i));
    r.text += "Q1 result:\n" + indent(serialize_extended_instance(j1));
    r.text += "Q2 result:\n" + indent(serialize_extended_instance(j2));
    r.data["counterexample"] = {{"instance", facts_json(i)}, {"q1", facts_json(j1)}, {"q2", facts_json(j2)}};
}

Report oid_report(const SifoQuery& q, const SifoQuery& qp, const Config& c) {
    EquivOptions o;
    o.assert_dual_path = !c.no_dual_check;
    o.search = search_options(c);
    auto d = decide_oid_equiv(q, qp, o);
    Report r;
    r.code = d.equivalent ? 0 : 1;
    r.data["equivalent"] = d.equivalent;
    if (d.equivalent) {
        const auto& w = *d.witness;
        r.text = "oid-equivalent: yes\n";
        r.text += "pi: " + mapping_text(w.pi) + "\n";
        r.text += "forward: " + mapping_text(w.forward) + "\n";
        r.text += "backward: " + mapping_text(w.backward) + "\n";
        r.data["witness"] = {{"pi", w.pi},
                             {"forward", w.forward},
                             {"backward", w.backward},
                             {"mvForward", w.mv_forward},
                             {"mvBackward", w.mv_backward},
                             {"normalizedQ1", render(d.normalized->q)},
                             {"normalizedQ2", render(d.normalized->qprime)}};
        return r;
    }
    const auto& ref = *d.refutation;
    r.text = "oid-equivalent: no\n";
    r.text += std::string("stage: ") + to_string(ref.stage) + "\n";
    if (!ref.explanation.empty()) r.text += "reason: " + ref.explanation + "\n";
    r.data["refutation"] = {{"stage", to_string(ref.stage)}, {"explanation", ref.explanation}};
    if (ref.counterexample) describe_counterexample(r, q, qp, *ref.counterexample);
    else r.text += "counterexample: none found within budget\n";
    return r;
}

json entail_json(const EntailDecision& d) {
    json out = {{"entails", d.entails}};
    if (d.witness)
        out["witness"] = {{"h", d.witness->h}, {"yh", d.witness->yh}, {"jdCertificate", d.witness->jd_certificate}};
    if (d.counterexample)
        out["counterexample"] = {{"source", facts_json(d.counterexample->first)},
                                 {"target", facts_json(d.counterexample->second)}};
    if (!d.explanation.empty()) out["explanation"] = d.explanation;
    return out;
}

std::string entail_text(const EntailDecision& d, const std::string& label) {
    std::string out = label + ": " + (d.entails ? "yes" : "no") + "\n";
    if (d.witness) {
        out += "  h: " + mapping_text(d.witness->h) + "\n";
        out += "  Y_h: " + set_text(d.witness->yh) + "\n";
        out += "  jd certificate: " + mapping_text(d.witness->jd_certificate) + "\n";
    }
    if (!d.explanation.empty()) out += "  reason: " + d.explanation + "\n";
    if (d.counterexample) {
        out += "  source:\n" + indent(indent(serialize_instance(d.counterexample->first)));
        out += "  target:\n" + indent(indent(serialize_instance(d.counterexample->second)));
    }
    return out;
}

EntailOptions entail_options(const Config& c) { return EntailOptions{!c.no_dual_check, true}; }

Report combined_report(const SifoQuery& q, const SifoQuery& qp, const Config& c) {
    auto l = decide_logical_equiv(q, qp, entail_options(c));
    Report r;
    r.text = entail_text(l.forward, "Q1 entails Q2") + entail_text(l.backward, "Q2 entails Q1");
    r.data["forward"] = entail_json(l.forward);
    r.data["backward"] = entail_json(l.backward);
    r.data["logicallyEquivalent"] = l.equivalent;
    r.code = l.equivalent ? 0 : 1;
    if (c.both) {
        auto o = oid_report(q, qp, c);
        r.data["oidEquivalent"] = o.data["equivalent"];
        r.text += std::string("logically equivalent: ") + (l.equivalent ? "yes" : "no") +
                  "; oid-equivalent: " + (o.code == 0 ? "yes" : "no") + "\n";
    } else {
        r.text += std::string("logically equivalent: ") + (l.equivalent ? "yes" : "no") + "\n";
    }
    return r;
}

Report cmd_check(const std::string& what, const std::string& a, const std::string& b, const Config& c) {
    auto [q, qp] = read_pair(a, b);
    if (what == "oid-equiv") return oid_report(q, qp, c);
    if (what == "logical-equiv" || c.both) return combined_report(q, qp, c);
    auto d = decide_entails(q, qp, entail_options(c));
    Report r;
    r.code = d.entails ? 0 : 1;
    r.text = entail_text(d, "entails");
    r.data = entail_json(d);
    return r;
}

Report cmd_oracle(const std::string& what, const std::string& a, const std::string& b, const Config& c) {
    auto [q, qp] = read_pair(a, b);
    Report r;
    r.data["budget"] = c.budget;
    r.data["maxDomain"] = c.max_domain;
    if (what == "oid") {
        auto i = search_counterexample_oid(q, qp, search_options(c));
        r.code = i ? 1 : 0;
        r.data["found"] = i.has_value();
        if (i) {
            r.text = "separating instance found\n";
            describe_counterexample(r, q, qp, *i);
        } else {
            r.text = "no separating instance within budget\n";
        }
        return r;
    }
    auto found = search_counterexample_entail(q, qp, search_options(c));
    r.code = found ? 1 : 0;
    r.data["found"] = found.has_value();
    if (found) {
        r.text = "counterexample found: (I, J) satisfies Q1 but not Q2\n";
        r.text += "source:\n" + indent(serialize_instance(found->first));
        r.text += "target:\n" + indent(serialize_instance(found->second));
        r.data["counterexample"] = {{"source", facts_json(found->first)}, {"target", facts_json(found->second)}};
    } else {
        r.text = "no counterexample within budget\n";
    }
    return r;
}

struct GenArgs {
    std::string kind;
    std::string skolem = "All";
    std::vector<std::size_t> key;
    std::vector<std::size_t> arities;
    RandomQueryParams random;
};

Report cmd_gen(const GenArgs& g, const Config& c) {
    SifoQuery q;
    if (g.kind == "random") {
        q = gen_random_sifo(c.seed, g.random);
    } else {
        static const std::map<std::string, PrimitiveKind> kinds{
            {"GAVBase", PrimitiveKind::GAVBase}, {"ADD", PrimitiveKind::ADD}, {"ADL", PrimitiveKind::ADL},
            {"MA", PrimitiveKind::MA}};
        static const std::map<std::string, SkolemKind> skolems{
            {"Fixed", SkolemKind::Fixed}, {"All", SkolemKind::All}, {"Key", SkolemKind::Key},
            {"Random", SkolemKind::Random}};
        auto k = kinds.find(g.kind);
        auto s = skolems.find(g.skolem);
        if (k == kinds.end()) throw InputError("unknown primitive " + g.kind);
        if (s == skolems.end()) throw InputError("unknown skolem strategy " + g.skolem);
        try {
            q = gen_primitive(PrimitiveSpec{k->second, SkolemStrategy{s->second, g.key, c.seed}, g.arities});
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }
    Report r;
    r.text = render(q) + "\n";
    r.data["rule"] = render(q);
    return r;
}

// ---------------------------------------------------------------------------

void emit(const std::string& content, const std::string& path) {
    if (path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        std::fflush(stdout);
        return;
    }
    auto tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw InputError("cannot write " + path);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string error_json(const std::string& command, const std::string& kind, const std::string& message,
                       std::optional<SourcePos> pos = std::nullopt) {
    json err = {{"kind", kind}, {"message", message}};
    if (pos && pos->line > 0) err["line"] = pos->line, err["column"] = pos->column;
    json out = {{"schemaVersion", 1}, {"command", command}, {"exitCode", 2}, {"error", err}};
    return out.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    Config config;
    if (const char* env = std::getenv("OIDCHECK_SEED")) {
        try {
            config.seed = std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "error: OIDCHECK_SEED must be a non-negative integer\n";
            return 2;
        }
    }

    CLI::App app{"Decide oid-equivalence and logical entailment of sifo CQs"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--json", config.json, "Print a JSON report");
    app.add_option("--seed", config.seed, "Seed for randomized search and generation (default $OIDCHECK_SEED or 0)");
    app.add_option("--max-domain", config.max_domain, "Largest domain tried by counterexample search")
        ->check(CLI::PositiveNumber);
    app.add_option("--budget", config.budget, "Candidate instances tried by counterexample search");
    app.add_flag("--no-dual-check", config.no_dual_check, "Skip the independent cross-check of each decision");
    app.add_flag("--both", config.both, "Check both directions and report oid-equivalence too");
    app.add_option("-o,--output", config.output, "Write the report to a file instead of stdout");

    std::string file1, file2, file3, parse_kind;
    std::function<Report()> run;
    std::string command;

    auto* parse = app.add_subcommand("parse", "Validate and pretty-print a .rules, .facts or .xfacts file");
    parse->add_option("file", file1)->required();
    parse->add_option("--kind", parse_kind, "rules, facts or xfacts (default from extension)")
        ->check(CLI::IsMember({"rules", "facts", "xfacts"}));
    parse->callback([&] { command = "parse", run = [&] { return cmd_parse(file1, parse_kind); }; });

    auto* eval = app.add_subcommand("eval", "Evaluate a rule as an object-creating query");
    eval->add_option("rules", file1)->required();
    eval->add_option("facts", file2)->required();
    eval->callback([&] { command = "eval", run = [&] { return cmd_eval(file1, file2); }; });

    auto* flat = app.add_subcommand("flatten", "Print the flattened CQ of a rule");
    flat->add_option("rules", file1)->required();
    flat->callback([&] { command = "flatten", run = [&] { return cmd_flatten(file1); }; });

    auto* ch = app.add_subcommand("chase", "Chase a source instance with a rule");
    ch->add_option("rules", file1)->required();
    ch->add_option("facts", file2)->required();
    ch->callback([&] { command = "chase", run = [&] { return cmd_chase(file1, file2); }; });

    auto* sat = app.add_subcommand("satisfies", "Check (I, J) against the SO-tgd reading of a rule");
    sat->add_option("source", file1)->required();
    sat->add_option("target", file2)->required();
    sat->add_option("rules", file3)->required();
    sat->callback([&] { command = "satisfies", run = [&] { return cmd_satisfies(file1, file2, file3); }; });

    std::string check_what, oracle_what;
    auto* check = app.add_subcommand("check", "Decide a relation between two rules");
    check->add_option("relation", check_what)->required()->check(CLI::IsMember({"oid-equiv", "entails", "logical-equiv"}));
    check->add_option("q1", file1)->required();
    check->add_option("q2", file2)->required();
    check->callback([&] {
        command = "check " + check_what;
        run = [&] { return cmd_check(check_what, file1, file2, config); };
    });

    auto* oracle = app.add_subcommand("oracle", "Search for a counterexample by enumeration");
    oracle->add_option("relation", oracle_what)->required()->check(CLI::IsMember({"oid", "entail"}));
    oracle->add_option("q1", file1)->required();
    oracle->add_option("q2", file2)->required();
    oracle->callback([&] {
        command = "oracle " + oracle_what;
        run = [&] { return cmd_oracle(oracle_what, file1, file2, config); };
    });

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate a primitive or random rule");
    gen->add_option("kind", gen_args.kind, "GAVBase, ADD, ADL, MA or random")->required();
    gen->add_option("--skolem", gen_args.skolem, "Fixed, All, Key or Random");
    gen->add_option("--key", gen_args.key, "1-based key positions for --skolem Key")->delimiter(',');
    gen->add_option("--arities", gen_args.arities, "Source relation arities")->delimiter(',');
    gen->add_option("--atoms", gen_args.random.num_atoms, "Body atoms (random)")->check(CLI::PositiveNumber);
    gen->add_option("--vars", gen_args.random.num_vars, "Variables (random)")->check(CLI::PositiveNumber);
    gen->add_option("--max-arity", gen_args.random.max_arity, "Largest predicate arity (random)")
        ->check(CLI::PositiveNumber);
    gen->callback([&] { command = "gen", run = [&] { return cmd_gen(gen_args, config); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::string out;
    try {
        Report r = run();
        if (config.json) {
            json j = r.data;
            j["schemaVersion"] = 1;
            j["command"] = command;
            j["exitCode"] = r.code;
            out = j.dump(2) + "\n";
        } else {
            out = r.text;
        }
        emit(out, config.output);
        return r.code;
    } catch (const FileError& e) {
        std::cerr << "error: " << e.describe() << "\n";
        if (config.json) std::cout << error_json(command, to_string(e.error.kind()), e.describe(), e.error.position());
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (config.json) std::cout << error_json(command, to_string(e.kind()), e.what(), e.position());
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (config.json) std::cout << error_json(command, "InputError", e.what());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        if (config.json) std::cout << error_json(command, "InternalError", e.what());
    }
    return 2;
}
