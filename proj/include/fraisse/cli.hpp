#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fraisse/builders.hpp"
#include "fraisse/dsl.hpp"
#include "fraisse/report.hpp"

// Command dispatch for the fraisse-lab tool. Every command prints one JSON
// report on the output stream.
namespace fraisse::cli {

using report::json;

enum ExitCode : int { kOk = 0, kNegative = 1, kInputError = 2, kBudgetExceeded = 3 };

/// Raised for unusable input; carries a diagnostic code for the report.
class InputError : public std::runtime_error
{
public:
    InputError(std::string code, const std::string &what) : std::runtime_error(what), code(std::move(code)) {}
    std::string code;
};

/// Input error that already has parser diagnostics.
class DiagnosticsError : public std::runtime_error
{
public:
    explicit DiagnosticsError(std::vector<dsl::Diagnostic> d)
        : std::runtime_error("workspace has errors"), diagnostics(std::move(d))
    {
    }
    std::vector<dsl::Diagnostic> diagnostics;
};

struct Options
{
    int threads = 0;
    std::string file, family, structure, pattern, out, a, b, mode = "weak", signature = "graph", member;
    int k = 2, size = 0, seed = 1, rows = 3, copies = 3, n = 3, max_size = 4;
    std::optional<int> depth;
    std::optional<std::uint64_t> budget;
    std::vector<int> triple;
    bool fill = false, allow_unclosed = false;
};

namespace detail {

inline std::string read_file(const std::string &path)
{
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("io", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline dsl::Workspace load(const std::string &path)
{
    auto r = dsl::parse_workspace(read_file(path));
    if (!r.ok())
        throw DiagnosticsError(std::move(r.diagnostics));
    return std::move(*r.workspace);
}

inline json diagnostic(const std::string &code, const std::string &message, int line = 0, int column = 0)
{
    json d = {{"code", code}, {"message", message}};
    if (line > 0) {
        d["line"] = line;
        d["column"] = column;
    }
    return d;
}

/// Report skeleton; `result` and `verdict` are filled by the command.
struct Run
{
    json report;
    int code = kOk;

    Run(const std::string &name, const std::vector<std::string> &argv, const std::string &kind = {})
    {
        json cmd = {{"name", name}};
        if (!kind.empty())
            cmd["kind"] = kind;
        cmd["argv"] = argv;
        report = {{"schema", report::kSchema},
                  {"tool", report::kTool},
                  {"version", report::kVersion},
                  {"command", std::move(cmd)},
                  {"inputs", json::object()},
                  {"verdict", nullptr},
                  {"result", json::object()},
                  {"diagnostics", json::array()},
                  {"timing", {{"ms", 0.0}}}};
    }

    json &result() { return report["result"]; }
    void verdict(const std::string &v, int exit_code = kOk)
    {
        report["verdict"] = v;
        code = exit_code;
    }
    void hash(const std::string &name, const RelStructure &s) { report["inputs"]["hashes"][name] = canonical_form(s).hex(); }
};

inline const dsl::NamedFamily &named_family(const dsl::Workspace &ws, const std::string &name)
{
    if (name.empty())
        throw InputError("usage", "--family is required");
    if (auto *f = ws.find_family(name))
        return *f;
    throw InputError("unresolved-name", "no family named '" + name + "'");
}

inline const dsl::NamedStructure &named_structure(const dsl::Workspace &ws, const std::string &name,
                                                  const char *flag)
{
    if (name.empty())
        throw InputError("usage", std::string(flag) + " is required");
    if (auto *s = ws.find_structure(name))
        return *s;
    throw InputError("unresolved-name", "no structure named '" + name + "'");
}

/// The declared family, with member hashes recorded in the report.
inline ForbiddenFamily declared_family(const dsl::Workspace &ws, const std::string &name, Run &run)
{
    const auto &nf = named_family(ws, name);
    for (const auto &m : nf.members)
        run.hash(m, ws.structure(m).structure);
    run.report["inputs"]["family"] = name;
    return ws.family(name);
}

inline void cmd_classify(const Options &o, Run &run)
{
    auto ws = load(o.file);
    auto input = declared_family(ws, o.family, run);
    auto threads = resolve_threads(o.threads);
    auto r = classify(input, threads);
    auto &res = run.result();
    res["signature"] = report::to_json(*input.signature_ptr());
    res["input"] = report::to_json(input);
    auto body = report::to_json(r);
    for (auto it = body.begin(); it != body.end(); ++it)
        res[it.key()] = it.value();
    run.verdict(to_string(r.simplicity.outcome));
}

/// DSL text for a family: the signature, its members, and the family block.
inline std::string family_dsl(const dsl::Workspace &ws, const dsl::NamedFamily &nf, const ForbiddenFamily &f)
{
    std::string out = dsl::print_signature(nf.signature, *f.signature_ptr()) + "\n";
    dsl::NamedFamily kept{nf.name, nf.signature, {}};
    std::vector<char> used(f.size(), 0);
    for (const auto &m : nf.members) {
        const auto &s = ws.structure(m).structure;
        auto idx = f.find(s);
        if (!idx || used[*idx])
            continue;
        used[*idx] = 1;
        kept.members.push_back(m);
        out += dsl::print_structure(m, nf.signature, s) + "\n";
    }
    return out + dsl::print_family(kept);
}

inline void write_file(const std::string &path, const std::string &text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text))
        throw InputError("io", "cannot write '" + path + "'");
}

inline void cmd_minimalize(const Options &o, Run &run)
{
    auto ws = load(o.file);
    auto input = declared_family(ws, o.family, run);
    auto f = minimalize(input, resolve_threads(o.threads));
    auto text = family_dsl(ws, named_family(ws, o.family), f);
    if (!o.out.empty())
        write_file(o.out, text);
    auto &res = run.result();
    res["signature"] = report::to_json(*f.signature_ptr());
    res["input"] = report::to_json(input);
    res["family"] = report::to_json(f);
    res["removed"] = input.size() - f.size();
    res["dsl"] = text;
    run.verdict("minimal");
}

inline void cmd_irreducible(const Options &o, Run &run)
{
    auto ws = load(o.file);
    const auto &ns = named_structure(ws, o.structure, "--structure");
    run.hash(ns.name, ns.structure);
    if (o.k < 2)
        throw InputError("usage", "--k must be at least 2");
    auto v = is_k_irreducible(ns.structure, o.k);
    auto &res = run.result();
    res["signature"] = report::to_json(ns.structure.signature());
    res["structure"] = report::to_json(ns.structure);
    res["irreducibility"] = report::to_json(v);
    run.verdict(v.irreducible ? "irreducible" : "reducible", v.irreducible ? kOk : kNegative);
}

/// Shared tail of generate and audit: freeness, then the extension audit.
inline void audit_into(const ForbiddenFamily &f, const RelStructure &s, int depth, Run &run)
{
    auto &res = run.result();
    res["signature"] = report::to_json(*f.signature_ptr());
    res["family"] = report::to_json(f);
    res["structure"] = report::to_json(s);
    auto fv = is_free(s, f);
    if (!fv) {
        res["member"] = fv.member;
        res["embedding"] = report::to_json(*fv.embedding);
        run.verdict("not-free", kNegative);
        return;
    }
    auto a = extension_axiom_audit(s, f, depth);
    res["audit"] = report::to_json(a);
    run.verdict(a.complete() ? "complete" : "incomplete", a.complete() ? kOk : kNegative);
}

inline void cmd_generate(const Options &o, Run &run)
{
    auto ws = load(o.file);
    auto f = minimalize(declared_family(ws, o.family, run), resolve_threads(o.threads));
    GenerateOptions g;
    g.size = o.size;
    g.depth = o.depth.value_or(default_depth(f));
    if (o.seed < 0)
        throw InputError("usage", "--seed must be nonnegative");
    g.seed = static_cast<std::uint64_t>(o.seed);
    g.allow_unclosed = o.allow_unclosed;
    g.fill = o.fill;
    auto s = generate(f, g);
    const auto &nf = named_family(ws, o.family);
    if (!o.out.empty()) {
        auto name = o.structure.empty() ? nf.name + "_generic" : o.structure;
        write_file(o.out, family_dsl(ws, nf, f) + "\n" + dsl::print_structure(name, nf.signature, s));
    }
    run.result()["options"] = {{"size", g.size},
                               {"depth", *g.depth},
                               {"seed", g.seed},
                               {"allow_unclosed", g.allow_unclosed},
                               {"fill", g.fill}};
    audit_into(f, s, *g.depth, run);
    // Generated output is a product, not a claim; only a failed audit is negative.
    if (run.report["verdict"] == "incomplete")
        run.code = kOk;
}

inline void cmd_audit(const Options &o, Run &run)
{
    auto ws = load(o.file);
    const auto &ns = named_structure(ws, o.structure, "--structure");
    run.hash(ns.name, ns.structure);
    auto f = minimalize(declared_family(ws, o.family, run), resolve_threads(o.threads));
    if (!same_signature(f.signature_ptr(), ns.structure.signature_ptr()))
        throw InputError("signature-mismatch", "structure and family use different signatures");
    int depth = o.depth.value_or(default_depth(f));
    if (depth < 0)
        throw InputError("usage", "--depth must be nonnegative");
    audit_into(f, ns.structure, depth, run);
}

inline void cmd_axioms(const Options &o, Run &run)
{
    SignaturePtr sig;
    if (!o.file.empty()) {
        auto ws = load(o.file);
        if (auto *s = ws.find_signature(o.signature))
            sig = s->signature;
    }
    if (!sig) {
        if (o.signature == "graph")
            sig = builders::graph_signature();
        else if (o.signature == "hyper3")
            sig = builders::hypergraph_signature(3);
        else if (o.signature == "urysohn")
            sig = builders::urysohn_signature();
        else
            throw InputError("unresolved-name", "no signature named '" + o.signature + "'");
    }
    if (o.max_size < 0)
        throw InputError("usage", "--max-size must be nonnegative");
    auto r = check_axioms(sig, o.max_size, fa_predicate(), resolve_threads(o.threads));
    run.result()["signature"] = report::to_json(*sig);
    run.result()["axioms"] = report::to_json(r);
    run.verdict(r.all_hold() ? "all-hold" : "violated", r.all_hold() ? kOk : kNegative);
}

inline void cmd_embed(const Options &o, Run &run)
{
    auto ws = load(o.file);
    const auto &a = named_structure(ws, o.a, "--a");
    const auto &b = named_structure(ws, o.b, "--b");
    run.hash(a.name, a.structure);
    run.hash(b.name, b.structure);
    if (!same_signature(a.structure.signature_ptr(), b.structure.signature_ptr()))
        throw InputError("signature-mismatch", "structures use different signatures");
    if (o.mode != "weak" && o.mode != "induced")
        throw InputError("usage", "--mode must be weak or induced");
    auto mode = o.mode == "weak" ? EmbeddingMode::Weak : EmbeddingMode::Induced;
    SearchOptions opts;
    opts.node_budget = o.budget;
    auto r = search_embedding(a.structure, b.structure, mode, {}, opts);
    auto &res = run.result();
    res["signature"] = report::to_json(a.structure.signature());
    res["a"] = report::to_json(a.structure);
    res["b"] = report::to_json(b.structure);
    res["mode"] = o.mode;
    res["budget"] = o.budget ? json(*o.budget) : json(nullptr);
    res["nodes"] = r.nodes;
    switch (r.status) {
    case SearchStatus::Found:
        res["embedding"] = report::to_json(*r.embedding);
        run.verdict("found");
        break;
    case SearchStatus::NotFound: run.verdict("none", kNegative); break;
    case SearchStatus::BudgetExceeded: run.verdict("budget-exceeded", kBudgetExceeded); break;
    }
}

inline void witness_base(const ForbiddenFamily &f, Run &run)
{
    run.result()["signature"] = report::to_json(*f.signature_ptr());
    run.result()["family"] = report::to_json(f);
}

inline NonSimplicityWitness build_nonsimplicity(const dsl::Workspace &ws, const ForbiddenFamily &f, const Options &o,
                                                Run &run)
{
    std::optional<std::array<int, 3>> triple;
    if (!o.triple.empty()) {
        if (o.triple.size() != 3)
            throw InputError("usage", "--triple takes exactly three points");
        triple = std::array<int, 3>{o.triple[0], o.triple[1], o.triple[2]};
    }
    std::optional<RelStructure> a;
    if (!o.member.empty()) {
        a = named_structure(ws, o.member, "--member").structure;
    } else {
        for (std::size_t i = 0; i < f.size() && !a; ++i)
            if (!is_k_irreducible(f[i], 3))
                a = f[i];
        if (!a)
            throw InputError("hypothesis", "every member is 3-irreducible; there is no unrelated triple");
    }
    if (o.rows < 1)
        throw InputError("usage", "--rows must be at least 1");
    witness_base(f, run);
    return nonsimplicity_witness(f, *a, o.rows, triple);
}

inline PairPattern named_pattern(const dsl::Workspace &ws, const std::string &name, Run &run)
{
    if (name.empty())
        throw InputError("usage", "--pattern is required");
    if (!ws.find_pattern(name))
        throw InputError("unresolved-name", "no pattern named '" + name + "'");
    auto p = ws.pattern(name);
    run.hash(ws.find_pattern(name)->carrier, p.carrier);
    return p;
}

inline void cmd_witness(const std::string &kind, const Options &o, Run &run)
{
    auto ws = load(o.file);
    auto f = minimalize(declared_family(ws, o.family, run), resolve_threads(o.threads));
    auto &res = run.result();
    if (kind == "nonsimplicity" || kind == "sop3") {
        auto w = build_nonsimplicity(ws, f, o, run);
        res["witness"] = report::to_json(w);
        if (kind == "sop3")
            res["certificate"] = report::to_json(sop3_certificate(w, f));
        run.verdict("certified");
        return;
    }
    auto p = named_pattern(ws, o.pattern, run);
    if (!same_signature(p.carrier.signature_ptr(), f.signature_ptr()))
        throw InputError("signature-mismatch", "pattern and family use different signatures");
    witness_base(f, run);
    res["pattern"] = report::to_json(p);
    if (kind == "dividing") {
        if (o.copies < 1)
            throw InputError("usage", "--copies must be at least 1");
        res["copies"] = o.copies;
        auto w = dividing_witness(p, f, o.copies);
        res["witness"] = report::to_json(w);
        run.verdict(w.blocked ? "blocked" : "free");
    } else {
        res["n"] = o.n;
        auto w = sop_cycle(p, f, o.n);
        res["witness"] = report::to_json(w);
        run.verdict(w.blocked ? "blocked" : "free");
    }
}

inline void cmd_verify(const Options &o, Run &run)
{
    json r;
    try {
        r = json::parse(read_file(o.file));
    } catch (const json::parse_error &e) {
        throw InputError("syntax", std::string("report is not valid JSON: ") + e.what());
    }
    auto c = report::verify_report(r);
    run.result()["verified_command"] = r.value("command", json::object()).value("name", "");
    run.result()["reason"] = c.reason;
    run.verdict(c.ok ? "verified" : "rejected", c.ok ? kOk : kNegative);
}

inline void add_file(CLI::App *sub, Options &o, bool required = true)
{
    auto *opt = sub->add_option("file", o.file, "workspace file ('-' for standard input)");
    if (required)
        opt->required();
}

} // namespace detail

/// Runs one command (args excludes the program name) and prints its report.
/// Help and usage text go to `err`.
inline int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    using namespace detail;
    Options o;
    CLI::App app{"Free-amalgamation classes: classification, generation and witnesses", "fraisse-lab"};
    app.require_subcommand(1);
    app.add_option("--threads", o.threads, "worker threads (default: FRAISSE_LAB_THREADS or all cores)");
    app.set_version_flag("--version", report::kVersion);

    auto *classify_cmd = app.add_subcommand("classify", "minimalize, then closure and simplicity verdicts");
    add_file(classify_cmd, o);
    classify_cmd->add_option("--family", o.family)->required();

    auto *minimalize_cmd = app.add_subcommand("minimalize", "drop members that contain another member");
    add_file(minimalize_cmd, o);
    minimalize_cmd->add_option("--family", o.family)->required();
    minimalize_cmd->add_option("--out", o.out, "write the minimal family as a workspace file");

    auto *irreducible_cmd = app.add_subcommand("irreducible", "k-irreducibility of a structure");
    add_file(irreducible_cmd, o);
    irreducible_cmd->add_option("--structure", o.structure)->required();
    irreducible_cmd->add_option("--k", o.k);

    auto *generate_cmd = app.add_subcommand("generate", "finite approximation of the generic structure");
    add_file(generate_cmd, o);
    generate_cmd->add_option("--family", o.family)->required();
    generate_cmd->add_option("--size", o.size)->required();
    generate_cmd->add_option("--depth", o.depth);
    generate_cmd->add_option("--seed", o.seed);
    generate_cmd->add_option("--out", o.out, "write the structure as a workspace file");
    generate_cmd->add_option("--name", o.structure, "structure name in the output file");
    generate_cmd->add_flag("--fill", o.fill, "keep adding points after every extension is realized");
    generate_cmd->add_flag("--allow-unclosed", o.allow_unclosed);

    auto *audit_cmd = app.add_subcommand("audit", "extension-axiom audit of a structure");
    add_file(audit_cmd, o);
    audit_cmd->add_option("--structure", o.structure)->required();
    audit_cmd->add_option("--family", o.family)->required();
    audit_cmd->add_option("--depth", o.depth);

    auto *witness_cmd = app.add_subcommand("witness", "witness configurations with certificates");
    witness_cmd->require_subcommand(1);
    std::vector<std::pair<std::string, CLI::App *>> kinds;
    for (const char *kind : {"nonsimplicity", "sop3", "dividing", "sop-cycle"}) {
        auto *k = witness_cmd->add_subcommand(kind);
        add_file(k, o);
        k->add_option("--family", o.family)->required();
        kinds.emplace_back(kind, k);
    }
    for (int i = 0; i < 2; ++i) {
        kinds[static_cast<std::size_t>(i)].second->add_option("--rows", o.rows);
        kinds[static_cast<std::size_t>(i)].second->add_option("--member", o.member, "member structure to use");
        kinds[static_cast<std::size_t>(i)].second->add_option("--triple", o.triple, "unrelated triple of the member")
            ->expected(3)
            ->delimiter(',');
    }
    kinds[2].second->add_option("--pattern", o.pattern)->required();
    kinds[2].second->add_option("--copies", o.copies);
    kinds[3].second->add_option("--pattern", o.pattern)->required();
    kinds[3].second->add_option("--n", o.n);

    auto *axioms_cmd = app.add_subcommand("axioms", "exhaustive independence-axiom check");
    add_file(axioms_cmd, o, false);
    axioms_cmd->add_option("--signature", o.signature, "graph, hyper3, urysohn, or a signature in the file");
    axioms_cmd->add_option("--max-size", o.max_size);

    auto *embed_cmd = app.add_subcommand("embed", "embedding search");
    add_file(embed_cmd, o);
    embed_cmd->add_option("--a", o.a)->required();
    embed_cmd->add_option("--b", o.b)->required();
    embed_cmd->add_option("--mode", o.mode)->check(CLI::IsMember({"weak", "induced"}));
    embed_cmd->add_option("--budget", o.budget, "node budget");

    auto *verify_cmd = app.add_subcommand("verify", "re-check a JSON report");
    verify_cmd->add_option("report", o.file, "report file ('-' for standard input)")->required();

    // --threads is accepted after the subcommand too
    for (auto *sub : app.get_subcommands({}))
        sub->fallthrough();
    for (auto &[k, sub] : kinds)
        sub->fallthrough();

    std::string name = args.empty() ? "" : args.front();
    std::string kind;
    if (name == "witness" && args.size() > 1)
        kind = args[1];
    Run run(name, args, kind);
    auto start = std::chrono::steady_clock::now();
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        try {
            app.parse(rev);
        } catch (const CLI::CallForHelp &e) {
            return app.exit(e, err, err);
        } catch (const CLI::CallForAllHelp &e) {
            return app.exit(e, err, err);
        } catch (const CLI::CallForVersion &e) {
            out << report::kVersion << "\n";
            return kOk;
        } catch (const CLI::ParseError &e) {
            throw InputError("usage", e.what());
        }
        if (*classify_cmd)
            cmd_classify(o, run);
        else if (*minimalize_cmd)
            cmd_minimalize(o, run);
        else if (*irreducible_cmd)
            cmd_irreducible(o, run);
        else if (*generate_cmd)
            cmd_generate(o, run);
        else if (*audit_cmd)
            cmd_audit(o, run);
        else if (*axioms_cmd)
            cmd_axioms(o, run);
        else if (*embed_cmd)
            cmd_embed(o, run);
        else if (*verify_cmd)
            cmd_verify(o, run);
        else
            for (auto &[k, sub] : kinds)
                if (*sub)
                    cmd_witness(k, o, run);
    } catch (const DiagnosticsError &e) {
        run.report["result"] = json::object();
        for (const auto &d : e.diagnostics)
            run.report["diagnostics"].push_back(diagnostic(d.code, d.message, d.line, d.column));
        run.verdict("error", kInputError);
    } catch (const InputError &e) {
        run.report["result"] = json::object();
        run.report["diagnostics"].push_back(diagnostic(e.code, e.what()));
        run.verdict("error", kInputError);
    } catch (const RefusalError &e) {
        run.report["result"] = json::object();
        run.report["diagnostics"].push_back(diagnostic("refused", e.what()));
        run.verdict("error", kInputError);
    } catch (const PreconditionError &e) {
        run.report["result"] = json::object();
        run.report["diagnostics"].push_back(diagnostic("precondition", e.what()));
        run.verdict("error", kInputError);
    } catch (const VerificationError &e) {
        run.report["result"] = json::object();
        run.report["diagnostics"].push_back(diagnostic("verification", e.what()));
        run.verdict("error", kNegative);
    }
    std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
    run.report["timing"]["ms"] = ms.count();
    out << run.report.dump(2) << "\n";
    for (const auto &d : run.report["diagnostics"])
        err << "error[" << d["code"].get<std::string>() << "]"
            << (d.contains("line") ? " " + std::to_string(d["line"].get<int>()) + ":" +
                                         std::to_string(d["column"].get<int>())
                                   : std::string())
            << ": " << d["message"].get<std::string>() << "\n";
    return run.code;
}

} // namespace fraisse::cli
