#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

#include "fraisse/amalgam.hpp"
#include "fraisse/classify.hpp"
#include "fraisse/generic.hpp"
#include "fraisse/witness.hpp"

// JSON (de)serialization of library results. Everything needed to re-check a
// verdict is embedded, so a report can be verified without the input file.
namespace fraisse::report {

using json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;
inline constexpr const char *kTool = "fraisse-lab";
inline constexpr const char *kVersion = "0.1.0";

class FormatError : public PreconditionError
{
public:
    using PreconditionError::PreconditionError;
};

namespace detail {

template <class T>
T get(const json &j, const char *key)
{
    if (!j.is_object() || !j.contains(key))
        throw FormatError(std::string("report field '") + key + "' is missing");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw FormatError(std::string("report field '") + key + "' has the wrong type");
    }
}

inline const json &at(const json &j, const char *key)
{
    if (!j.is_object() || !j.contains(key))
        throw FormatError(std::string("report field '") + key + "' is missing");
    return j.at(key);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Core values

inline json to_json(const Signature &sig)
{
    json out = json::array();
    for (const auto &s : sig.symbols())
        out.push_back({{"name", s.name}, {"arity", s.arity}, {"symmetric", s.symmetric}});
    return out;
}

inline SignaturePtr signature_from_json(const json &j)
{
    std::vector<Symbol> syms;
    for (const auto &s : j)
        syms.push_back({detail::get<std::string>(s, "name"), detail::get<int>(s, "arity"),
                        detail::get<bool>(s, "symmetric")});
    return make_signature(std::move(syms));
}

inline json to_json(const RelStructure &s)
{
    json rel = json::object();
    for (std::size_t sym = 0; sym < s.symbol_count(); ++sym) {
        json tuples = json::array();
        for (std::size_t i = 0; i < s.instance_count(sym); ++i) {
            auto t = s.instance(sym, i);
            tuples.push_back(std::vector<int>(t.begin(), t.end()));
        }
        rel[s.signature()[sym].name] = std::move(tuples);
    }
    return {{"points", s.size()}, {"relations", std::move(rel)}, {"canonical", canonical_form(s).hex()}};
}

inline RelStructure structure_from_json(const json &j, const SignaturePtr &sig)
{
    std::vector<std::vector<Tuple>> lists(sig->size());
    const auto &rel = detail::at(j, "relations");
    for (auto it = rel.begin(); it != rel.end(); ++it) {
        auto idx = sig->find(it.key());
        if (!idx)
            throw FormatError("unknown relation '" + it.key() + "' in report");
        for (const auto &t : it.value())
            lists[*idx].push_back(t.get<Tuple>());
    }
    return RelStructure(sig, detail::get<int>(j, "points"), lists);
}

inline json to_json(const Embedding &e) { return {{"mode", to_string(e.mode)}, {"map", e.map}}; }

inline Embedding embedding_from_json(const json &j)
{
    auto mode = detail::get<std::string>(j, "mode");
    if (mode != "weak" && mode != "induced")
        throw FormatError("unknown embedding mode '" + mode + "'");
    return {detail::get<std::vector<int>>(j, "map"), mode == "weak" ? EmbeddingMode::Weak : EmbeddingMode::Induced};
}

inline json optional_embedding(const std::optional<Embedding> &e) { return e ? to_json(*e) : json(nullptr); }

inline std::optional<Embedding> optional_embedding_from_json(const json &j)
{
    if (j.is_null())
        return std::nullopt;
    return embedding_from_json(j);
}

inline json to_json(const ForbiddenFamily &f)
{
    json members = json::array();
    for (const auto &m : f.members())
        members.push_back(to_json(m));
    return {{"minimal", f.minimal()}, {"members", std::move(members)}};
}

inline ForbiddenFamily family_from_json(const json &j, const SignaturePtr &sig)
{
    std::vector<RelStructure> members;
    for (const auto &m : detail::at(j, "members"))
        members.push_back(structure_from_json(m, sig));
    auto f = ForbiddenFamily(sig, members);
    // A family claimed minimal is trusted only after recomputation.
    if (detail::get<bool>(j, "minimal")) {
        auto again = minimalize(f);
        if (!again.equivalent(f))
            throw VerificationError("family marked minimal is not minimal");
        return again;
    }
    return f;
}

inline json to_json(const IrreducibilityVerdict &v)
{
    return {{"k", v.k}, {"irreducible", v.irreducible}, {"unrelated", v.unrelated}};
}

inline IrreducibilityVerdict irreducibility_from_json(const json &j)
{
    return {detail::get<int>(j, "k"), detail::get<bool>(j, "irreducible"),
            detail::get<std::vector<int>>(j, "unrelated")};
}

inline json to_json(const PairPattern &p)
{
    return {{"carrier", to_json(p.carrier)}, {"left", p.left}, {"right", p.right}, {"base", p.base}};
}

inline PairPattern pattern_from_json(const json &j, const SignaturePtr &sig)
{
    return {structure_from_json(detail::at(j, "carrier"), sig), detail::get<std::vector<int>>(j, "left"),
            detail::get<std::vector<int>>(j, "right"), detail::get<std::vector<int>>(j, "base")};
}

template <std::size_t N>
json arrays(const std::vector<std::array<int, N>> &v)
{
    json out = json::array();
    for (const auto &a : v)
        out.push_back(a);
    return out;
}

template <std::size_t N>
std::vector<std::array<int, N>> arrays_from_json(const json &j)
{
    return j.get<std::vector<std::array<int, N>>>();
}

// ---------------------------------------------------------------------------
// Classification

inline json to_json(const ClosureReport &c)
{
    json members = json::array();
    for (const auto &m : c.members)
        members.push_back(to_json(m));
    return {{"closed", c.closed}, {"blocking", c.blocking ? json(*c.blocking) : json(nullptr)},
            {"two_irreducibility", std::move(members)}};
}

inline json to_json(const SimplicityVerdict &v)
{
    json two = json::array(), three = json::array();
    for (const auto &c : v.two)
        two.push_back(to_json(c));
    for (const auto &c : v.three)
        three.push_back(to_json(c));
    return {{"outcome", to_string(v.outcome)}, {"member", v.member ? json(*v.member) : json(nullptr)},
            {"two", std::move(two)}, {"three", std::move(three)}};
}

inline SimplicityVerdict simplicity_from_json(const json &j)
{
    SimplicityVerdict v;
    auto outcome = detail::get<std::string>(j, "outcome");
    if (outcome == "Simple")
        v.outcome = Simplicity::Simple;
    else if (outcome == "NotSimple")
        v.outcome = Simplicity::NotSimple;
    else if (outcome == "Undetermined")
        v.outcome = Simplicity::Undetermined;
    else
        throw FormatError("unknown simplicity outcome '" + outcome + "'");
    if (!detail::at(j, "member").is_null())
        v.member = detail::get<std::size_t>(j, "member");
    for (const auto &c : detail::at(j, "two"))
        v.two.push_back(irreducibility_from_json(c));
    for (const auto &c : detail::at(j, "three"))
        v.three.push_back(irreducibility_from_json(c));
    return v;
}

inline json to_json(const ClassReport &r)
{
    return {{"family", to_json(r.family)}, {"closure", to_json(r.closure)}, {"simplicity", to_json(r.simplicity)},
            {"notes", r.notes}};
}

// ---------------------------------------------------------------------------
// Genericity

inline json to_json(const GenericityAudit &a)
{
    json un = json::array();
    for (const auto &u : a.unrealized)
        un.push_back({{"base", u.base}, {"extension", to_json(u.extension)}});
    return {{"depth", a.depth}, {"total", a.total}, {"realized", a.realized}, {"ratio", a.ratio()},
            {"unrealized", std::move(un)}};
}

inline GenericityAudit genericity_from_json(const json &j, const SignaturePtr &sig)
{
    GenericityAudit a;
    a.depth = detail::get<int>(j, "depth");
    a.total = detail::get<std::uint64_t>(j, "total");
    a.realized = detail::get<std::uint64_t>(j, "realized");
    for (const auto &u : detail::at(j, "unrealized"))
        a.unrealized.push_back(
            {detail::get<std::vector<int>>(u, "base"), structure_from_json(detail::at(u, "extension"), sig)});
    return a;
}

// ---------------------------------------------------------------------------
// Axioms

inline json to_json(const Triple &t) { return json::array({t.a, t.b, t.c}); }

inline Triple triple_from_json(const json &j)
{
    auto v = j.get<std::array<std::uint64_t, 3>>();
    return {v[0], v[1], v[2]};
}

inline json to_json(const AxiomReport &r)
{
    json outcomes = json::array();
    for (const auto &o : r.outcomes) {
        json cx = nullptr;
        if (o.counterexample) {
            json prem = json::array(), fail = json::array();
            for (const auto &t : o.counterexample->premises)
                prem.push_back(to_json(t));
            for (const auto &t : o.counterexample->failures)
                fail.push_back(to_json(t));
            cx = {{"ambient", to_json(o.counterexample->ambient)},
                  {"premises", std::move(prem)},
                  {"failures", std::move(fail)},
                  {"map", o.counterexample->map}};
        }
        outcomes.push_back(
            {{"axiom", to_string(o.axiom)}, {"holds", o.holds()}, {"checks", o.checks}, {"counterexample", cx}});
    }
    return {{"max_size", r.max_size}, {"structures", r.structures}, {"all_hold", r.all_hold()},
            {"outcomes", std::move(outcomes)}};
}

inline Axiom axiom_from_string(const std::string &s)
{
    for (auto a : kAllAxioms)
        if (s == to_string(a))
            return a;
    throw FormatError("unknown axiom '" + s + "'");
}

inline Counterexample counterexample_from_json(const json &j, const SignaturePtr &sig)
{
    Counterexample cx{structure_from_json(detail::at(j, "ambient"), sig), {}, {}, {}};
    for (const auto &t : detail::at(j, "premises"))
        cx.premises.push_back(triple_from_json(t));
    for (const auto &t : detail::at(j, "failures"))
        cx.failures.push_back(triple_from_json(t));
    cx.map = detail::get<std::vector<int>>(j, "map");
    return cx;
}

// ---------------------------------------------------------------------------
// Witnesses

inline json to_json(const DividingWitness &w)
{
    return {{"blocked", w.blocked}, {"d", to_json(w.d)},          {"base", w.base},
            {"copies", w.copies},   {"a_prime", w.a_prime},      {"member", w.member},
            {"embedding", optional_embedding(w.embedding)}};
}

inline DividingWitness dividing_from_json(const json &j, const SignaturePtr &sig)
{
    return {detail::get<bool>(j, "blocked"),
            structure_from_json(detail::at(j, "d"), sig),
            detail::get<std::vector<int>>(j, "base"),
            detail::get<std::vector<std::vector<int>>>(j, "copies"),
            detail::get<std::vector<int>>(j, "a_prime"),
            detail::get<std::size_t>(j, "member"),
            optional_embedding_from_json(detail::at(j, "embedding"))};
}

inline json to_json(const CycleWitness &w)
{
    return {{"blocked", w.blocked}, {"cycle", to_json(w.cycle)}, {"base", w.base}, {"copies", w.copies},
            {"member", w.member},   {"embedding", optional_embedding(w.embedding)}};
}

inline CycleWitness cycle_from_json(const json &j, const SignaturePtr &sig)
{
    return {detail::get<bool>(j, "blocked"),
            structure_from_json(detail::at(j, "cycle"), sig),
            detail::get<std::vector<int>>(j, "base"),
            detail::get<std::vector<std::vector<int>>>(j, "copies"),
            detail::get<std::size_t>(j, "member"),
            optional_embedding_from_json(detail::at(j, "embedding"))};
}

inline json to_json(const NonSimplicityWitness &w)
{
    json cert = nullptr;
    if (w.certificate)
        cert = {{"extended", to_json(w.certificate->extended)},
                {"star", w.certificate->star},
                {"embedding", to_json(w.certificate->embedding)}};
    return {{"member", w.member},
            {"a", to_json(w.a)},
            {"triple", w.triple},
            {"hat", w.hat},
            {"rows", w.rows},
            {"e", to_json(w.e)},
            {"edges", w.e.total_instances()},
            {"hat_points", w.hat_points},
            {"row_points", arrays(w.row_points)},
            {"e_with_b1", to_json(w.e_with_b1)},
            {"b1", w.b1},
            {"certificate", std::move(cert)}};
}

inline NonSimplicityWitness nonsimplicity_from_json(const json &j, const SignaturePtr &sig)
{
    std::optional<ContradictionCertificate> cert;
    if (const auto &c = detail::at(j, "certificate"); !c.is_null())
        cert = ContradictionCertificate{structure_from_json(detail::at(c, "extended"), sig),
                                        detail::get<int>(c, "star"),
                                        embedding_from_json(detail::at(c, "embedding"))};
    return {detail::get<std::size_t>(j, "member"),
            structure_from_json(detail::at(j, "a"), sig),
            detail::get<std::array<int, 3>>(j, "triple"),
            detail::get<std::vector<int>>(j, "hat"),
            detail::get<int>(j, "rows"),
            structure_from_json(detail::at(j, "e"), sig),
            detail::get<std::vector<int>>(j, "hat_points"),
            arrays_from_json<2>(detail::at(j, "row_points")),
            structure_from_json(detail::at(j, "e_with_b1"), sig),
            detail::get<int>(j, "b1"),
            std::move(cert)};
}

inline json to_json(const std::vector<std::pair<std::size_t, Tuple>> &v)
{
    json out = json::array();
    for (const auto &[sym, t] : v)
        out.push_back({{"symbol", sym}, {"tuple", t}});
    return out;
}

inline std::vector<std::pair<std::size_t, Tuple>> instances_from_json(const json &j)
{
    std::vector<std::pair<std::size_t, Tuple>> out;
    for (const auto &e : j)
        out.emplace_back(detail::get<std::size_t>(e, "symbol"), detail::get<Tuple>(e, "tuple"));
    return out;
}

inline json to_json(const Sop3Certificate &c)
{
    json proofs = json::array();
    for (const auto &p : c.proofs) {
        json cases = json::array();
        for (const auto &k : p.cases)
            cases.push_back({{"assignment", k.assignment}, {"member", k.member}, {"embedding", to_json(k.embedding)}});
        proofs.push_back({{"i", p.i},
                          {"j", p.j},
                          {"params", p.params},
                          {"forced", to_json(p.forced)},
                          {"open", to_json(p.open)},
                          {"cases", std::move(cases)}});
    }
    return {{"rows", c.rows},
            {"structure", to_json(c.structure)},
            {"d", arrays(c.d)},
            {"hat_points", c.hat_points},
            {"players", c.players},
            {"p", to_json(c.p)},
            {"q", to_json(c.q)},
            {"proofs", std::move(proofs)}};
}

inline Sop3Certificate sop3_from_json(const json &j, const SignaturePtr &sig)
{
    std::vector<PairProof> proofs;
    for (const auto &p : detail::at(j, "proofs")) {
        PairProof proof;
        proof.i = detail::get<int>(p, "i");
        proof.j = detail::get<int>(p, "j");
        proof.params = detail::get<std::vector<int>>(p, "params");
        proof.forced = instances_from_json(detail::at(p, "forced"));
        proof.open = instances_from_json(detail::at(p, "open"));
        for (const auto &k : detail::at(p, "cases"))
            proof.cases.push_back({detail::get<std::uint64_t>(k, "assignment"), detail::get<std::size_t>(k, "member"),
                                   embedding_from_json(detail::at(k, "embedding"))});
        proofs.push_back(std::move(proof));
    }
    return {detail::get<int>(j, "rows"),
            structure_from_json(detail::at(j, "structure"), sig),
            arrays_from_json<2>(detail::at(j, "d")),
            detail::get<std::vector<int>>(j, "hat_points"),
            detail::get<std::vector<int>>(j, "players"),
            pattern_from_json(detail::at(j, "p"), sig),
            pattern_from_json(detail::at(j, "q"), sig),
            std::move(proofs)};
}

// ---------------------------------------------------------------------------
// Re-verification of whole reports

/// Re-checks the verdict of a report produced by the command-line tool,
/// using only the report and library entry points.
inline Check verify_report(const json &r)
{
    if (detail::get<int>(r, "schema") != kSchema)
        return Check::fail("unsupported schema version");
    const auto &cmd = detail::at(r, "command");
    const auto name = detail::get<std::string>(cmd, "name");
    const auto verdict = detail::get<std::string>(r, "verdict");
    if (verdict == "error")
        return Check::fail("report records an input error; nothing to verify");
    const auto &res = detail::at(r, "result");
    auto sig = signature_from_json(detail::at(res, "signature"));

    if (name == "classify") {
        auto input = family_from_json(detail::at(res, "input"), sig);
        auto fam = family_from_json(detail::at(res, "family"), sig);
        if (!minimalize(input).equivalent(fam))
            return Check::fail("minimal family does not match the input");
        auto v = simplicity_from_json(detail::at(res, "simplicity"));
        if (!verify_simplicity(v, fam))
            return Check::fail("simplicity certificates do not re-verify");
        if (to_string(v.outcome) != verdict)
            return Check::fail("verdict does not match the simplicity outcome");
        auto closure = closure_under_free_amalgam(fam);
        if (closure.closed != detail::get<bool>(detail::at(res, "closure"), "closed"))
            return Check::fail("closure verdict does not re-verify");
        return {};
    }
    if (name == "minimalize") {
        auto input = family_from_json(detail::at(res, "input"), sig);
        auto fam = family_from_json(detail::at(res, "family"), sig);
        if (!minimalize(input).equivalent(fam))
            return Check::fail("minimal family does not match the input");
        if (verdict != "minimal")
            return Check::fail("verdict does not match the family");
        return {};
    }
    if (name == "irreducible") {
        auto s = structure_from_json(detail::at(res, "structure"), sig);
        auto v = irreducibility_from_json(detail::at(res, "irreducibility"));
        auto again = is_k_irreducible(s, v.k);
        if (again.irreducible != v.irreducible)
            return Check::fail("irreducibility verdict does not re-verify");
        if (!v.irreducible && (static_cast<int>(v.unrelated.size()) != v.k || related(s, v.unrelated)))
            return Check::fail("witness tuple is related");
        if (verdict != (v.irreducible ? "irreducible" : "reducible"))
            return Check::fail("verdict does not match the certificate");
        return {};
    }
    if (name == "generate" || name == "audit") {
        auto fam = family_from_json(detail::at(res, "family"), sig);
        auto s = structure_from_json(detail::at(res, "structure"), sig);
        if (verdict == "not-free") {
            auto e = embedding_from_json(detail::at(res, "embedding"));
            auto m = detail::get<std::size_t>(res, "member");
            if (m >= fam.size() || !is_embedding(fam[m], s, e.map, EmbeddingMode::Weak))
                return Check::fail("forbidden copy does not re-verify");
            return {};
        }
        if (!is_free(s, fam))
            return Check::fail("structure is not free of the family");
        auto audit = genericity_from_json(detail::at(res, "audit"), sig);
        auto again = extension_axiom_audit(s, fam, audit.depth);
        if (again.total != audit.total || again.realized != audit.realized)
            return Check::fail("extension audit counts do not re-verify");
        for (const auto &u : audit.unrealized)
            if (!verify_unrealized(u, s, fam))
                return Check::fail("reported unrealized extension is realized");
        if (verdict != (audit.complete() ? "complete" : "incomplete"))
            return Check::fail("verdict does not match the audit");
        if (name == "generate") {
            const auto &opt = detail::at(res, "options");
            GenerateOptions o;
            o.size = detail::get<int>(opt, "size");
            o.depth = detail::get<int>(opt, "depth");
            o.seed = detail::get<std::uint64_t>(opt, "seed");
            o.allow_unclosed = detail::get<bool>(opt, "allow_unclosed");
            o.fill = detail::get<bool>(opt, "fill");
            if (!(generate(fam, o) == s))
                return Check::fail("regenerating with the recorded seed gives a different structure");
        }
        return {};
    }
    if (name == "embed") {
        auto a = structure_from_json(detail::at(res, "a"), sig);
        auto b = structure_from_json(detail::at(res, "b"), sig);
        auto mode = detail::get<std::string>(res, "mode") == "weak" ? EmbeddingMode::Weak : EmbeddingMode::Induced;
        if (verdict == "found") {
            auto e = embedding_from_json(detail::at(res, "embedding"));
            return is_embedding(a, b, e.map, mode) ? Check{} : Check::fail("embedding does not re-verify");
        }
        SearchOptions opts;
        if (verdict == "budget-exceeded")
            opts.node_budget = detail::get<std::uint64_t>(res, "budget");
        auto again = search_embedding(a, b, mode, {}, opts);
        bool same = (verdict == "none" && again.status == SearchStatus::NotFound) ||
                    (verdict == "budget-exceeded" && again.status == SearchStatus::BudgetExceeded);
        return same ? Check{} : Check::fail("search outcome does not re-verify");
    }
    if (name == "axioms") {
        auto rep = detail::at(res, "axioms");
        const int max_size = detail::get<int>(rep, "max_size");
        bool all = true;
        for (const auto &o : detail::at(rep, "outcomes")) {
            if (o.at("counterexample").is_null())
                continue;
            all = false;
            auto ax = axiom_from_string(detail::get<std::string>(o, "axiom"));
            if (!confirms_violation(ax, counterexample_from_json(o.at("counterexample"), sig), fa_predicate()))
                return Check::fail(std::string("counterexample for ") + to_string(ax) + " does not re-verify");
        }
        if (all) {
            auto again = check_axioms(sig, max_size);
            if (!again.all_hold())
                return Check::fail("exhaustive recheck found a counterexample");
        }
        if (verdict != (all ? "all-hold" : "violated"))
            return Check::fail("verdict does not match the outcomes");
        return {};
    }
    if (name == "witness") {
        auto kind = detail::get<std::string>(cmd, "kind");
        auto fam = family_from_json(detail::at(res, "family"), sig);
        if (kind == "nonsimplicity" || kind == "sop3") {
            if (verdict != "certified")
                return Check::fail("verdict does not match the witness");
            auto w = nonsimplicity_from_json(detail::at(res, "witness"), sig);
            if (auto c = verify_nonsimplicity(w, fam); !c)
                return c;
            if (kind == "sop3")
                return verify_sop3(sop3_from_json(detail::at(res, "certificate"), sig), fam);
            return {};
        }
        auto p = pattern_from_json(detail::at(res, "pattern"), sig);
        if (kind == "dividing") {
            auto w = dividing_from_json(detail::at(res, "witness"), sig);
            if (verdict != (w.blocked ? "blocked" : "free"))
                return Check::fail("verdict does not match the witness");
            return verify_dividing(w, p, fam);
        }
        if (kind == "sop-cycle") {
            auto w = cycle_from_json(detail::at(res, "witness"), sig);
            if (verdict != (w.blocked ? "blocked" : "free"))
                return Check::fail("verdict does not match the witness");
            return verify_cycle(w, p, fam);
        }
        return Check::fail("unknown witness kind '" + kind + "'");
    }
    return Check::fail("unknown command '" + name + "'");
}

} // namespace fraisse::report
