#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraisse/amalgam.hpp"
#include "fraisse/forbidden.hpp"

namespace fraisse {

struct ClosureReport
{
    bool closed = true;
    std::vector<IrreducibilityVerdict> members; // 2-irreducibility, one per member
    std::optional<std::size_t> blocking;        // first member that is not 2-irreducible
};

inline void require_minimal(const ForbiddenFamily &f)
{
    if (!f.minimal())
        throw PreconditionError("family must be minimalized first");
}

inline std::vector<IrreducibilityVerdict> irreducibility_of_members(const ForbiddenFamily &f, int k,
                                                                    unsigned threads = 1)
{
    std::vector<IrreducibilityVerdict> out(f.size());
    parallel_for(f.size(), threads, [&](std::size_t i) { out[i] = is_k_irreducible(f[i], k); });
    return out;
}

/// The class of F-free structures is closed under free amalgamation iff
/// every member of the minimal family is 2-irreducible.
inline ClosureReport closure_under_free_amalgam(const ForbiddenFamily &f, unsigned threads = 1)
{
    require_minimal(f);
    ClosureReport r;
    r.members = irreducibility_of_members(f, 2, threads);
    for (std::size_t i = 0; i < r.members.size(); ++i)
        if (!r.members[i]) {
            r.closed = false;
            r.blocking = i;
            break;
        }
    return r;
}

enum class Simplicity { Simple, NotSimple, Undetermined };

inline const char *to_string(Simplicity s)
{
    switch (s) {
    case Simplicity::Simple: return "Simple";
    case Simplicity::NotSimple: return "NotSimple";
    case Simplicity::Undetermined: return "Undetermined";
    }
    return "?";
}

/// `member` is the member with an unrelated triple (NotSimple) or the first
/// member that is not 2-irreducible (Undetermined).
struct SimplicityVerdict
{
    Simplicity outcome = Simplicity::Simple;
    std::vector<IrreducibilityVerdict> two;
    std::vector<IrreducibilityVerdict> three;
    std::optional<std::size_t> member;
};

/// Decision from per-member certificates. Simple does not consult `closed`:
/// 3-irreducibility of every member suffices on its own. NotSimple needs
/// closure under free amalgamation; without it no verdict is claimed.
inline SimplicityVerdict simplicity_from_certificates(std::vector<IrreducibilityVerdict> two,
                                                      std::vector<IrreducibilityVerdict> three, bool closed)
{
    SimplicityVerdict v{Simplicity::Simple, std::move(two), std::move(three), std::nullopt};
    auto not3 = std::find_if(v.three.begin(), v.three.end(), [](const auto &c) { return !c.irreducible; });
    if (not3 == v.three.end())
        return v;
    if (closed) {
        v.outcome = Simplicity::NotSimple;
        v.member = static_cast<std::size_t>(not3 - v.three.begin());
        return v;
    }
    v.outcome = Simplicity::Undetermined;
    auto not2 = std::find_if(v.two.begin(), v.two.end(), [](const auto &c) { return !c.irreducible; });
    if (not2 != v.two.end())
        v.member = static_cast<std::size_t>(not2 - v.two.begin());
    else
        v.member = static_cast<std::size_t>(not3 - v.three.begin());
    return v;
}

inline SimplicityVerdict simplicity_verdict(const ForbiddenFamily &f, unsigned threads = 1)
{
    require_minimal(f);
    auto two = irreducibility_of_members(f, 2, threads);
    auto three = irreducibility_of_members(f, 3, threads);
    bool closed = std::all_of(two.begin(), two.end(), [](const auto &c) { return c.irreducible; });
    return simplicity_from_certificates(std::move(two), std::move(three), closed);
}

/// Re-checks every certificate in `v` against the members of `f` and the
/// outcome against the certificates.
inline bool verify_simplicity(const SimplicityVerdict &v, const ForbiddenFamily &f)
{
    if (v.two.size() != f.size() || v.three.size() != f.size())
        return false;
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (const auto *c : {&v.two[i], &v.three[i]}) {
            if (c->irreducible) {
                if (!is_k_irreducible(f[i], c->k))
                    return false;
            } else {
                auto u = c->unrelated;
                if (static_cast<int>(u.size()) != c->k || related(f[i], u))
                    return false;
                std::sort(u.begin(), u.end());
                if (std::adjacent_find(u.begin(), u.end()) != u.end() || u.front() < 0 || u.back() >= f[i].size())
                    return false;
            }
        }
        if (v.two[i].k != 2 || v.three[i].k != 3)
            return false;
    }
    bool closed = std::all_of(v.two.begin(), v.two.end(), [](const auto &c) { return c.irreducible; });
    auto again = simplicity_from_certificates(v.two, v.three, closed);
    return again.outcome == v.outcome && again.member == v.member;
}

// ---------------------------------------------------------------------------
// Bounded amalgamation audit

struct AmalgamViolation
{
    AmalgamProblem problem;
    AmalgamResult amalgam;
    std::size_t member = 0;
    Embedding embedding;
};

struct AmalgamationAudit
{
    int max_size = 0;
    std::uint64_t problems = 0;
    std::uint64_t violations = 0;
    std::vector<AmalgamViolation> examples; // at most kMaxExamples
    static constexpr std::size_t kMaxExamples = 10;
};

/// Whether `v` really is a violation: the sides are F-free, the amalgam is
/// the free amalgam of the problem, and the member embeds into it.
inline bool verify_violation(const AmalgamViolation &v, const ForbiddenFamily &f)
{
    if (v.member >= f.size() || !is_free(v.problem.a, f) || !is_free(v.problem.b, f))
        return false;
    auto again = free_amalgam(v.problem);
    return again.structure == v.amalgam.structure &&
           is_embedding(f[v.member], again.structure, v.embedding.map, EmbeddingMode::Weak);
}

/// Glue maps between A and B: every injective partial map that is an
/// isomorphism of the induced substructures on its domain and range.
inline std::vector<std::vector<std::pair<int, int>>> glue_maps(const RelStructure &a, const RelStructure &b)
{
    std::vector<std::vector<std::pair<int, int>>> out;
    const int na = a.size();
    for (std::uint64_t dom = 0; dom < (std::uint64_t{1} << na); ++dom) {
        auto sub = induced_substructure(a, PointSet::from_mask(dom));
        for_each_embedding(sub.structure, b, EmbeddingMode::Induced, {}, [&](const std::vector<int> &m) {
            std::vector<std::pair<int, int>> g;
            for (std::size_t i = 0; i < m.size(); ++i)
                g.emplace_back(sub.to_parent[i], m[i]);
            out.push_back(std::move(g));
            return true;
        });
    }
    return out;
}

/// Every amalgamation problem with F-free sides of size at most max_size
/// (one side per isomorphism class, every glue map), checking that the free
/// amalgam stays F-free. Pairs are visited by increasing total size.
inline AmalgamationAudit bounded_amalgamation_audit(const ForbiddenFamily &f, int max_size, unsigned threads = 1)
{
    auto sides = enumerate_up_to(f.signature_ptr(), max_size,
                                 [&](const RelStructure &s) { return is_free(s, f).free; });
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < sides.size(); ++i)
        for (std::size_t j = 0; j < sides.size(); ++j)
            pairs.emplace_back(i, j);
    std::stable_sort(pairs.begin(), pairs.end(), [&](const auto &x, const auto &y) {
        return sides[x.first].size() + sides[x.second].size() < sides[y.first].size() + sides[y.second].size();
    });

    struct Slot
    {
        std::uint64_t problems = 0, violations = 0;
        std::vector<AmalgamViolation> examples;
    };
    std::vector<Slot> slots(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t k) {
        const auto &a = sides[pairs[k].first];
        const auto &b = sides[pairs[k].second];
        auto &slot = slots[k];
        for (auto &g : glue_maps(a, b)) {
            ++slot.problems;
            AmalgamProblem p{a, b, std::move(g)};
            auto d = free_amalgam(p);
            auto v = is_free(d.structure, f);
            if (v)
                continue;
            ++slot.violations;
            if (slot.examples.size() < AmalgamationAudit::kMaxExamples)
                slot.examples.push_back({std::move(p), std::move(d), v.member, *v.embedding});
        }
    });

    AmalgamationAudit r;
    r.max_size = max_size;
    for (auto &s : slots) {
        r.problems += s.problems;
        r.violations += s.violations;
        for (auto &e : s.examples)
            if (r.examples.size() < AmalgamationAudit::kMaxExamples)
                r.examples.push_back(std::move(e));
    }
    return r;
}

/// For a member with unrelated points u, v: amalgamating member−v and
/// member−u over member−{u,v} gives the member back, since no instance
/// contains both u and v.
inline AmalgamViolation amalgam_from_unrelated_pair(const ForbiddenFamily &f, std::size_t member, int u, int v)
{
    const auto &m = f[member];
    if (u == v || u < 0 || v < 0 || u >= m.size() || v >= m.size() || related(m, {u, v}))
        throw PreconditionError("points are not an unrelated pair of the member");
    PointSet all = PointSet::range(m.size());
    PointSet without_v = all, without_u = all;
    without_v.erase(v);
    without_u.erase(u);
    auto a = induced_substructure(m, without_v);
    auto b = induced_substructure(m, without_u);
    AmalgamProblem p{a.structure, b.structure, {}};
    for (std::size_t i = 0; i < a.to_parent.size(); ++i) {
        int x = a.to_parent[i];
        if (x == u)
            continue;
        auto j = std::find(b.to_parent.begin(), b.to_parent.end(), x) - b.to_parent.begin();
        p.glue.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
    auto d = free_amalgam(p);
    auto e = find_embedding(m, d.structure, EmbeddingMode::Weak);
    if (!e)
        throw VerificationError("amalgam over an unrelated pair does not contain the member");
    return {std::move(p), std::move(d), member, *e};
}

// ---------------------------------------------------------------------------

struct ClassReport
{
    ForbiddenFamily family;
    ClosureReport closure;
    SimplicityVerdict simplicity;
    std::vector<std::string> notes;
};

/// Minimalizes F* and reports closure, simplicity, and sanity notes.
inline ClassReport classify(const ForbiddenFamily &fstar, unsigned threads = 1)
{
    auto f = fstar.minimal() ? fstar : minimalize(fstar, threads);
    auto closure = closure_under_free_amalgam(f, threads);
    auto verdict = simplicity_verdict(f, threads);
    std::vector<std::string> notes;
    if (f.size() != fstar.size())
        notes.push_back("minimalization removed " + std::to_string(fstar.size() - f.size()) + " member(s)");
    notes.push_back("hereditary: automatic for classes defined by forbidden weak substructures");
    if (closure.closed)
        notes.push_back("joint embedding and amalgamation: by free amalgamation");
    else
        notes.push_back("not closed under free amalgamation (member " + std::to_string(*closure.blocking) +
                        " has an unrelated pair); the amalgamation property is not decided");
    if (verdict.outcome == Simplicity::Undetermined)
        notes.push_back("some member is neither 2- nor 3-irreducible; no simplicity verdict is claimed");
    return {std::move(f), std::move(closure), std::move(verdict), std::move(notes)};
}

} // namespace fraisse
