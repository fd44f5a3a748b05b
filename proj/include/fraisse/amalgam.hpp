#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraisse/core/enumerate.hpp"
#include "fraisse/embedding.hpp"
#include "fraisse/parallel.hpp"

namespace fraisse {

/// Two structures glued along a common induced substructure. Each glue pair
/// (x, y) identifies point x of A with point y of B.
struct AmalgamProblem
{
    RelStructure a;
    RelStructure b;
    std::vector<std::pair<int, int>> glue;
};

/// The amalgam D plus the placement of A and B inside it.
struct AmalgamResult
{
    RelStructure structure;
    std::vector<int> a_map; // A-point -> D-point
    std::vector<int> b_map; // B-point -> D-point
    PointSet a_side;        // image of A
    PointSet b_side;        // image of B
    PointSet base;          // image of the glued part
};

inline void validate_glue(const AmalgamProblem &p)
{
    if (!same_signature(p.a.signature_ptr(), p.b.signature_ptr()))
        throw PreconditionError("amalgamation of structures over different signatures");
    std::vector<int> fwd(static_cast<std::size_t>(p.a.size()), -1), back(static_cast<std::size_t>(p.b.size()), -1);
    for (auto [x, y] : p.glue) {
        if (x < 0 || x >= p.a.size() || y < 0 || y >= p.b.size())
            throw PreconditionError("glue pair out of range");
        if (fwd[static_cast<std::size_t>(x)] >= 0 || back[static_cast<std::size_t>(y)] >= 0)
            throw PreconditionError("glue is not injective");
        fwd[static_cast<std::size_t>(x)] = y;
        back[static_cast<std::size_t>(y)] = x;
    }
    auto preserved = [](const RelStructure &from, const RelStructure &to, const std::vector<int> &m) {
        Tuple img;
        for (std::size_t s = 0; s < from.symbol_count(); ++s)
            for (std::size_t i = 0; i < from.instance_count(s); ++i) {
                img.clear();
                bool inside = true;
                for (int q : from.instance(s, i)) {
                    if (m[static_cast<std::size_t>(q)] < 0) {
                        inside = false;
                        break;
                    }
                    img.push_back(m[static_cast<std::size_t>(q)]);
                }
                if (inside && !to.holds(s, img))
                    return false;
            }
        return true;
    };
    if (!preserved(p.a, p.b, fwd) || !preserved(p.b, p.a, back))
        throw PreconditionError("glue is not an isomorphism of the common substructure");
}

/// Free amalgam of A and B over the glued part: universe A followed by the
/// unglued points of B in increasing order, instances exactly those of A and
/// of B. No instance meets both A\C and B\C.
inline AmalgamResult free_amalgam(const AmalgamProblem &p)
{
    validate_glue(p);
    const int na = p.a.size();
    std::vector<int> b_map(static_cast<std::size_t>(p.b.size()), -1);
    for (auto [x, y] : p.glue)
        b_map[static_cast<std::size_t>(y)] = x;
    int next = na;
    for (auto &m : b_map)
        if (m < 0)
            m = next++;
    std::vector<int> a_map(static_cast<std::size_t>(na));
    for (int i = 0; i < na; ++i)
        a_map[static_cast<std::size_t>(i)] = i;

    StructureBuilder builder(p.a.signature_ptr(), next);
    builder.add_all(p.a, a_map).add_all(p.b, b_map);

    AmalgamResult r{builder.build(), a_map, b_map, PointSet::range(na), PointSet(b_map), {}};
    for (auto [x, y] : p.glue)
        r.base.insert(x);
    return r;
}

/// A ⫝ᶠᵃ_C B inside D: A∩B ⊆ C, and every instance inside A∪B∪C lies inside
/// A∪C or inside B∪C.
inline bool fa_independent(const RelStructure &d, const PointSet &a, const PointSet &b, const PointSet &c)
{
    const int n = d.size();
    if (a.bound() > n || b.bound() > n || c.bound() > n)
        throw PreconditionError("subset outside the ambient universe");
    if (!(a & b).subset_of(c))
        return false;
    PointSet ac = a | c, bc = b | c, abc = ac | b;
    for (std::size_t s = 0; s < d.symbol_count(); ++s)
        for (std::size_t i = 0; i < d.instance_count(s); ++i) {
            bool in_abc = true, in_ac = true, in_bc = true;
            for (int p : d.instance(s, i)) {
                in_abc = in_abc && abc.contains(p);
                in_ac = in_ac && ac.contains(p);
                in_bc = in_bc && bc.contains(p);
            }
            if (in_abc && !in_ac && !in_bc)
                return false;
        }
    return true;
}

/// Mask form for universes of at most 64 points.
inline bool fa_independent_mask(const RelStructure &d, std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    if ((a & b) & ~c)
        return false;
    const std::uint64_t ac = a | c, bc = b | c, abc = ac | b;
    for (std::size_t s = 0; s < d.symbol_count(); ++s)
        for (std::size_t i = 0; i < d.instance_count(s); ++i) {
            std::uint64_t m = 0;
            for (int p : d.instance(s, i))
                m |= std::uint64_t{1} << p;
            if ((m & ~abc) == 0 && (m & ~ac) != 0 && (m & ~bc) != 0)
                return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Axiom conformance harness

enum class Axiom { Invariance, Monotonicity, Symmetry, FullTransitivity, Freedom, Stationarity };

inline constexpr Axiom kAllAxioms[] = {Axiom::Invariance, Axiom::Monotonicity, Axiom::Symmetry,
                                       Axiom::FullTransitivity, Axiom::Freedom, Axiom::Stationarity};

inline const char *to_string(Axiom a)
{
    switch (a) {
    case Axiom::Invariance: return "invariance";
    case Axiom::Monotonicity: return "monotonicity";
    case Axiom::Symmetry: return "symmetry";
    case Axiom::FullTransitivity: return "full_transitivity";
    case Axiom::Freedom: return "freedom";
    case Axiom::Stationarity: return "stationarity";
    }
    return "?";
}

/// Arguments (A, B, C) of "A independent from B over C".
struct Triple
{
    std::uint64_t a = 0, b = 0, c = 0;
    bool operator==(const Triple &) const = default;
};

/// Ternary predicate on subsets of a structure with at most 64 points.
using TriplePredicate = std::function<bool(const RelStructure &, std::uint64_t, std::uint64_t, std::uint64_t)>;

inline TriplePredicate fa_predicate() { return fa_independent_mask; }

/// A violation: every premise triple satisfies the predicate, every failure
/// triple does not, and the side conditions of the axiom hold. For
/// invariance `map` is the automorphism; for stationarity it is the
/// isomorphism between the two independent tuples that does not extend.
struct Counterexample
{
    RelStructure ambient;
    std::vector<Triple> premises;
    std::vector<Triple> failures;
    std::vector<int> map;
};

struct AxiomOutcome
{
    Axiom axiom;
    std::uint64_t checks = 0;
    std::optional<Counterexample> counterexample;

    bool holds() const { return !counterexample; }
};

struct AxiomReport
{
    int max_size = 0;
    std::size_t structures = 0;
    std::vector<AxiomOutcome> outcomes;

    bool all_hold() const
    {
        return std::all_of(outcomes.begin(), outcomes.end(), [](const auto &o) { return o.holds(); });
    }

    const AxiomOutcome &outcome(Axiom a) const
    {
        for (const auto &o : outcomes)
            if (o.axiom == a)
                return o;
        throw PreconditionError("axiom not covered by report");
    }
};

namespace detail {

inline std::uint64_t apply_perm(std::uint64_t m, const std::vector<int> &perm)
{
    std::uint64_t r = 0;
    while (m) {
        int p = std::countr_zero(m);
        r |= std::uint64_t{1} << perm[static_cast<std::size_t>(p)];
        m &= m - 1;
    }
    return r;
}

inline std::vector<int> mask_members(std::uint64_t m)
{
    std::vector<int> out;
    while (m) {
        out.push_back(std::countr_zero(m));
        m &= m - 1;
    }
    return out;
}

/// Whether `map` (defined on `dom`) is an isomorphism of the induced
/// structure on `dom` onto the induced structure on its image.
inline bool partial_isomorphism(const RelStructure &d, std::uint64_t dom, const std::vector<int> &map)
{
    auto src = induced_substructure(d, PointSet::from_mask(dom));
    std::uint64_t img = 0;
    for (int p : src.to_parent)
        img |= std::uint64_t{1} << map[static_cast<std::size_t>(p)];
    auto dst = induced_substructure(d, PointSet::from_mask(img));
    if (dst.structure.size() != src.structure.size())
        return false;
    std::vector<int> local(static_cast<std::size_t>(d.size()), -1);
    for (std::size_t i = 0; i < dst.to_parent.size(); ++i)
        local[static_cast<std::size_t>(dst.to_parent[i])] = static_cast<int>(i);
    std::vector<int> m;
    for (int p : src.to_parent)
        m.push_back(local[static_cast<std::size_t>(map[static_cast<std::size_t>(p)])]);
    return is_embedding(src.structure, dst.structure, m, EmbeddingMode::Induced);
}

/// Isomorphisms from the induced structure on `from` onto that on `to`
/// fixing `base` pointwise, each as a full-length map (identity elsewhere).
inline std::vector<std::vector<int>> isomorphisms_over(const RelStructure &d, std::uint64_t from, std::uint64_t to,
                                                       std::uint64_t base)
{
    std::vector<std::vector<int>> out;
    if (std::popcount(from) != std::popcount(to))
        return out;
    auto src = induced_substructure(d, PointSet::from_mask(from));
    auto dst = induced_substructure(d, PointSet::from_mask(to));
    PartialMap fixed;
    for (std::size_t i = 0; i < src.to_parent.size(); ++i) {
        int p = src.to_parent[i];
        if ((base >> p) & 1U) {
            auto j = std::find(dst.to_parent.begin(), dst.to_parent.end(), p) - dst.to_parent.begin();
            fixed.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    }
    for_each_embedding(src.structure, dst.structure, EmbeddingMode::Induced, fixed, [&](const std::vector<int> &m) {
        std::vector<int> full(static_cast<std::size_t>(d.size()));
        for (int p = 0; p < d.size(); ++p)
            full[static_cast<std::size_t>(p)] = p;
        for (std::size_t i = 0; i < m.size(); ++i)
            full[static_cast<std::size_t>(src.to_parent[i])] = dst.to_parent[static_cast<std::size_t>(m[i])];
        out.push_back(std::move(full));
        return true;
    });
    return out;
}

/// Runs every axiom check on one ambient structure.
class AxiomChecker
{
public:
    AxiomChecker(const RelStructure &d, const TriplePredicate &pred) : d_(d), n_(d.size())
    {
        full_ = (std::uint64_t{1} << n_) - 1;
        table_.assign(std::size_t{1} << (3 * n_), 0);
        for (std::uint64_t a = 0; a <= full_; ++a)
            for (std::uint64_t b = 0; b <= full_; ++b)
                for (std::uint64_t c = 0; c <= full_; ++c)
                    table_[idx(a, b, c)] = pred(d, a, b, c) ? 1 : 0;
    }

    bool ind(std::uint64_t a, std::uint64_t b, std::uint64_t c) const { return table_[idx(a, b, c)] != 0; }
    bool ind(const Triple &t) const { return ind(t.a, t.b, t.c); }

    void run(std::vector<AxiomOutcome> &out)
    {
        invariance(out[0]);
        monotonicity(out[1]);
        symmetry(out[2]);
        transitivity(out[3]);
        freedom(out[4]);
        stationarity(out[5]);
    }

private:
    std::size_t idx(std::uint64_t a, std::uint64_t b, std::uint64_t c) const
    {
        return static_cast<std::size_t>((a << (2 * n_)) | (b << n_) | c);
    }

    static bool submask(std::uint64_t x, std::uint64_t of) { return (x & ~of) == 0; }

    void report(AxiomOutcome &o, std::vector<Triple> premises, std::vector<Triple> failures,
                std::vector<int> map = {}) const
    {
        if (!o.counterexample)
            o.counterexample = Counterexample{d_, std::move(premises), std::move(failures), std::move(map)};
    }

    void invariance(AxiomOutcome &o) const
    {
        for (const auto &sigma : automorphisms(d_)) {
            for (std::uint64_t a = 0; a <= full_; ++a)
                for (std::uint64_t b = 0; b <= full_; ++b)
                    for (std::uint64_t c = 0; c <= full_; ++c) {
                        if (!ind(a, b, c))
                            continue;
                        ++o.checks;
                        Triple img{apply_perm(a, sigma), apply_perm(b, sigma), apply_perm(c, sigma)};
                        if (!ind(img))
                            return report(o, {{a, b, c}}, {img}, sigma);
                    }
        }
    }

    void monotonicity(AxiomOutcome &o) const
    {
        // One-point shrinking steps generate every A0 ⊆ A, B0 ⊆ B.
        for (std::uint64_t a = 0; a <= full_; ++a)
            for (std::uint64_t b = 0; b <= full_; ++b)
                for (std::uint64_t c = 0; c <= full_; ++c) {
                    if (!ind(a, b, c))
                        continue;
                    for (int x : mask_members(a)) {
                        ++o.checks;
                        Triple t{a & ~(std::uint64_t{1} << x), b, c};
                        if (!ind(t))
                            return report(o, {{a, b, c}}, {t});
                    }
                    for (int y : mask_members(b)) {
                        ++o.checks;
                        Triple t{a, b & ~(std::uint64_t{1} << y), c};
                        if (!ind(t))
                            return report(o, {{a, b, c}}, {t});
                    }
                }
    }

    void symmetry(AxiomOutcome &o) const
    {
        for (std::uint64_t a = 0; a <= full_; ++a)
            for (std::uint64_t b = 0; b <= full_; ++b)
                for (std::uint64_t c = 0; c <= full_; ++c) {
                    if (!ind(a, b, c))
                        continue;
                    ++o.checks;
                    if (!ind(b, a, c))
                        return report(o, {{a, b, c}}, {{b, a, c}});
                }
    }

    // A ⫝_D B  iff  A ⫝_C B and A ⫝_D C, for D ⊆ C ⊆ B.
    void transitivity(AxiomOutcome &o) const
    {
        for (std::uint64_t b = 0; b <= full_; ++b)
            for (std::uint64_t c = b;; c = (c - 1) & b) {
                for (std::uint64_t dd = c;; dd = (dd - 1) & c) {
                    for (std::uint64_t a = 0; a <= full_; ++a) {
                        ++o.checks;
                        Triple lhs{a, b, dd}, r1{a, b, c}, r2{a, c, dd};
                        bool l = ind(lhs), x = ind(r1), y = ind(r2);
                        if (l && !x)
                            return report(o, {lhs}, {r1});
                        if (l && !y)
                            return report(o, {lhs}, {r2});
                        if (!l && x && y)
                            return report(o, {r1, r2}, {lhs});
                    }
                    if (dd == 0)
                        break;
                }
                if (c == 0)
                    break;
            }
    }

    void freedom(AxiomOutcome &o) const
    {
        for (std::uint64_t a = 0; a <= full_; ++a)
            for (std::uint64_t b = 0; b <= full_; ++b)
                for (std::uint64_t c = 0; c <= full_; ++c) {
                    if (!ind(a, b, c))
                        continue;
                    const std::uint64_t floor = c & (a | b);
                    for (std::uint64_t dd = c;; dd = (dd - 1) & c) {
                        if (submask(floor, dd)) {
                            ++o.checks;
                            if (!ind(a, b, dd))
                                return report(o, {{a, b, c}}, {{a, b, dd}});
                        }
                        if (dd == 0)
                            break;
                    }
                }
    }

    // C ⊆ a∩b, a ⫝_C b, a' ⫝_C b, f: a ≅ a' fixing C  =>  f ∪ id_b is an
    // isomorphism ab ≅ a'b.
    void stationarity(AxiomOutcome &o) const
    {
        for (std::uint64_t c = 0; c <= full_; ++c) {
            const std::uint64_t free_pts = full_ & ~c;
            for (std::uint64_t ea = free_pts;; ea = (ea - 1) & free_pts) {
                for (std::uint64_t ea2 = free_pts;; ea2 = (ea2 - 1) & free_pts) {
                    if (std::popcount(ea) == std::popcount(ea2)) {
                        const std::uint64_t a = ea | c, a2 = ea2 | c;
                        std::vector<std::vector<int>> isos;
                        bool computed = false;
                        for (std::uint64_t eb = free_pts;; eb = (eb - 1) & free_pts) {
                            const std::uint64_t b = eb | c;
                            if (ind(a, b, c) && ind(a2, b, c)) {
                                if (!computed) {
                                    isos = isomorphisms_over(d_, a, a2, c);
                                    computed = true;
                                }
                                for (const auto &f : isos) {
                                    ++o.checks;
                                    if (!partial_isomorphism(d_, a | b, f))
                                        return report(o, {{a, b, c}, {a2, b, c}}, {}, f);
                                }
                            }
                            if (eb == 0)
                                break;
                        }
                    }
                    if (ea2 == 0)
                        break;
                }
                if (ea == 0)
                    break;
            }
        }
    }

    const RelStructure &d_;
    int n_;
    std::uint64_t full_;
    std::vector<std::uint8_t> table_;
};

} // namespace detail

/// Re-checks a reported counterexample against `pred` from scratch.
inline bool confirms_violation(Axiom axiom, const Counterexample &cx, const TriplePredicate &pred)
{
    const auto &d = cx.ambient;
    auto ind = [&](const Triple &t) { return pred(d, t.a, t.b, t.c); };
    auto sub = [](std::uint64_t x, std::uint64_t of) { return (x & ~of) == 0; };
    for (const auto &t : cx.premises)
        if (!ind(t))
            return false;
    for (const auto &t : cx.failures)
        if (ind(t))
            return false;
    const auto &p = cx.premises;
    const auto &f = cx.failures;
    switch (axiom) {
    case Axiom::Invariance:
        return p.size() == 1 && f.size() == 1 && is_embedding(d, d, cx.map, EmbeddingMode::Induced) &&
               f[0] == Triple{detail::apply_perm(p[0].a, cx.map), detail::apply_perm(p[0].b, cx.map),
                              detail::apply_perm(p[0].c, cx.map)};
    case Axiom::Monotonicity:
        return p.size() == 1 && f.size() == 1 && sub(f[0].a, p[0].a) && sub(f[0].b, p[0].b) && f[0].c == p[0].c;
    case Axiom::Symmetry:
        return p.size() == 1 && f.size() == 1 && f[0] == Triple{p[0].b, p[0].a, p[0].c};
    case Axiom::FullTransitivity: {
        // Forward: premise (A,B,D), failure (A,B,C) or (A,C,D). Backward:
        // premises (A,B,C),(A,C,D), failure (A,B,D).
        if (p.size() == 1 && f.size() == 1) {
            const auto &l = p[0], &r = f[0];
            if (r.a != l.a)
                return false;
            if (r.b == l.b) // r = (A,B,C)
                return sub(l.c, r.c) && sub(r.c, l.b);
            return r.c == l.c && sub(l.c, r.b) && sub(r.b, l.b); // r = (A,C,D)
        }
        if (p.size() == 2 && f.size() == 1) {
            const auto &r1 = p[0], &r2 = p[1], &l = f[0];
            return r1.a == l.a && r2.a == l.a && r1.b == l.b && r2.b == r1.c && r2.c == l.c && sub(l.c, r1.c) &&
                   sub(r1.c, l.b);
        }
        return false;
    }
    case Axiom::Freedom:
        return p.size() == 1 && f.size() == 1 && f[0].a == p[0].a && f[0].b == p[0].b && sub(f[0].c, p[0].c) &&
               sub(p[0].c & (p[0].a | p[0].b), f[0].c);
    case Axiom::Stationarity: {
        if (p.size() != 2 || !f.empty())
            return false;
        const auto a = p[0].a, b = p[0].b, c = p[0].c, a2 = p[1].a;
        if (p[1].b != b || p[1].c != c || !sub(c, a) || !sub(c, b) || cx.map.size() != static_cast<std::size_t>(d.size()))
            return false;
        for (int q : detail::mask_members(c))
            if (cx.map[static_cast<std::size_t>(q)] != q)
                return false;
        if (detail::apply_perm(a, cx.map) != a2 || !detail::partial_isomorphism(d, a, cx.map))
            return false;
        std::vector<int> ext = cx.map;
        for (int q : detail::mask_members(b & ~a))
            ext[static_cast<std::size_t>(q)] = q;
        return !detail::partial_isomorphism(d, a | b, ext);
    }
    }
    return false;
}

/// Exhaustive check of invariance, monotonicity, symmetry, full
/// transitivity, freedom and stationarity-as-isomorphism for `pred` over one
/// structure per isomorphism class of each size 0..max_size.
inline AxiomReport check_axioms(const SignaturePtr &sig, int max_size, const TriplePredicate &pred = fa_predicate(),
                                unsigned threads = 1)
{
    auto all = enumerate_up_to(sig, max_size);
    std::vector<std::vector<AxiomOutcome>> per(all.size());
    parallel_for(all.size(), threads, [&](std::size_t i) {
        auto &out = per[i];
        for (auto ax : kAllAxioms)
            out.push_back(AxiomOutcome{ax, 0, std::nullopt});
        detail::AxiomChecker(all[i], pred).run(out);
    });
    AxiomReport report;
    report.max_size = max_size;
    report.structures = all.size();
    for (std::size_t k = 0; k < std::size(kAllAxioms); ++k) {
        AxiomOutcome merged{kAllAxioms[k], 0, std::nullopt};
        for (auto &o : per) {
            merged.checks += o[k].checks;
            if (!merged.counterexample && o[k].counterexample)
                merged.counterexample = std::move(o[k].counterexample);
        }
        report.outcomes.push_back(std::move(merged));
    }
    return report;
}

} // namespace fraisse
