#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraisse/amalgam.hpp"
#include "fraisse/classify.hpp"
#include "fraisse/forbidden.hpp"

namespace fraisse {

/// Result of re-verifying a certificate.
struct Check
{
    bool ok = true;
    std::string reason;

    explicit operator bool() const { return ok; }
    static Check fail(std::string why) { return {false, std::move(why)}; }
};

/// Tuples a (left) and b (right) over a base C inside a carrier structure.
/// Base points listed in left or right are ignored there.
struct PairPattern
{
    RelStructure carrier;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<int> base;
};

namespace detail {

inline void check_points(const std::vector<int> &pts, int n, const char *what)
{
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int p : pts) {
        if (p < 0 || p >= n)
            throw PreconditionError(std::string(what) + " point " + std::to_string(p) + " outside the carrier");
        if (seen[static_cast<std::size_t>(p)]++)
            throw PreconditionError(std::string(what) + " lists point " + std::to_string(p) + " twice");
    }
}

inline std::vector<int> without(const std::vector<int> &pts, const std::vector<int> &drop)
{
    std::vector<int> out;
    for (int p : pts)
        if (std::find(drop.begin(), drop.end(), p) == drop.end())
            out.push_back(p);
    return out;
}

inline std::vector<int> concat(std::vector<int> a, const std::vector<int> &b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

/// Adds every instance of `src` whose points are all mapped (map[p] >= 0).
inline void copy_instances(StructureBuilder &b, const RelStructure &src, const std::vector<int> &map)
{
    for (std::size_t sym = 0; sym < src.symbol_count(); ++sym)
        for (std::size_t i = 0; i < src.instance_count(sym); ++i) {
            Tuple t;
            for (int p : src.instance(sym, i)) {
                int q = map[static_cast<std::size_t>(p)];
                if (q < 0)
                    break;
                t.push_back(q);
            }
            if (t.size() == static_cast<std::size_t>(src.arity(sym)))
                b.add(sym, std::move(t));
        }
}

/// Map from the points of `src` to `dst` (positionally), -1 elsewhere.
inline std::vector<int> point_map(int n, const std::vector<int> &src, const std::vector<int> &dst)
{
    std::vector<int> m(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < src.size(); ++i)
        m[static_cast<std::size_t>(src[i])] = dst[i];
    return m;
}

inline std::vector<int> iota_from(int start, std::size_t count)
{
    std::vector<int> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = start + static_cast<int>(i);
    return v;
}

/// The windows cover every point and every instance lies inside one window.
inline Check check_windows(const RelStructure &s, const std::vector<std::vector<int>> &windows)
{
    std::vector<char> covered(static_cast<std::size_t>(s.size()), 0);
    for (const auto &w : windows)
        for (int p : w) {
            if (p < 0 || p >= s.size())
                return Check::fail("layout point out of range");
            covered[static_cast<std::size_t>(p)] = 1;
        }
    if (std::find(covered.begin(), covered.end(), 0) != covered.end())
        return Check::fail("layout does not cover the structure");
    for (std::size_t sym = 0; sym < s.symbol_count(); ++sym)
        for (std::size_t i = 0; i < s.instance_count(sym); ++i) {
            auto t = s.instance(sym, i);
            bool inside = std::any_of(windows.begin(), windows.end(), [&](const std::vector<int> &w) {
                return std::all_of(t.begin(), t.end(),
                                   [&](int q) { return std::find(w.begin(), w.end(), q) != w.end(); });
            });
            if (!inside)
                return Check::fail("an instance mixes copies");
        }
    return {};
}

} // namespace detail

inline void validate_pattern(const PairPattern &p)
{
    const int n = p.carrier.size();
    detail::check_points(p.left, n, "left");
    detail::check_points(p.right, n, "right");
    detail::check_points(p.base, n, "base");
    std::vector<char> covered(static_cast<std::size_t>(n), 0);
    for (const auto *v : {&p.left, &p.right, &p.base})
        for (int q : *v)
            covered[static_cast<std::size_t>(q)] = 1;
    if (std::find(covered.begin(), covered.end(), 0) != covered.end())
        throw PreconditionError("left, right and base must cover the carrier");
}

/// Left and right with base points removed, checked to be disjoint.
inline std::pair<std::vector<int>, std::vector<int>> disjoint_sides(const PairPattern &p)
{
    auto a = detail::without(p.left, p.base);
    auto b = detail::without(p.right, p.base);
    for (int q : a)
        if (std::find(b.begin(), b.end(), q) != b.end())
            throw PreconditionError("left and right overlap outside the base (move shared points into the base)");
    return {a, b};
}

// ---------------------------------------------------------------------------
// Independent sequences

/// Base points first, then the copies in order.
struct SequenceLayout
{
    RelStructure structure;
    std::vector<int> base;
    std::vector<std::vector<int>> copies;
};

/// k copies of the right tuple over the base, each freely amalgamated with
/// the earlier ones over the base.
inline SequenceLayout independent_sequence(const PairPattern &p, int k)
{
    validate_pattern(p);
    if (k < 0)
        throw PreconditionError("negative sequence length");
    auto r = detail::without(p.right, p.base);
    const auto nb = p.base.size(), nr = r.size();
    const int total = static_cast<int>(nb + static_cast<std::size_t>(k) * nr);
    SequenceLayout out{RelStructure::empty(p.carrier.signature_ptr()), detail::iota_from(0, nb), {}};
    StructureBuilder b(p.carrier.signature_ptr(), total);
    for (int i = 0; i < k; ++i) {
        auto copy = detail::iota_from(static_cast<int>(nb + static_cast<std::size_t>(i) * nr), nr);
        detail::copy_instances(b, p.carrier,
                               detail::point_map(p.carrier.size(), detail::concat(p.base, r),
                                                 detail::concat(out.base, copy)));
        out.copies.push_back(std::move(copy));
    }
    out.structure = b.build();
    return out;
}

// ---------------------------------------------------------------------------
// Dividing witness

/// D = E ∪ a', with E the independent sequence of right copies over the
/// base and a' a copy of the left tuple such that a' b^l ≅_C a b for every
/// l. Blocked when D is not F-free.
struct DividingWitness
{
    bool blocked = false;
    RelStructure d;
    std::vector<int> base;
    std::vector<std::vector<int>> copies;
    std::vector<int> a_prime;
    std::size_t member = 0;
    std::optional<Embedding> embedding;
};

inline DividingWitness dividing_witness(const PairPattern &p, const ForbiddenFamily &f, int k)
{
    validate_pattern(p);
    if (k < 1)
        throw PreconditionError("need at least one copy");
    auto [a, r] = disjoint_sides(p);
    require_free(p.carrier, f, "pattern carrier");
    auto seq = independent_sequence(p, k);
    const int ne = seq.structure.size();
    DividingWitness w{false, RelStructure::empty(p.carrier.signature_ptr()), seq.base, seq.copies,
                      detail::iota_from(ne, a.size()), 0, std::nullopt};
    StructureBuilder b(p.carrier.signature_ptr(), ne + static_cast<int>(a.size()));
    b.add_all(seq.structure, detail::iota_from(0, static_cast<std::size_t>(ne)));
    for (const auto &copy : seq.copies)
        detail::copy_instances(b, p.carrier,
                               detail::point_map(p.carrier.size(), detail::concat(detail::concat(a, r), p.base),
                                                 detail::concat(detail::concat(w.a_prime, copy), seq.base)));
    w.d = b.build();
    auto v = is_free(w.d, f);
    if (!v) {
        w.blocked = true;
        w.member = v.member;
        w.embedding = v.embedding;
    }
    return w;
}

inline Check verify_dividing(const DividingWitness &w, const PairPattern &p, const ForbiddenFamily &f)
{
    auto [a, r] = disjoint_sides(p);
    std::vector<std::vector<int>> windows;
    for (const auto &copy : w.copies) {
        if (copy.size() != r.size())
            return Check::fail("copy has the wrong length");
        windows.push_back(detail::concat(detail::concat(w.a_prime, copy), w.base));
    }
    if (w.a_prime.size() != a.size() || w.base.size() != p.base.size())
        return Check::fail("layout does not match the pattern");
    if (auto c = detail::check_windows(w.d, windows); !c)
        return c;
    auto want = induced_on_sequence(p.carrier, detail::concat(detail::concat(a, r), p.base));
    for (const auto &win : windows)
        if (!(induced_on_sequence(w.d, win) == want))
            return Check::fail("a' b^l is not isomorphic to a b over the base");
    if (w.blocked) {
        if (w.member >= f.size() || !w.embedding ||
            !is_embedding(f[w.member], w.d, w.embedding->map, EmbeddingMode::Weak))
            return Check::fail("blocking embedding does not re-verify");
        return {};
    }
    if (!is_free(w.d, f))
        return Check::fail("D is not F-free");
    return {};
}

// ---------------------------------------------------------------------------
// Non-simplicity witness (half-graph construction)

struct ContradictionCertificate
{
    RelStructure extended; // E plus b⋆ (last point)
    int star = 0;
    Embedding embedding;   // member into `extended`
};

/// Layout of E: b̂ at 0..h-1, then b^l_2 = h+2l and b^l_3 = h+2l+1. In
/// `e_with_b1` the point b1 is last.
struct NonSimplicityWitness
{
    std::size_t member = 0;
    RelStructure a;
    std::array<int, 3> triple{};    // a1, a2, a3: unrelated in A
    std::vector<int> hat;           // the remaining points of A, increasing
    int rows = 0;
    RelStructure e;
    std::vector<int> hat_points;
    std::vector<std::array<int, 2>> row_points;
    RelStructure e_with_b1;
    int b1 = 0;
    std::optional<ContradictionCertificate> certificate; // needs rows >= 2
};

namespace detail {

struct HalfGraph
{
    RelStructure e, e_with_b1;
};

inline HalfGraph build_half_graph(const RelStructure &a, const std::array<int, 3> &tr, const std::vector<int> &hat,
                                  int rows)
{
    const int h = static_cast<int>(hat.size());
    const int ne = h + 2 * rows;
    auto hp = iota_from(0, hat.size());
    auto b2 = [&](int l) { return h + 2 * l; };
    auto b3 = [&](int l) { return h + 2 * l + 1; };
    StructureBuilder eb(a.signature_ptr(), ne);
    for (int l = 0; l < rows; ++l) {
        copy_instances(eb, a, point_map(a.size(), concat({tr[1]}, hat), concat({b2(l)}, hp)));
        copy_instances(eb, a, point_map(a.size(), concat({tr[2]}, hat), concat({b3(l)}, hp)));
    }
    for (int l = 0; l < rows; ++l)
        for (int m = l + 1; m < rows; ++m)
            copy_instances(eb, a, point_map(a.size(), concat({tr[1], tr[2]}, hat), concat({b2(l), b3(m)}, hp)));
    auto e = eb.build();
    StructureBuilder wb(a.signature_ptr(), ne + 1);
    wb.add_all(e, iota_from(0, static_cast<std::size_t>(ne)));
    if (rows > 0) {
        copy_instances(wb, a, point_map(a.size(), concat({tr[0], tr[1]}, hat), concat({ne, b2(0)}, hp)));
        copy_instances(wb, a, point_map(a.size(), concat({tr[0], tr[2]}, hat), concat({ne, b3(0)}, hp)));
    }
    return {std::move(e), wb.build()};
}

/// E plus b⋆ with b⋆ b^l_2 b^l_3 b̂ ≅ b1 b^0_2 b^0_3 b̂ for rows 0 and 1.
inline RelStructure build_star_extension(const NonSimplicityWitness &w)
{
    const int ne = w.e.size();
    const auto &b1_side = w.e_with_b1;
    StructureBuilder b(w.e.signature_ptr(), ne + 1);
    b.add_all(w.e, iota_from(0, static_cast<std::size_t>(ne)));
    for (int l = 0; l < 2; ++l) {
        auto from = concat({w.b1, w.row_points[0][0], w.row_points[0][1]}, w.hat_points);
        auto to = concat({ne, w.row_points[static_cast<std::size_t>(l)][0], w.row_points[static_cast<std::size_t>(l)][1]},
                         w.hat_points);
        copy_instances(b, b1_side, point_map(b1_side.size(), from, to));
    }
    return b.build();
}

} // namespace detail

/// Builds E from the member A with an unrelated triple, attaches b1 and, for
/// at least two rows, the contradiction certificate: A weakly embeds into
/// b⋆ b^0_2 b^1_3 b̂.
inline NonSimplicityWitness nonsimplicity_witness(const ForbiddenFamily &f, const RelStructure &a, int rows,
                                                  std::optional<std::array<int, 3>> triple = std::nullopt)
{
    require_minimal(f);
    if (rows < 1)
        throw PreconditionError("need at least one row");
    auto closure = closure_under_free_amalgam(f);
    if (!closure.closed)
        throw PreconditionError("hypothesis failed: family member " + std::to_string(*closure.blocking) +
                                " is not 2-irreducible");
    auto idx = f.find(a);
    if (!idx)
        throw PreconditionError("hypothesis failed: structure is not a member of the family");
    auto three = is_k_irreducible(a, 3);
    if (three)
        throw PreconditionError("hypothesis failed: member is 3-irreducible");
    std::array<int, 3> tr{};
    if (triple) {
        tr = *triple;
        std::vector<int> t(tr.begin(), tr.end());
        detail::check_points(t, a.size(), "triple");
        if (related(a, t))
            throw PreconditionError("given triple is related in the member");
    } else {
        tr = {three.unrelated[0], three.unrelated[1], three.unrelated[2]};
    }

    std::vector<int> hat;
    for (int p = 0; p < a.size(); ++p)
        if (std::find(tr.begin(), tr.end(), p) == tr.end())
            hat.push_back(p);
    const int h = static_cast<int>(hat.size());
    std::vector<std::array<int, 2>> row_points;
    for (int l = 0; l < rows; ++l)
        row_points.push_back({h + 2 * l, h + 2 * l + 1});
    auto hg = detail::build_half_graph(a, tr, hat, rows);
    const int b1 = hg.e.size();
    NonSimplicityWitness w{*idx,   a, tr, hat, rows, std::move(hg.e), detail::iota_from(0, hat.size()), row_points,
                           std::move(hg.e_with_b1), b1, std::nullopt};
    if (!is_free(w.e, f) || !is_free(w.e_with_b1, f))
        throw VerificationError("constructed E is not F-free");

    if (rows >= 2) {
        ContradictionCertificate c{detail::build_star_extension(w), w.e.size(), {}};
        std::vector<int> map(static_cast<std::size_t>(a.size()));
        map[static_cast<std::size_t>(tr[0])] = c.star;
        map[static_cast<std::size_t>(tr[1])] = w.row_points[0][0];
        map[static_cast<std::size_t>(tr[2])] = w.row_points[1][1];
        for (int i = 0; i < h; ++i)
            map[static_cast<std::size_t>(w.hat[static_cast<std::size_t>(i)])] = w.hat_points[static_cast<std::size_t>(i)];
        c.embedding = Embedding{map, EmbeddingMode::Weak};
        if (!is_embedding(a, c.extended, map, EmbeddingMode::Weak))
            throw VerificationError("member does not embed into the star extension");
        w.certificate = std::move(c);
    }
    return w;
}

inline Check verify_nonsimplicity(const NonSimplicityWitness &w, const ForbiddenFamily &f)
{
    if (w.member >= f.size() || !isomorphic(f[w.member], w.a))
        return Check::fail("member is not in the family");
    std::vector<int> t(w.triple.begin(), w.triple.end());
    if (related(w.a, t))
        return Check::fail("triple is related in the member");
    auto hg = detail::build_half_graph(w.a, w.triple, w.hat, w.rows);
    if (!(hg.e == w.e))
        return Check::fail("E does not have exactly the prescribed instances");
    if (!(hg.e_with_b1 == w.e_with_b1))
        return Check::fail("b1 is not attached as prescribed");
    if (!is_free(w.e, f))
        return Check::fail("E is not F-free");
    if (!is_free(w.e_with_b1, f))
        return Check::fail("E with b1 is not F-free");
    if (w.rows >= 2 && !w.certificate)
        return Check::fail("missing contradiction certificate");
    if (w.certificate) {
        const auto &c = *w.certificate;
        if (!(detail::build_star_extension(w) == c.extended) || c.star != w.e.size())
            return Check::fail("star extension is not as prescribed");
        if (!is_embedding(w.a, c.extended, c.embedding.map, EmbeddingMode::Weak))
            return Check::fail("certificate embedding does not re-verify");
        auto allowed = detail::concat({c.star, w.row_points[0][0], w.row_points[1][1]}, w.hat_points);
        for (int q : c.embedding.map)
            if (std::find(allowed.begin(), allowed.end(), q) == allowed.end())
                return Check::fail("certificate embedding leaves b* b^0_2 b^1_3 b-hat");
    }
    return {};
}

// ---------------------------------------------------------------------------
// SOP3 certificate

/// One inconsistency case: an assignment of the free tuples between x and
/// the parameters, and the member copy it contains.
struct InconsistencyCase
{
    std::uint64_t assignment = 0;
    std::size_t member = 0;
    Embedding embedding;
};

/// Exhaustive proof that p(x, d_i) ∪ q(x, d_j) has no F-free realization.
/// Local structure: the parameters in order, then x.
struct PairProof
{
    int i = 0, j = 0;
    std::vector<int> params;                             // b^i_2 b^i_3 b^j_2 b^j_3 b̂
    std::vector<std::pair<std::size_t, Tuple>> forced;   // instances through x required by p and q
    std::vector<std::pair<std::size_t, Tuple>> open;     // tuples through x left free
    std::vector<InconsistencyCase> cases;                // one per assignment of `open`
};

/// p(x, d) says x b_2 b̂ ≅ a1 a2 â; q(x, d) says x b_3 b̂ ≅ a1 a3 â, where
/// d = (b_2, b_3, b̂). Player i satisfies p with d_j for j > i and q with
/// d_j for j ≤ i.
struct Sop3Certificate
{
    int rows = 0;
    RelStructure structure;               // E plus the players
    std::vector<std::array<int, 2>> d;    // (b^i_2, b^i_3)
    std::vector<int> hat_points;
    std::vector<int> players;
    PairPattern p, q;
    std::vector<PairProof> proofs;        // for every i < j
};

namespace detail {

inline constexpr std::size_t kMaxOpenTuples = 16;

inline PairPattern side_pattern(const NonSimplicityWitness &w, int t)
{
    auto carrier = induced_on_sequence(w.a, concat({w.triple[0], w.triple[static_cast<std::size_t>(t)]}, w.hat));
    return {carrier, {0}, iota_from(1, w.hat.size() + 1), {}};
}

// Tuples through x (last local point) split into those fixed by p or q and
// the rest; `forced` are the fixed tuples that must hold.
inline void split_tuples(const Sop3Certificate &c, PairProof &proof)
{
    const int np = static_cast<int>(proof.params.size());
    const int hs = static_cast<int>(c.hat_points.size());
    // local indices: 0 = b^i_2, 1 = b^i_3, 2 = b^j_2, 3 = b^j_3, 4.. = hat, np = x
    auto hat_local = iota_from(4, static_cast<std::size_t>(hs));
    auto p_side = concat({np, 0}, hat_local);
    auto q_side = concat({np, 3}, hat_local);
    auto within = [](const Tuple &t, const std::vector<int> &side) {
        return std::all_of(t.begin(), t.end(), [&](int v) { return std::find(side.begin(), side.end(), v) != side.end(); });
    };
    auto holds_in = [](const PairPattern &pat, const std::vector<int> &side, std::size_t sym, const Tuple &t) {
        Tuple img;
        for (int v : t)
            img.push_back(static_cast<int>(std::find(side.begin(), side.end(), v) - side.begin()));
        return pat.carrier.holds(sym, img);
    };
    for (auto &[sym, t] : tuples_through(c.structure.signature(), np + 1, np)) {
        if (within(t, p_side)) {
            if (holds_in(c.p, p_side, sym, t))
                proof.forced.emplace_back(sym, t);
        } else if (within(t, q_side)) {
            if (holds_in(c.q, q_side, sym, t))
                proof.forced.emplace_back(sym, t);
        } else {
            proof.open.emplace_back(sym, t);
        }
    }
    if (proof.open.size() > kMaxOpenTuples)
        throw RefusalError("inconsistency proof needs 2^" + std::to_string(proof.open.size()) + " cases");
}

inline RelStructure proof_case(const Sop3Certificate &c, const PairProof &proof, std::uint64_t assignment)
{
    const int np = static_cast<int>(proof.params.size());
    StructureBuilder b(c.structure.signature_ptr(), np + 1);
    b.add_all(induced_on_sequence(c.structure, proof.params), iota_from(0, static_cast<std::size_t>(np)));
    for (const auto &[sym, t] : proof.forced)
        b.add(sym, t);
    for (std::size_t k = 0; k < proof.open.size(); ++k)
        if ((assignment >> k) & 1U)
            b.add(proof.open[k].first, proof.open[k].second);
    return b.build();
}

} // namespace detail

inline Check verify_sop3(const Sop3Certificate &c, const ForbiddenFamily &f);

/// Re-verifies the witness, places the row players next to E and proves each
/// p(x, d_i) ∪ q(x, d_j), i < j, inconsistent by full enumeration.
inline Sop3Certificate sop3_certificate(const NonSimplicityWitness &w, const ForbiddenFamily &f)
{
    if (auto chk = verify_nonsimplicity(w, f); !chk)
        throw VerificationError("witness does not re-verify: " + chk.reason);
    auto p = detail::side_pattern(w, 1);
    auto q = detail::side_pattern(w, 2);
    const int ne = w.e.size();
    std::vector<int> players;
    StructureBuilder b(w.e.signature_ptr(), ne + w.rows);
    b.add_all(w.e, detail::iota_from(0, static_cast<std::size_t>(ne)));
    for (int i = 0; i < w.rows; ++i) {
        int x = ne + i;
        players.push_back(x);
        for (int j = 0; j < w.rows; ++j) {
            const auto &pat = j > i ? p : q;
            int bj = j > i ? w.row_points[static_cast<std::size_t>(j)][0] : w.row_points[static_cast<std::size_t>(j)][1];
            detail::copy_instances(b, pat.carrier,
                                   detail::point_map(pat.carrier.size(), detail::iota_from(0, pat.carrier.size()),
                                                     detail::concat({x, bj}, w.hat_points)));
        }
    }
    Sop3Certificate c{w.rows, b.build(), w.row_points, w.hat_points, players, std::move(p), std::move(q), {}};
    if (auto v = is_free(c.structure, f); !v)
        throw VerificationError("row players create a copy of family member " + std::to_string(v.member));

    for (int i = 0; i < w.rows; ++i)
        for (int j = i + 1; j < w.rows; ++j) {
            PairProof proof;
            proof.i = i;
            proof.j = j;
            const auto &di = w.row_points[static_cast<std::size_t>(i)];
            const auto &dj = w.row_points[static_cast<std::size_t>(j)];
            proof.params = detail::concat({di[0], di[1], dj[0], dj[1]}, w.hat_points);
            detail::split_tuples(c, proof);
            for (std::uint64_t m = 0; m < (std::uint64_t{1} << proof.open.size()); ++m) {
                auto v = is_free(detail::proof_case(c, proof, m), f);
                if (v)
                    throw VerificationError("p(x,d_" + std::to_string(i) + ") and q(x,d_" + std::to_string(j) +
                                            ") have an F-free realization");
                proof.cases.push_back({m, v.member, *v.embedding});
            }
            c.proofs.push_back(std::move(proof));
        }
    if (auto chk = verify_sop3(c, f); !chk)
        throw VerificationError("certificate does not re-verify: " + chk.reason);
    return c;
}

inline Check verify_sop3(const Sop3Certificate &c, const ForbiddenFamily &f)
{
    if (!is_free(c.structure, f))
        return Check::fail("structure with players is not F-free");
    if (c.players.size() != static_cast<std::size_t>(c.rows) || c.d.size() != static_cast<std::size_t>(c.rows))
        return Check::fail("row count mismatch");
    for (int i = 0; i < c.rows; ++i)
        for (int j = 0; j < c.rows; ++j) {
            const auto &pat = j > i ? c.p : c.q;
            int bj = j > i ? c.d[static_cast<std::size_t>(j)][0] : c.d[static_cast<std::size_t>(j)][1];
            auto seq = detail::concat({c.players[static_cast<std::size_t>(i)], bj}, c.hat_points);
            if (!(induced_on_sequence(c.structure, seq) == pat.carrier))
                return Check::fail("player " + std::to_string(i) + " has the wrong type over d_" + std::to_string(j));
        }
    std::size_t expected = static_cast<std::size_t>(c.rows) * static_cast<std::size_t>(std::max(c.rows - 1, 0)) / 2;
    if (c.proofs.size() != expected)
        return Check::fail("missing inconsistency proofs");
    for (const auto &proof : c.proofs) {
        PairProof again;
        again.i = proof.i;
        again.j = proof.j;
        again.params = proof.params;
        detail::split_tuples(c, again);
        if (again.forced != proof.forced || again.open != proof.open)
            return Check::fail("proof tuples do not match the patterns");
        if (proof.cases.size() != (std::size_t{1} << proof.open.size()))
            return Check::fail("inconsistency proof is not exhaustive");
        for (std::size_t k = 0; k < proof.cases.size(); ++k) {
            const auto &cs = proof.cases[k];
            if (cs.assignment != k || cs.member >= f.size() ||
                !is_embedding(f[cs.member], detail::proof_case(c, proof, cs.assignment), cs.embedding.map,
                              EmbeddingMode::Weak))
                return Check::fail("inconsistency case " + std::to_string(k) + " does not re-verify");
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Cycle amalgam

/// Base points first, then copies x_0..x_{n-1} of the left tuple.
struct CycleWitness
{
    bool blocked = false;
    RelStructure cycle;
    std::vector<int> base;
    std::vector<std::vector<int>> copies;
    std::size_t member = 0;
    std::optional<Embedding> embedding;
};

/// Whether left ↦ right (positionally, base fixed) is an isomorphism of the
/// induced structures: the pattern is the type of a pair (x, y) with
/// x ≅ y over the base.
inline bool self_paired(const PairPattern &p)
{
    auto a = detail::without(p.left, p.base);
    auto b = detail::without(p.right, p.base);
    return a.size() == b.size() &&
           induced_on_sequence(p.carrier, detail::concat(a, p.base)) ==
               induced_on_sequence(p.carrier, detail::concat(b, p.base));
}

/// n copies of the tuple over the base where each consecutive pair,
/// including (x_{n-1}, x_0), carries the pattern and no other instances mix
/// copies.
inline CycleWitness sop_cycle(const PairPattern &p, const ForbiddenFamily &f, int n)
{
    validate_pattern(p);
    if (n < 3)
        throw PreconditionError("cycle length must be at least 3");
    auto [a, r] = disjoint_sides(p);
    if (!self_paired(p))
        throw PreconditionError("pattern is not self-paired: left and right differ over the base");
    require_free(p.carrier, f, "pattern carrier");
    const auto nb = p.base.size(), t = a.size();
    auto base = detail::iota_from(0, nb);
    std::vector<std::vector<int>> copies;
    for (int i = 0; i < n; ++i)
        copies.push_back(detail::iota_from(static_cast<int>(nb + static_cast<std::size_t>(i) * t), t));
    StructureBuilder b(p.carrier.signature_ptr(), static_cast<int>(nb + static_cast<std::size_t>(n) * t));
    for (int i = 0; i < n; ++i) {
        const auto &x = copies[static_cast<std::size_t>(i)];
        const auto &y = copies[static_cast<std::size_t>((i + 1) % n)];
        detail::copy_instances(b, p.carrier,
                               detail::point_map(p.carrier.size(), detail::concat(detail::concat(a, r), p.base),
                                                 detail::concat(detail::concat(x, y), base)));
    }
    CycleWitness w{false, b.build(), std::move(base), std::move(copies), 0, std::nullopt};
    auto v = is_free(w.cycle, f);
    if (!v) {
        w.blocked = true;
        w.member = v.member;
        w.embedding = v.embedding;
    }
    return w;
}

inline Check verify_cycle(const CycleWitness &w, const PairPattern &p, const ForbiddenFamily &f)
{
    auto [a, r] = disjoint_sides(p);
    const auto n = w.copies.size();
    if (n < 3 || w.base.size() != p.base.size())
        return Check::fail("layout does not match the pattern");
    std::vector<std::vector<int>> windows;
    for (std::size_t i = 0; i < n; ++i) {
        if (w.copies[i].size() != a.size())
            return Check::fail("copy has the wrong length");
        windows.push_back(detail::concat(detail::concat(w.copies[i], w.copies[(i + 1) % n]), w.base));
    }
    if (auto c = detail::check_windows(w.cycle, windows); !c)
        return c;
    auto want = induced_on_sequence(p.carrier, detail::concat(detail::concat(a, r), p.base));
    for (std::size_t i = 0; i < n; ++i)
        if (!(induced_on_sequence(w.cycle, windows[i]) == want))
            return Check::fail("consecutive pair " + std::to_string(i) + " does not carry the pattern");
    if (w.blocked) {
        if (w.member >= f.size() || !w.embedding ||
            !is_embedding(f[w.member], w.cycle, w.embedding->map, EmbeddingMode::Weak))
            return Check::fail("blocking embedding does not re-verify");
        return {};
    }
    if (!is_free(w.cycle, f))
        return Check::fail("cycle is not F-free");
    return {};
}

} // namespace fraisse
