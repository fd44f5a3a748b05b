#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fraisse/amalgam.hpp"
#include "fraisse/classify.hpp"
#include "fraisse/forbidden.hpp"

namespace fraisse {

/// A one-point extension type over an ordered base of M that M does not
/// realize. `extension` lists the base points first (in order) and the new
/// point last.
struct UnrealizedExtension
{
    std::vector<int> base;
    RelStructure extension;
};

struct GenericityAudit
{
    int depth = 0;
    std::uint64_t total = 0;
    std::uint64_t realized = 0;
    std::vector<UnrealizedExtension> unrealized; // at most kMaxExamples
    static constexpr std::size_t kMaxExamples = 10;

    double ratio() const { return total == 0 ? 1.0 : static_cast<double>(realized) / static_cast<double>(total); }
    bool complete() const { return realized == total; }
};

namespace detail {

/// Mutable structure with hashed instance lookup, used while generating.
class GrowingStructure
{
public:
    static constexpr int kMaxPoints = 1023;

    explicit GrowingStructure(SignaturePtr sig) : sig_(std::move(sig)), sets_(sig_->size())
    {
        if (sig_->max_arity() > 6)
            throw RefusalError("generation supports arities up to 6");
    }

    int size() const { return n_; }
    int add_point()
    {
        if (n_ >= kMaxPoints)
            throw RefusalError("generation supports at most " + std::to_string(kMaxPoints) + " points");
        return n_++;
    }

    bool holds(std::size_t sym, std::span<const int> t) const { return sets_[sym].contains(key(sym, t)); }
    void add(std::size_t sym, const Tuple &t) { sets_[sym].insert(key(sym, t)); }
    void remove(std::size_t sym, const Tuple &t) { sets_[sym].erase(key(sym, t)); }

    RelStructure build() const
    {
        std::vector<std::vector<Tuple>> lists(sets_.size());
        for (std::size_t s = 0; s < sets_.size(); ++s) {
            const auto k = static_cast<std::size_t>((*sig_)[s].arity);
            for (auto code : sets_[s]) {
                Tuple t(k);
                for (std::size_t i = k; i-- > 0;) {
                    t[i] = static_cast<int>(code & 1023U);
                    code >>= 10;
                }
                lists[s].push_back(std::move(t));
            }
        }
        return RelStructure(sig_, n_, lists);
    }

private:
    std::uint64_t key(std::size_t sym, std::span<const int> t) const
    {
        Tuple v(t.begin(), t.end());
        if ((*sig_)[sym].symmetric)
            std::sort(v.begin(), v.end());
        std::uint64_t k = 0;
        for (int p : v)
            k = (k << 10) | static_cast<std::uint64_t>(p);
        return k;
    }

    SignaturePtr sig_;
    int n_ = 0;
    std::vector<std::unordered_set<std::uint64_t>> sets_;
};

/// For each base size c, the tuples through a new point c over base points
/// 0..c-1; an extension type over a base of size c is a bitmask over them.
class TypeSpace
{
public:
    TypeSpace(const SignaturePtr &sig, int max_base) : sig_(sig)
    {
        for (int c = 0; c <= max_base; ++c) {
            through_.push_back(tuples_through(*sig, c + 1, c));
            if (through_.back().size() > 20)
                throw RefusalError("extension types over " + std::to_string(c) + " points need 2^" +
                                   std::to_string(through_.back().size()) + " cases");
        }
    }

    const std::vector<std::pair<std::size_t, Tuple>> &through(std::size_t c) const { return through_[c]; }
    std::uint32_t type_count(std::size_t c) const { return std::uint32_t{1} << through_[c].size(); }

    /// Type of point p over the ordered base in S.
    template <class S>
    std::uint32_t type_of(const S &s, const std::vector<int> &base, int p) const
    {
        const auto &th = through_[base.size()];
        std::uint32_t mask = 0;
        Tuple t;
        for (std::size_t i = 0; i < th.size(); ++i) {
            t.clear();
            for (int q : th[i].second)
                t.push_back(q == static_cast<int>(base.size()) ? p : base[static_cast<std::size_t>(q)]);
            if (s.holds(th[i].first, t))
                mask |= std::uint32_t{1} << i;
        }
        return mask;
    }

    /// Ordered induced structure on `base` as instance lists over 0..c-1.
    template <class S>
    std::vector<std::vector<Tuple>> base_lists(const S &s, const std::vector<int> &base) const
    {
        std::vector<std::vector<Tuple>> lists(sig_->size());
        for (std::size_t c = 1; c <= base.size(); ++c)
            for (const auto &[sym, t] : through_[c - 1]) {
                Tuple img;
                for (int q : t)
                    img.push_back(base[static_cast<std::size_t>(q)]);
                if (s.holds(sym, img))
                    lists[sym].push_back(t);
            }
        return lists;
    }

    RelStructure extension(const std::vector<std::vector<Tuple>> &base_lists, std::size_t c, std::uint32_t mask) const
    {
        auto lists = base_lists;
        for (std::size_t i = 0; i < through_[c].size(); ++i)
            if ((mask >> i) & 1U)
                lists[through_[c][i].first].push_back(through_[c][i].second);
        return RelStructure(sig_, static_cast<int>(c) + 1, lists);
    }

private:
    SignaturePtr sig_;
    std::vector<std::vector<std::pair<std::size_t, Tuple>>> through_;
};

/// F-free extension types over an ordered base, memoized by the base's
/// ordered structure. The base itself is assumed F-free.
class FreeTypeCache
{
public:
    FreeTypeCache(const TypeSpace &space, const ForbiddenFamily &f) : space_(space), f_(f) {}

    const std::vector<std::uint32_t> &free_types(const std::vector<std::vector<Tuple>> &base_lists, std::size_t c)
    {
        auto key = std::pair(c, base_lists);
        auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
        std::vector<std::uint32_t> out;
        for (std::uint32_t mask = 0; mask < space_.type_count(c); ++mask)
            if (is_free_through(space_.extension(base_lists, c, mask), f_, static_cast<int>(c)))
                out.push_back(mask);
        return cache_.emplace(std::move(key), std::move(out)).first->second;
    }

private:
    const TypeSpace &space_;
    const ForbiddenFamily &f_;
    std::map<std::pair<std::size_t, std::vector<std::vector<Tuple>>>, std::vector<std::uint32_t>> cache_;
};

/// All subsets of 0..n-1 of size at most m, by size then lexicographically.
inline std::vector<std::vector<int>> small_subsets(int n, int m)
{
    std::vector<std::vector<int>> out{{}};
    for (int c = 1; c <= std::min(n, m); ++c) {
        std::vector<int> pick(static_cast<std::size_t>(c));
        for (int i = 0; i < c; ++i)
            pick[static_cast<std::size_t>(i)] = i;
        while (true) {
            out.push_back(pick);
            int i = c - 1;
            while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - c + i)
                --i;
            if (i < 0)
                break;
            ++pick[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < c; ++j)
                pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return out;
}

template <class S>
std::uint64_t realized_mask_set(const TypeSpace &space, const S &s, int n, const std::vector<int> &base,
                                std::vector<char> &seen)
{
    seen.assign(space.type_count(base.size()), 0);
    std::uint64_t distinct = 0;
    for (int p = 0; p < n; ++p) {
        if (std::find(base.begin(), base.end(), p) != base.end())
            continue;
        auto t = space.type_of(s, base, p);
        if (!seen[t]) {
            seen[t] = 1;
            ++distinct;
        }
    }
    return distinct;
}

} // namespace detail

/// For every base C ⊆ M with |C| ≤ depth and every F-free one-point
/// extension type over C, whether some point of M outside C realizes it.
inline GenericityAudit extension_axiom_audit(const RelStructure &m, const ForbiddenFamily &f, int depth)
{
    if (depth < 0)
        throw PreconditionError("negative audit depth");
    require_free(m, f, "audited structure");
    detail::TypeSpace space(m.signature_ptr(), std::min(depth, m.size()));
    detail::FreeTypeCache cache(space, f);
    GenericityAudit audit;
    audit.depth = depth;
    std::vector<char> seen;
    for (const auto &base : detail::small_subsets(m.size(), depth)) {
        auto lists = space.base_lists(m, base);
        const auto &free = cache.free_types(lists, base.size());
        detail::realized_mask_set(space, m, m.size(), base, seen);
        for (auto t : free) {
            ++audit.total;
            if (seen[t])
                ++audit.realized;
            else if (audit.unrealized.size() < GenericityAudit::kMaxExamples)
                audit.unrealized.push_back({base, space.extension(lists, base.size(), t)});
        }
    }
    return audit;
}

/// An unrealized example is genuine: the extension is F-free, its base part
/// is M's ordered induced structure on the base, and no point realizes it.
inline bool verify_unrealized(const UnrealizedExtension &u, const RelStructure &m, const ForbiddenFamily &f)
{
    const int c = static_cast<int>(u.base.size());
    if (u.extension.size() != c + 1 || !is_free(u.extension, f))
        return false;
    std::vector<int> head(static_cast<std::size_t>(c));
    for (int i = 0; i < c; ++i)
        head[static_cast<std::size_t>(i)] = i;
    auto seq = u.base;
    if (!(induced_on_sequence(u.extension, head) == induced_on_sequence(m, seq)))
        return false;
    for (int p = 0; p < m.size(); ++p) {
        if (std::find(seq.begin(), seq.end(), p) != seq.end())
            continue;
        seq.push_back(p);
        bool hit = induced_on_sequence(m, seq) == u.extension;
        seq.pop_back();
        if (hit)
            return false;
    }
    return true;
}

inline int default_depth(const ForbiddenFamily &f) { return std::max(1, f.max_member_size() - 1); }

struct GenerateOptions
{
    int size = 0;
    std::optional<int> depth;     // default: largest member size minus one
    std::uint64_t seed = 1;
    bool allow_unclosed = false;  // accept families that are not 2-irreducible
    bool fill = false;            // keep adding points after saturation, up to `size`
};

namespace detail {

class Generator
{
public:
    Generator(const ForbiddenFamily &f, int n, int m, std::uint64_t seed, bool closed, bool fill)
        : f_(f), target_(n), depth_(m), closed_(closed), fill_(fill), rng_(seed), space_(f.signature_ptr(), m), cache_(space_, f),
          g_(f.signature_ptr())
    {
    }

    RelStructure run()
    {
        while (g_.size() < target_) {
            collect_problems();
            std::vector<std::size_t> open;
            for (std::size_t i = 0; i < problems_.size(); ++i)
                if (!blocked_.contains(problems_[i]))
                    open.push_back(i);
            const auto &pool = open.empty() ? solved_ : problems_;
            if (open.empty()) {
                if (!fill_ || solved_.empty())
                    break;
                for (std::size_t i = 0; i < solved_.size(); ++i)
                    open.push_back(i);
            }
            std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
            if (pool.data() == problems_.data()) {
                auto chosen = pool[open[pick(rng_)]];
                if (!add_point_for(chosen))
                    blocked_.insert(chosen);
                continue;
            }
            // Filling: prefer a point that keeps the structure saturated.
            for (int attempt = 0; attempt < kFillAttempts; ++attempt) {
                auto left = add_point_for(pool[open[pick(rng_)]]);
                if (!left)
                    continue;
                if (*left == 0 || attempt + 1 == kFillAttempts)
                    break;
                drop_last_point();
            }
        }
        auto out = g_.build();
        auto v = is_free(out, f_);
        if (!v)
            throw VerificationError("generated structure is not F-free");
        return out;
    }

private:
    using Problem = std::pair<std::vector<int>, std::uint32_t>;

    // Unrealized problems of the current structure, in enumeration order.
    void collect_problems()
    {
        const int n = g_.size();
        subsets_ = small_subsets(n, depth_);
        realized_.assign(subsets_.size(), {});
        problems_.clear();
        solved_.clear();
        unrealized_total_ = 0;
        std::vector<char> seen;
        for (std::size_t k = 0; k < subsets_.size(); ++k) {
            const auto &base = subsets_[k];
            realized_mask_set(space_, g_, n, base, seen);
            realized_[k] = seen;
            for (auto t : cache_.free_types(space_.base_lists(g_, base), base.size()))
                if (!seen[t]) {
                    problems_.emplace_back(base, t);
                    ++unrealized_total_;
                } else {
                    solved_.emplace_back(base, t);
                }
        }
    }

    // Unrealized problems after adding x (which must be the last point of g_).
    std::int64_t score(int x)
    {
        std::int64_t total = static_cast<std::int64_t>(unrealized_total_);
        for (std::size_t k = 0; k < subsets_.size(); ++k) {
            auto t = space_.type_of(g_, subsets_[k], x);
            if (!realized_[k][t])
                --total;
        }
        std::vector<char> seen;
        for (const auto &d : subsets_) {
            if (static_cast<int>(d.size()) >= depth_)
                continue;
            auto base = d;
            base.push_back(x);
            const auto &free = cache_.free_types(space_.base_lists(g_, base), base.size());
            realized_mask_set(space_, g_, x + 1, base, seen);
            for (auto t : free)
                if (!seen[t])
                    ++total;
        }
        return total;
    }

    // Adds a point realizing `problem`; returns the number of problems left
    // unrealized, or nothing if the problem cannot be realized.
    std::optional<std::int64_t> add_point_for(const Problem &problem)
    {
        const auto &[base, type] = problem;
        const int x = g_.add_point();
        const auto &th = space_.through(base.size());
        std::vector<std::pair<std::size_t, Tuple>> fixed;
        for (std::size_t i = 0; i < th.size(); ++i)
            if ((type >> i) & 1U) {
                Tuple t;
                for (int q : th[i].second)
                    t.push_back(q == static_cast<int>(base.size()) ? x : base[static_cast<std::size_t>(q)]);
                fixed.emplace_back(th[i].first, std::move(t));
            }
        for (const auto &[sym, t] : fixed)
            g_.add(sym, t);
        if (!is_free_through(g_.build(), f_, x)) {
            drop_last_point();
            return std::nullopt;
        }

        // Free choices: tuples through x that leave base ∪ {x}.
        std::vector<std::pair<std::size_t, Tuple>> vars;
        for (auto &[sym, t] : tuples_through(*f_.signature_ptr(), x + 1, x))
            if (std::any_of(t.begin(), t.end(), [&](int p) {
                    return p != x && std::find(base.begin(), base.end(), p) == base.end();
                }))
                vars.emplace_back(sym, std::move(t));
        std::vector<char> on(vars.size(), 0);

        std::int64_t best = score(x);
        for (int pass = 0; pass < kMaxPasses; ++pass) {
            std::vector<std::size_t> order(vars.size());
            for (std::size_t i = 0; i < order.size(); ++i)
                order[i] = i;
            std::shuffle(order.begin(), order.end(), rng_);
            bool improved = false;
            for (auto i : order) {
                const auto &[sym, t] = vars[i];
                if (on[i])
                    g_.remove(sym, t);
                else
                    g_.add(sym, t);
                on[i] ^= 1;
                bool ok = !on[i] || is_free_through(g_.build(), f_, x);
                std::int64_t s = ok ? score(x) : best;
                if (ok && s < best) {
                    best = s;
                    improved = true;
                    continue;
                }
                if (on[i])
                    g_.remove(sym, t);
                else
                    g_.add(sym, t);
                on[i] ^= 1;
            }
            if (!improved)
                break;
        }

        if (!is_free(g_.build(), f_)) {
            if (closed_)
                throw VerificationError("locally accepted extension failed the global F-freeness recheck");
            drop_last_point();
            return std::nullopt;
        }
        return best;
    }

    void drop_last_point()
    {
        const int x = g_.size() - 1;
        auto s = g_.build();
        GrowingStructure rebuilt(f_.signature_ptr());
        for (int p = 0; p < x; ++p)
            rebuilt.add_point();
        for (std::size_t sym = 0; sym < s.symbol_count(); ++sym)
            for (std::size_t i = 0; i < s.instance_count(sym); ++i) {
                auto inst = s.instance(sym, i);
                if (std::find(inst.begin(), inst.end(), x) == inst.end())
                    rebuilt.add(sym, Tuple(inst.begin(), inst.end()));
            }
        g_ = std::move(rebuilt);
    }

    static constexpr int kMaxPasses = 20;
    static constexpr int kFillAttempts = 8;

    const ForbiddenFamily &f_;
    int target_;
    int depth_;
    bool closed_;
    bool fill_;
    std::mt19937_64 rng_;
    TypeSpace space_;
    FreeTypeCache cache_;
    GrowingStructure g_;
    std::vector<std::vector<int>> subsets_;
    std::vector<std::vector<char>> realized_;
    std::vector<Problem> problems_;
    std::vector<Problem> solved_;
    std::uint64_t unrealized_total_ = 0;
    std::set<Problem> blocked_;
};

} // namespace detail

/// Finite approximation of the generic F-free structure. Starting from the
/// empty structure, repeatedly picks (seeded) an unrealized extension
/// problem (C, τ) with |C| ≤ depth and adds a point realizing τ over C. The
/// new point's relations to the rest are then chosen by seeded local search
/// to leave as few unrealized problems as possible, keeping the structure
/// F-free. Stops at `size` points or when every problem is realized; with
/// `fill`, saturation does not stop it and further points realize randomly
/// chosen (already realized) problems.
inline RelStructure generate(const ForbiddenFamily &f, const GenerateOptions &opt)
{
    require_minimal(f);
    const int m = opt.depth.value_or(default_depth(f));
    if (opt.size < 0 || m < 0)
        throw PreconditionError("size and depth must be non-negative");
    if (opt.size == 0 && m > 0)
        throw PreconditionError("size 0 with positive depth");
    bool closed = closure_under_free_amalgam(f).closed;
    if (!closed && !opt.allow_unclosed)
        throw PreconditionError("family is not closed under free amalgamation; pass the override to generate anyway");
    return detail::Generator(f, opt.size, m, opt.seed, closed, opt.fill).run();
}

inline RelStructure generate(const ForbiddenFamily &f, int size, int depth, std::uint64_t seed)
{
    return generate(f, GenerateOptions{size, depth, seed, false, false});
}

/// A copy a' of a over C (M[a'] ≅ M[a] fixing C pointwise) with
/// a' ⫝ᶠᵃ_C B in M, if M contains one.
inline std::optional<PointSet> full_existence_check(const RelStructure &m, const ForbiddenFamily &f, const PointSet &a,
                                                    const PointSet &b, const PointSet &c)
{
    if (a.bound() > m.size() || b.bound() > m.size() || c.bound() > m.size())
        throw PreconditionError("subset outside the structure");
    if (!c.subset_of(a))
        throw PreconditionError("base must be contained in a");
    require_free(m, f, "ambient structure");
    auto sub = induced_substructure(m, a);
    PartialMap fixed;
    for (std::size_t i = 0; i < sub.to_parent.size(); ++i)
        if (c.contains(sub.to_parent[i]))
            fixed.emplace_back(static_cast<int>(i), sub.to_parent[i]);
    std::optional<PointSet> found;
    for_each_embedding(sub.structure, m, EmbeddingMode::Induced, fixed, [&](const std::vector<int> &e) {
        PointSet img(e);
        if (fa_independent(m, img, b, c)) {
            found = img;
            return false;
        }
        return true;
    });
    return found;
}

} // namespace fraisse
