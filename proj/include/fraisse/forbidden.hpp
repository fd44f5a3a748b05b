#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraisse/core/canonical.hpp"
#include "fraisse/embedding.hpp"
#include "fraisse/parallel.hpp"

namespace fraisse {

/// A finite list of forbidden structures over one signature, deduplicated up
/// to isomorphism and ordered by (size, canonical code).
class ForbiddenFamily
{
public:
    explicit ForbiddenFamily(SignaturePtr sig, const std::vector<RelStructure> &members = {}, bool minimal = false)
        : sig_(std::move(sig)), minimal_(minimal)
    {
        if (!sig_)
            throw PreconditionError("family without a signature");
        std::vector<std::pair<std::pair<int, CanonicalCode>, RelStructure>> keyed;
        for (const auto &m : members) {
            if (!same_signature(sig_, m.signature_ptr()))
                throw PreconditionError("family member over a different signature");
            if (m.size() == 0)
                throw PreconditionError("family members must be nonempty");
            auto key = std::pair(m.size(), canonical_form(m));
            if (std::none_of(keyed.begin(), keyed.end(), [&](const auto &e) { return e.first == key; }))
                keyed.emplace_back(std::move(key), m);
        }
        std::stable_sort(keyed.begin(), keyed.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
        for (auto &e : keyed) {
            codes_.push_back(e.first.second);
            members_.push_back(std::move(e.second));
        }
    }

    const SignaturePtr &signature_ptr() const { return sig_; }
    const std::vector<RelStructure> &members() const { return members_; }
    const RelStructure &operator[](std::size_t i) const { return members_[i]; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    bool minimal() const { return minimal_; }
    const std::vector<CanonicalCode> &codes() const { return codes_; }

    int max_member_size() const
    {
        int m = 0;
        for (const auto &s : members_)
            m = std::max(m, s.size());
        return m;
    }

    /// Index of the member isomorphic to `s`, if any.
    std::optional<std::size_t> find(const RelStructure &s) const
    {
        if (!same_signature(sig_, s.signature_ptr()))
            return std::nullopt;
        auto code = canonical_form(s);
        for (std::size_t i = 0; i < members_.size(); ++i)
            if (members_[i].size() == s.size() && codes_[i] == code)
                return i;
        return std::nullopt;
    }

    /// Same canonical member set (and signature).
    bool equivalent(const ForbiddenFamily &o) const { return same_signature(sig_, o.sig_) && codes_ == o.codes_; }

private:
    SignaturePtr sig_;
    std::vector<RelStructure> members_;
    std::vector<CanonicalCode> codes_;
    bool minimal_;
};

/// Outcome of an F-freeness check; on violation, a member and a weak
/// embedding of it into the structure.
struct FreenessVerdict
{
    bool free = true;
    std::size_t member = 0;
    std::optional<Embedding> embedding;

    explicit operator bool() const { return free; }
};

class NotFreeError : public PreconditionError
{
public:
    NotFreeError(const std::string &what, FreenessVerdict v) : PreconditionError(what), verdict(std::move(v)) {}
    FreenessVerdict verdict;
};

/// S is F-free iff no member weakly embeds into S. The reported violation is
/// the lowest-index member that embeds, with its first embedding.
inline FreenessVerdict is_free(const RelStructure &s, const ForbiddenFamily &f, unsigned threads = 1)
{
    if (!same_signature(s.signature_ptr(), f.signature_ptr()))
        throw PreconditionError("structure and family use different signatures");
    std::vector<std::optional<Embedding>> found(f.size());
    parallel_for(f.size(), threads,
                 [&](std::size_t i) { found[i] = find_embedding(f[i], s, EmbeddingMode::Weak); });
    for (std::size_t i = 0; i < found.size(); ++i)
        if (found[i])
            return {false, i, found[i]};
    return {};
}

/// F-freeness restricted to copies that use point `p`. Sufficient after
/// adding `p` (with its instances) to a structure that was already F-free.
inline FreenessVerdict is_free_through(const RelStructure &s, const ForbiddenFamily &f, int p)
{
    for (std::size_t i = 0; i < f.size(); ++i)
        for (int v = 0; v < f[i].size(); ++v)
            if (auto e = find_embedding(f[i], s, EmbeddingMode::Weak, {{v, p}}))
                return {false, i, e};
    return {};
}

inline void require_free(const RelStructure &s, const ForbiddenFamily &f, const std::string &what)
{
    auto v = is_free(s, f);
    if (!v)
        throw NotFreeError(what + " contains a weak copy of family member " + std::to_string(v.member), v);
}

/// A weak embedding that is not an isomorphism: it misses a point, or it is
/// onto but B has more instances than A.
inline bool is_proper_weak_embedding(const RelStructure &a, const RelStructure &b, const std::vector<int> &map)
{
    if (!is_embedding(a, b, map, EmbeddingMode::Weak))
        return false;
    return a.size() < b.size() || a.total_instances() < b.total_instances();
}

/// Members of F* into which no other member properly weakly embeds. The
/// class of F-free structures is unchanged.
inline ForbiddenFamily minimalize(const ForbiddenFamily &fstar, unsigned threads = 1)
{
    const auto &m = fstar.members();
    std::vector<char> keep(m.size(), 1);
    parallel_for(m.size(), threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < m.size() && keep[i]; ++j) {
            if (j == i || m[j].size() > m[i].size())
                continue;
            for_each_embedding(m[j], m[i], EmbeddingMode::Weak, {}, [&](const std::vector<int> &e) {
                if (is_proper_weak_embedding(m[j], m[i], e)) {
                    keep[i] = 0;
                    return false;
                }
                return true;
            });
        }
    });
    std::vector<RelStructure> out;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (keep[i])
            out.push_back(m[i]);
    return ForbiddenFamily(fstar.signature_ptr(), out, true);
}

/// Irreducible, or the first (lexicographic) k-set of points that no single
/// instance covers.
struct IrreducibilityVerdict
{
    int k = 2;
    bool irreducible = true;
    std::vector<int> unrelated;

    explicit operator bool() const { return irreducible; }
};

/// Whether some instance of some symbol has all of `points` among its
/// coordinates.
inline bool related(const RelStructure &s, const std::vector<int> &points)
{
    for (std::size_t sym = 0; sym < s.symbol_count(); ++sym) {
        if (static_cast<std::size_t>(s.arity(sym)) < points.size())
            continue;
        for (std::size_t i = 0; i < s.instance_count(sym); ++i) {
            auto t = s.instance(sym, i);
            if (std::all_of(points.begin(), points.end(),
                            [&](int p) { return std::find(t.begin(), t.end(), p) != t.end(); }))
                return true;
        }
    }
    return false;
}

inline IrreducibilityVerdict is_k_irreducible(const RelStructure &a, int k)
{
    if (k < 2)
        throw PreconditionError("irreducibility needs k >= 2");
    IrreducibilityVerdict v{k, true, {}};
    const int n = a.size();
    if (n < k)
        return v;
    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        pick[static_cast<std::size_t>(i)] = i;
    while (true) {
        if (!related(a, pick)) {
            v.irreducible = false;
            v.unrelated = pick;
            return v;
        }
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i)
            --i;
        if (i < 0)
            return v;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
}

} // namespace fraisse
