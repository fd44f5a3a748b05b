#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fraisse/core/canonical.hpp"

namespace fraisse {

inline constexpr int kDefaultEnumerationCap = 6;

/// All tuples over points 0..n-1 that mention `point`, with distinct
/// coordinates, one per orbit for symmetric symbols.
inline std::vector<std::pair<std::size_t, Tuple>> tuples_through(const Signature &sig, int n, int point)
{
    std::vector<std::pair<std::size_t, Tuple>> out;
    for (std::size_t s = 0; s < sig.size(); ++s) {
        const int k = sig[s].arity;
        if (k > n)
            continue;
        Tuple t(static_cast<std::size_t>(k));
        std::function<void(std::size_t)> rec = [&](std::size_t pos) {
            if (pos == t.size()) {
                if (std::find(t.begin(), t.end(), point) == t.end())
                    return;
                if (sig[s].symmetric && !std::is_sorted(t.begin(), t.end()))
                    return;
                out.emplace_back(s, t);
                return;
            }
            for (int v = 0; v < n; ++v) {
                if (std::find(t.begin(), t.begin() + static_cast<long>(pos), v) != t.begin() + static_cast<long>(pos))
                    continue;
                t[pos] = v;
                rec(pos + 1);
            }
        };
        rec(0);
    }
    return out;
}

/// Isomorphism classes of every size 0..n, level by level. Classes of size k
/// come from classes of size k-1 by adding a point with every possible set of
/// instances through it, deduplicated by canonical code.
inline std::vector<std::vector<RelStructure>> enumerate_levels(const SignaturePtr &sig, int n,
                                                               int cap = kDefaultEnumerationCap)
{
    if (n < 0)
        throw PreconditionError("negative enumeration size");
    if (n > cap)
        throw RefusalError("enumeration size " + std::to_string(n) + " exceeds the cap of " + std::to_string(cap));
    std::vector<std::vector<RelStructure>> levels;
    levels.push_back({RelStructure::empty(sig, 0)});
    for (int k = 1; k <= n; ++k) {
        auto through = tuples_through(*sig, k, k - 1);
        if (through.size() > 24)
            throw RefusalError("enumeration at size " + std::to_string(k) + " needs 2^" +
                               std::to_string(through.size()) + " extensions per class");
        std::map<CanonicalCode, RelStructure> seen;
        for (const auto &base : levels.back()) {
            auto old = base.instance_lists();
            for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << through.size()); ++bits) {
                auto lists = old;
                for (std::size_t i = 0; i < through.size(); ++i)
                    if ((bits >> i) & 1U)
                        lists[through[i].first].push_back(through[i].second);
                RelStructure s(sig, k, lists);
                auto lab = canonical_labeling(s);
                if (!seen.contains(lab.code))
                    seen.emplace(lab.code, permuted(s, lab.relabel));
            }
        }
        std::vector<RelStructure> level;
        for (auto &entry : seen)
            level.push_back(std::move(entry.second));
        levels.push_back(std::move(level));
    }
    return levels;
}

/// One representative (the canonical relabelling) per isomorphism class of
/// structures of size n accepted by `filter`, ordered by canonical code.
inline std::vector<RelStructure> enumerate_structures(const SignaturePtr &sig, int n,
                                                      const std::function<bool(const RelStructure &)> &filter = {},
                                                      int cap = kDefaultEnumerationCap)
{
    auto levels = enumerate_levels(sig, n, cap);
    std::vector<RelStructure> out;
    for (auto &s : levels.back())
        if (!filter || filter(s))
            out.push_back(std::move(s));
    return out;
}

/// All classes of every size 0..max_size.
inline std::vector<RelStructure> enumerate_up_to(const SignaturePtr &sig, int max_size,
                                                 const std::function<bool(const RelStructure &)> &filter = {},
                                                 int cap = kDefaultEnumerationCap)
{
    std::vector<RelStructure> out;
    for (auto &level : enumerate_levels(sig, max_size, cap))
        for (auto &s : level)
            if (!filter || filter(s))
                out.push_back(std::move(s));
    return out;
}

} // namespace fraisse
