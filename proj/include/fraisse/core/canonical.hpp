#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "fraisse/core/structure.hpp"

namespace fraisse {

/// Byte encoding of an isomorphism class. Equal codes iff isomorphic
/// structures (over the same signature).
struct CanonicalCode
{
    std::vector<std::uint8_t> bytes;

    auto operator<=>(const CanonicalCode &) const = default;
    bool operator==(const CanonicalCode &) const = default;

    std::string hex() const
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s;
        s.reserve(bytes.size() * 2);
        for (auto b : bytes) {
            s.push_back(digits[b >> 4]);
            s.push_back(digits[b & 15]);
        }
        return s;
    }
};

struct CanonicalLabeling
{
    std::vector<int> relabel; // relabel[old] = new
    CanonicalCode code;
};

namespace detail {

/// Ordered-partition refinement: each round re-ranks points by their current
/// colour plus the sorted multiset of coloured incidences. Ranks respect the
/// previous order, so the result is a refinement of the input partition.
class Refiner
{
public:
    explicit Refiner(const RelStructure &s) : s_(s) {}

    int refine(std::vector<int> &colour) const
    {
        const auto n = static_cast<std::size_t>(s_.size());
        int classes = count_classes(colour);
        std::vector<std::vector<int>> sigs(n);
        std::vector<std::vector<int>> entries;
        while (true) {
            for (std::size_t v = 0; v < n; ++v) {
                entries.clear();
                for (const auto &inc : s_.incident(static_cast<int>(v))) {
                    auto t = s_.instance(inc.symbol, inc.index);
                    std::vector<int> e;
                    e.reserve(t.size() + 2);
                    e.push_back(static_cast<int>(inc.symbol));
                    if (s_.symmetric(inc.symbol)) {
                        e.push_back(-1);
                        std::vector<int> others;
                        for (int p : t)
                            if (p != static_cast<int>(v))
                                others.push_back(colour[static_cast<std::size_t>(p)]);
                        std::sort(others.begin(), others.end());
                        e.insert(e.end(), others.begin(), others.end());
                    } else {
                        int pos = static_cast<int>(std::find(t.begin(), t.end(), static_cast<int>(v)) - t.begin());
                        e.push_back(pos);
                        for (int p : t)
                            e.push_back(colour[static_cast<std::size_t>(p)]);
                    }
                    entries.push_back(std::move(e));
                }
                std::sort(entries.begin(), entries.end());
                auto &sig = sigs[v];
                sig.clear();
                sig.push_back(colour[v]);
                for (const auto &e : entries) {
                    sig.push_back(static_cast<int>(e.size()));
                    sig.insert(sig.end(), e.begin(), e.end());
                }
            }
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sigs[a] < sigs[b]; });
            int rank = -1;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == 0 || sigs[order[i]] != sigs[order[i - 1]])
                    ++rank;
                colour[order[i]] = rank;
            }
            int now = rank + 1;
            if (now == classes)
                return classes;
            classes = now;
        }
    }

    static int count_classes(const std::vector<int> &colour)
    {
        std::vector<int> c = colour;
        std::sort(c.begin(), c.end());
        return static_cast<int>(std::unique(c.begin(), c.end()) - c.begin());
    }

private:
    const RelStructure &s_;
};

inline std::vector<int> leaf_encoding(const RelStructure &s, const std::vector<int> &perm)
{
    std::vector<int> enc;
    enc.push_back(s.size());
    for (std::size_t sym = 0; sym < s.symbol_count(); ++sym) {
        std::vector<Tuple> ts;
        ts.reserve(s.instance_count(sym));
        for (std::size_t i = 0; i < s.instance_count(sym); ++i) {
            Tuple t;
            for (int p : s.instance(sym, i))
                t.push_back(perm[static_cast<std::size_t>(p)]);
            ts.push_back(s.normalized(sym, std::move(t)));
        }
        std::sort(ts.begin(), ts.end());
        enc.push_back(static_cast<int>(ts.size()));
        for (const auto &t : ts)
            enc.insert(enc.end(), t.begin(), t.end());
    }
    return enc;
}

/// Individualization-refinement search for the lexicographically least leaf
/// encoding, with orbit pruning from automorphisms found along the way.
class CanonSearch
{
public:
    explicit CanonSearch(const RelStructure &s) : s_(s), refiner_(s) {}

    CanonicalLabeling run()
    {
        std::vector<int> colour(static_cast<std::size_t>(s_.size()), 0);
        refiner_.refine(colour);
        std::vector<int> path;
        dfs(colour, path);
        CanonicalLabeling out;
        out.relabel = best_perm_;
        for (int x : best_enc_) {
            // varint
            auto u = static_cast<std::uint32_t>(x);
            while (u >= 0x80) {
                out.code.bytes.push_back(static_cast<std::uint8_t>(u | 0x80));
                u >>= 7;
            }
            out.code.bytes.push_back(static_cast<std::uint8_t>(u));
        }
        return out;
    }

private:
    // Returns the depth the search should unwind to (path length), or
    // npos-like large value to continue normally.
    std::size_t dfs(std::vector<int> &colour, std::vector<int> &path)
    {
        const auto n = static_cast<std::size_t>(s_.size());
        // Target cell: smallest colour with more than one member.
        std::vector<int> cnt(n + 1, 0);
        for (auto c : colour)
            ++cnt[static_cast<std::size_t>(c)];
        int target = -1;
        for (std::size_t c = 0; c < n; ++c)
            if (cnt[c] > 1) {
                target = static_cast<int>(c);
                break;
            }
        if (target < 0)
            return leaf(colour, path);

        std::vector<int> cell;
        for (std::size_t v = 0; v < n; ++v)
            if (colour[v] == target)
                cell.push_back(static_cast<int>(v));

        std::vector<int> tried;
        for (int v : cell) {
            if (pruned(v, tried, path))
                continue;
            tried.push_back(v);
            std::vector<int> child(n);
            for (std::size_t u = 0; u < n; ++u)
                child[u] = colour[u] * 2 + (static_cast<int>(u) == v ? 0 : 1);
            refiner_.refine(child);
            path.push_back(v);
            std::size_t back = dfs(child, path);
            path.pop_back();
            if (back < path.size())
                return back;
        }
        return kContinue;
    }

    std::size_t leaf(const std::vector<int> &perm, const std::vector<int> &path)
    {
        auto enc = leaf_encoding(s_, perm);
        if (best_enc_.empty() || enc < best_enc_) {
            best_enc_ = std::move(enc);
            best_perm_ = perm;
            best_path_ = path;
            return kContinue;
        }
        if (enc == best_enc_) {
            // best_perm^{-1} o perm is an automorphism.
            const auto n = perm.size();
            std::vector<int> inv(n);
            for (std::size_t v = 0; v < n; ++v)
                inv[static_cast<std::size_t>(best_perm_[v])] = static_cast<int>(v);
            std::vector<int> gamma(n);
            for (std::size_t v = 0; v < n; ++v)
                gamma[v] = inv[static_cast<std::size_t>(perm[v])];
            autos_.push_back(std::move(gamma));
            std::size_t common = 0;
            while (common < path.size() && common < best_path_.size() && path[common] == best_path_[common])
                ++common;
            return common;
        }
        return kContinue;
    }

    bool pruned(int v, const std::vector<int> &tried, const std::vector<int> &path) const
    {
        if (tried.empty() || autos_.empty())
            return false;
        const auto n = static_cast<std::size_t>(s_.size());
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
                x = parent[static_cast<std::size_t>(x)];
            }
            return x;
        };
        bool any = false;
        for (const auto &g : autos_) {
            bool fixes = std::all_of(path.begin(), path.end(),
                                     [&](int p) { return g[static_cast<std::size_t>(p)] == p; });
            if (!fixes)
                continue;
            any = true;
            for (std::size_t x = 0; x < n; ++x) {
                int a = find(static_cast<int>(x)), b = find(g[x]);
                if (a != b)
                    parent[static_cast<std::size_t>(a)] = b;
            }
        }
        if (!any)
            return false;
        int rv = find(v);
        return std::any_of(tried.begin(), tried.end(), [&](int t) { return find(t) == rv; });
    }

    static constexpr std::size_t kContinue = static_cast<std::size_t>(-1);

    const RelStructure &s_;
    Refiner refiner_;
    std::vector<int> best_enc_;
    std::vector<int> best_perm_;
    std::vector<int> best_path_;
    std::vector<std::vector<int>> autos_;
};

} // namespace detail

inline CanonicalLabeling canonical_labeling(const RelStructure &s)
{
    return detail::CanonSearch(s).run();
}

/// Exact isomorphism-invariant code: colour refinement, then backtracking
/// over the remaining non-singleton cells.
inline CanonicalCode canonical_form(const RelStructure &s)
{
    return canonical_labeling(s).code;
}

/// The canonical representative of S's isomorphism class.
inline RelStructure canonical_relabel(const RelStructure &s)
{
    auto lab = canonical_labeling(s);
    return permuted(s, lab.relabel);
}

inline bool isomorphic(const RelStructure &a, const RelStructure &b)
{
    return same_signature(a.signature_ptr(), b.signature_ptr()) && a.size() == b.size() &&
           a.total_instances() == b.total_instances() && canonical_form(a) == canonical_form(b);
}

} // namespace fraisse
