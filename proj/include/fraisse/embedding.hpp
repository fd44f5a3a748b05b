#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraisse/core/structure.hpp"

namespace fraisse {

enum class EmbeddingMode { Weak, Induced };

inline const char *to_string(EmbeddingMode m) { return m == EmbeddingMode::Weak ? "weak" : "induced"; }

/// An injective map from the universe of A into the universe of B.
struct Embedding
{
    std::vector<int> map;
    EmbeddingMode mode = EmbeddingMode::Weak;

    bool operator==(const Embedding &) const = default;
};

/// Partial assignment of A-points to B-points, as (a, b) pairs.
using PartialMap = std::vector<std::pair<int, int>>;

enum class SearchStatus { Found, NotFound, BudgetExceeded };

struct SearchOptions
{
    /// Upper bound on assignments tried; absent means exhaustive.
    std::optional<std::uint64_t> node_budget;
};

struct SearchResult
{
    SearchStatus status = SearchStatus::NotFound;
    std::optional<Embedding> embedding;
    std::uint64_t nodes = 0;
};

/// Whether `map` is an embedding of A into B in the given mode.
inline bool is_embedding(const RelStructure &a, const RelStructure &b, const std::vector<int> &map, EmbeddingMode mode)
{
    if (!same_signature(a.signature_ptr(), b.signature_ptr()))
        return false;
    if (map.size() != static_cast<std::size_t>(a.size()))
        return false;
    std::vector<int> pre(static_cast<std::size_t>(b.size()), -1);
    for (std::size_t v = 0; v < map.size(); ++v) {
        int w = map[v];
        if (w < 0 || w >= b.size() || pre[static_cast<std::size_t>(w)] >= 0)
            return false;
        pre[static_cast<std::size_t>(w)] = static_cast<int>(v);
    }
    Tuple img;
    for (std::size_t s = 0; s < a.symbol_count(); ++s)
        for (std::size_t i = 0; i < a.instance_count(s); ++i) {
            img.clear();
            for (int p : a.instance(s, i))
                img.push_back(map[static_cast<std::size_t>(p)]);
            if (!b.holds(s, img))
                return false;
        }
    if (mode == EmbeddingMode::Induced) {
        for (std::size_t s = 0; s < b.symbol_count(); ++s)
            for (std::size_t i = 0; i < b.instance_count(s); ++i) {
                img.clear();
                bool inside = true;
                for (int p : b.instance(s, i)) {
                    int q = pre[static_cast<std::size_t>(p)];
                    if (q < 0) {
                        inside = false;
                        break;
                    }
                    img.push_back(q);
                }
                if (inside && !a.holds(s, img))
                    return false;
            }
    }
    return true;
}

namespace detail {

/// Per-point incidence counts, one slot per (symbol, position) for
/// asymmetric symbols and one per symbol for symmetric ones.
inline std::vector<std::vector<int>> degree_profiles(const RelStructure &s)
{
    std::vector<std::size_t> offset(s.symbol_count() + 1, 0);
    for (std::size_t sym = 0; sym < s.symbol_count(); ++sym)
        offset[sym + 1] = offset[sym] + (s.symmetric(sym) ? 1 : static_cast<std::size_t>(s.arity(sym)));
    std::vector<std::vector<int>> prof(static_cast<std::size_t>(s.size()), std::vector<int>(offset.back(), 0));
    for (int v = 0; v < s.size(); ++v)
        for (const auto &inc : s.incident(v)) {
            std::size_t slot = offset[inc.symbol];
            if (!s.symmetric(inc.symbol)) {
                auto t = s.instance(inc.symbol, inc.index);
                slot += static_cast<std::size_t>(std::find(t.begin(), t.end(), v) - t.begin());
            }
            ++prof[static_cast<std::size_t>(v)][slot];
        }
    return prof;
}

class EmbeddingSearch
{
public:
    using Visitor = std::function<bool(const std::vector<int> &)>;

    EmbeddingSearch(const RelStructure &a, const RelStructure &b, EmbeddingMode mode, const PartialMap &partial,
                    SearchOptions opts)
        : a_(a), b_(b), mode_(mode), opts_(opts)
    {
        if (!same_signature(a.signature_ptr(), b.signature_ptr()))
            throw PreconditionError("embedding between structures over different signatures");
        const auto na = static_cast<std::size_t>(a.size());
        map_.assign(na, -1);
        pre_.assign(static_cast<std::size_t>(b.size()), -1);
        for (auto [u, w] : partial) {
            if (u < 0 || u >= a.size() || w < 0 || w >= b.size())
                throw PreconditionError("partial map entry out of range");
            if (map_[static_cast<std::size_t>(u)] >= 0 || pre_[static_cast<std::size_t>(w)] >= 0)
                throw PreconditionError("partial map is not an injective function");
            map_[static_cast<std::size_t>(u)] = w;
            pre_[static_cast<std::size_t>(w)] = u;
        }
        for (auto [u, w] : partial)
            if (!consistent(u, w))
                throw PreconditionError("partial map does not preserve relations on its domain");

        prof_a_ = degree_profiles(a);
        prof_b_ = degree_profiles(b);
        order_vertices();
    }

    /// Calls `visit` for each embedding in search order until it returns
    /// false. Returns false if the node budget ran out.
    bool run(const Visitor &visit)
    {
        visit_ = &visit;
        stopped_ = false;
        return extend(0);
    }

    std::uint64_t nodes() const { return nodes_; }

private:
    void order_vertices()
    {
        const auto na = static_cast<std::size_t>(a_.size());
        std::vector<char> placed(na, 0);
        for (std::size_t v = 0; v < na; ++v)
            if (map_[v] >= 0)
                placed[v] = 1;
        std::vector<int> touching(na, 0);
        auto bump = [&](int v) {
            for (const auto &inc : a_.incident(v))
                for (int p : a_.instance(inc.symbol, inc.index))
                    if (p != v)
                        ++touching[static_cast<std::size_t>(p)];
        };
        for (std::size_t v = 0; v < na; ++v)
            if (placed[v])
                bump(static_cast<int>(v));
        for (std::size_t step = 0; step < na; ++step) {
            int best = -1;
            for (std::size_t v = 0; v < na; ++v) {
                if (placed[v])
                    continue;
                if (best < 0)
                    best = static_cast<int>(v);
                else {
                    auto bv = static_cast<std::size_t>(best);
                    auto key_v = std::pair(a_.incident(static_cast<int>(v)).size(), touching[v]);
                    auto key_b = std::pair(a_.incident(best).size(), touching[bv]);
                    if (key_v > key_b)
                        best = static_cast<int>(v);
                }
            }
            if (best < 0)
                break;
            placed[static_cast<std::size_t>(best)] = 1;
            order_.push_back(best);
            bump(best);
        }
    }

    bool compatible(int v, int w) const
    {
        const auto &pa = prof_a_[static_cast<std::size_t>(v)];
        const auto &pb = prof_b_[static_cast<std::size_t>(w)];
        for (std::size_t i = 0; i < pa.size(); ++i)
            if (pb[i] < pa[i])
                return false;
        return true;
    }

    // Checks the constraints between v (mapped to w) and already-mapped points.
    bool consistent(int v, int w) const
    {
        Tuple img;
        for (const auto &inc : a_.incident(v)) {
            img.clear();
            bool complete = true;
            for (int p : a_.instance(inc.symbol, inc.index)) {
                int q = map_[static_cast<std::size_t>(p)];
                if (q < 0) {
                    complete = false;
                    break;
                }
                img.push_back(q);
            }
            if (complete && !b_.holds(inc.symbol, img))
                return false;
        }
        if (mode_ == EmbeddingMode::Induced) {
            for (const auto &inc : b_.incident(w)) {
                img.clear();
                bool complete = true;
                for (int p : b_.instance(inc.symbol, inc.index)) {
                    int q = pre_[static_cast<std::size_t>(p)];
                    if (q < 0) {
                        complete = false;
                        break;
                    }
                    img.push_back(q);
                }
                if (complete && !a_.holds(inc.symbol, img))
                    return false;
            }
        }
        return true;
    }

    bool extend(std::size_t depth)
    {
        if (depth == order_.size()) {
            if (!(*visit_)(map_))
                stopped_ = true;
            return true;
        }
        int v = order_[depth];
        for (int w = 0; w < b_.size(); ++w) {
            if (pre_[static_cast<std::size_t>(w)] >= 0 || !compatible(v, w))
                continue;
            if (opts_.node_budget && nodes_ >= *opts_.node_budget)
                return false;
            ++nodes_;
            map_[static_cast<std::size_t>(v)] = w;
            pre_[static_cast<std::size_t>(w)] = v;
            bool ok = consistent(v, w);
            bool within_budget = ok ? extend(depth + 1) : true;
            map_[static_cast<std::size_t>(v)] = -1;
            pre_[static_cast<std::size_t>(w)] = -1;
            if (!within_budget)
                return false;
            if (stopped_)
                return true;
        }
        return true;
    }

    const RelStructure &a_;
    const RelStructure &b_;
    EmbeddingMode mode_;
    SearchOptions opts_;
    std::vector<int> map_, pre_, order_;
    std::vector<std::vector<int>> prof_a_, prof_b_;
    const Visitor *visit_ = nullptr;
    bool stopped_ = false;
    std::uint64_t nodes_ = 0;
};

} // namespace detail

/// Visits every embedding of A into B extending `partial`, in the
/// deterministic search order, until `visit` returns false.
inline SearchStatus for_each_embedding(const RelStructure &a, const RelStructure &b, EmbeddingMode mode,
                                       const PartialMap &partial,
                                       const std::function<bool(const std::vector<int> &)> &visit,
                                       SearchOptions opts = {})
{
    if (a.size() > b.size())
        return SearchStatus::NotFound;
    detail::EmbeddingSearch search(a, b, mode, partial, opts);
    bool any = false;
    auto wrapped = [&](const std::vector<int> &m) {
        any = true;
        return visit(m);
    };
    if (!search.run(wrapped))
        return SearchStatus::BudgetExceeded;
    return any ? SearchStatus::Found : SearchStatus::NotFound;
}

/// Sound and complete search for an embedding of A into B extending
/// `partial`; with a node budget the outcome may be BudgetExceeded.
inline SearchResult search_embedding(const RelStructure &a, const RelStructure &b, EmbeddingMode mode,
                                     const PartialMap &partial = {}, SearchOptions opts = {})
{
    SearchResult r;
    if (a.size() > b.size()) {
        detail::EmbeddingSearch check(a, b, mode, partial, opts);
        r.status = SearchStatus::NotFound;
        return r;
    }
    detail::EmbeddingSearch search(a, b, mode, partial, opts);
    bool complete = search.run([&](const std::vector<int> &m) {
        r.embedding = Embedding{m, mode};
        return false;
    });
    r.nodes = search.nodes();
    if (r.embedding)
        r.status = SearchStatus::Found;
    else
        r.status = complete ? SearchStatus::NotFound : SearchStatus::BudgetExceeded;
    return r;
}

inline std::optional<Embedding> find_embedding(const RelStructure &a, const RelStructure &b, EmbeddingMode mode,
                                               const PartialMap &partial = {})
{
    return search_embedding(a, b, mode, partial).embedding;
}

/// Exact number of embeddings (not up to automorphism).
inline std::uint64_t count_embeddings(const RelStructure &a, const RelStructure &b, EmbeddingMode mode)
{
    std::uint64_t n = 0;
    for_each_embedding(a, b, mode, {}, [&](const std::vector<int> &) {
        ++n;
        return true;
    });
    return n;
}

/// All automorphisms of S, as permutations.
inline std::vector<std::vector<int>> automorphisms(const RelStructure &s)
{
    std::vector<std::vector<int>> out;
    for_each_embedding(s, s, EmbeddingMode::Induced, {}, [&](const std::vector<int> &m) {
        out.push_back(m);
        return true;
    });
    return out;
}

} // namespace fraisse
