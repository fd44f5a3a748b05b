#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fraisse/core/point_set.hpp"
#include "fraisse/core/signature.hpp"
#include "fraisse/errors.hpp"

namespace fraisse {

using Tuple = std::vector<int>;

/// One occurrence of a point inside a relation instance.
struct Incidence
{
    std::uint32_t symbol;
    std::uint32_t index;
};

/// A finite relational structure over the universe 0..size-1.
///
/// Relations are irreflexive: a tuple never repeats a coordinate. Symbols
/// flagged symmetric keep one sorted representative per orbit; membership
/// queries normalize their argument first. Instances of each symbol are kept
/// sorted, so two structures with the same instance sets compare equal.
class RelStructure
{
public:
    RelStructure(SignaturePtr sig, int size, const std::vector<std::vector<Tuple>> &instances)
        : sig_(std::move(sig)), size_(size)
    {
        if (!sig_)
            throw PreconditionError("structure without signature");
        if (size_ < 0)
            throw PreconditionError("negative universe size");
        if (instances.size() > sig_->size())
            throw PreconditionError("more instance lists than relation symbols");
        flat_.resize(sig_->size());
        keys_.resize(sig_->size());
        for (std::size_t s = 0; s < instances.size(); ++s) {
            std::vector<Tuple> norm;
            norm.reserve(instances[s].size());
            for (const auto &t : instances[s]) {
                validate(s, t);
                norm.push_back(normalized(s, t));
            }
            std::sort(norm.begin(), norm.end());
            norm.erase(std::unique(norm.begin(), norm.end()), norm.end());
            for (const auto &t : norm)
                flat_[s].insert(flat_[s].end(), t.begin(), t.end());
        }
        index();
    }

    static RelStructure empty(SignaturePtr sig, int size = 0) { return RelStructure(std::move(sig), size, {}); }

    const Signature &signature() const { return *sig_; }
    const SignaturePtr &signature_ptr() const { return sig_; }
    int size() const { return size_; }
    std::size_t symbol_count() const { return sig_->size(); }
    int arity(std::size_t sym) const { return (*sig_)[sym].arity; }
    bool symmetric(std::size_t sym) const { return (*sig_)[sym].symmetric; }

    std::size_t instance_count(std::size_t sym) const { return flat_[sym].size() / static_cast<std::size_t>(arity(sym)); }

    std::size_t total_instances() const
    {
        std::size_t n = 0;
        for (std::size_t s = 0; s < symbol_count(); ++s)
            n += instance_count(s);
        return n;
    }

    std::span<const int> instance(std::size_t sym, std::size_t i) const
    {
        auto a = static_cast<std::size_t>(arity(sym));
        return {flat_[sym].data() + i * a, a};
    }

    const std::vector<Incidence> &incident(int point) const { return incidence_[static_cast<std::size_t>(point)]; }

    /// Whether R_sym(tuple) holds. Tuples with repeated or out-of-range
    /// coordinates, or of the wrong length, never hold.
    bool holds(std::size_t sym, std::span<const int> tuple) const
    {
        if (tuple.size() != static_cast<std::size_t>(arity(sym)))
            return false;
        for (std::size_t i = 0; i < tuple.size(); ++i) {
            if (tuple[i] < 0 || tuple[i] >= size_)
                return false;
            for (std::size_t j = 0; j < i; ++j)
                if (tuple[i] == tuple[j])
                    return false;
        }
        return std::binary_search(keys_[sym].begin(), keys_[sym].end(), key(sym, tuple));
    }

    bool holds(std::size_t sym, std::initializer_list<int> tuple) const
    {
        return holds(sym, std::span<const int>(tuple.begin(), tuple.size()));
    }

    std::vector<std::vector<Tuple>> instance_lists() const
    {
        std::vector<std::vector<Tuple>> out(symbol_count());
        for (std::size_t s = 0; s < symbol_count(); ++s)
            for (std::size_t i = 0; i < instance_count(s); ++i) {
                auto t = instance(s, i);
                out[s].emplace_back(t.begin(), t.end());
            }
        return out;
    }

    /// Canonical stored form of a tuple (sorted for symmetric symbols).
    Tuple normalized(std::size_t sym, Tuple t) const
    {
        if (symmetric(sym))
            std::sort(t.begin(), t.end());
        return t;
    }

    bool operator==(const RelStructure &o) const
    {
        return size_ == o.size_ && same_signature(sig_, o.sig_) && flat_ == o.flat_;
    }

private:
    void validate(std::size_t sym, const Tuple &t) const
    {
        const auto &s = (*sig_)[sym];
        if (t.size() != static_cast<std::size_t>(s.arity))
            throw PreconditionError("tuple of length " + std::to_string(t.size()) + " for relation '" + s.name +
                                    "' of arity " + std::to_string(s.arity));
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < 0 || t[i] >= size_)
                throw PreconditionError("point " + std::to_string(t[i]) + " outside universe of size " +
                                        std::to_string(size_));
            for (std::size_t j = 0; j < i; ++j)
                if (t[i] == t[j])
                    throw PreconditionError("repeated coordinate violates irreflexivity in relation '" + s.name + "'");
        }
    }

    std::uint64_t key(std::size_t sym, std::span<const int> t) const
    {
        // Symmetric lookups sort a small local copy first.
        int buf[16];
        std::span<const int> use = t;
        std::vector<int> big;
        if (symmetric(sym)) {
            if (t.size() <= 16) {
                std::copy(t.begin(), t.end(), buf);
                std::sort(buf, buf + t.size());
                use = {buf, t.size()};
            } else {
                big.assign(t.begin(), t.end());
                std::sort(big.begin(), big.end());
                use = big;
            }
        }
        std::uint64_t k = 0;
        for (int c : use)
            k = k * static_cast<std::uint64_t>(size_) + static_cast<std::uint64_t>(c);
        return k;
    }

    void index()
    {
        incidence_.assign(static_cast<std::size_t>(size_), {});
        for (std::size_t s = 0; s < symbol_count(); ++s) {
            double bits = arity(s) * std::log2(std::max(2, size_));
            if (bits > 63)
                throw RefusalError("universe of size " + std::to_string(size_) + " too large for arity " +
                                   std::to_string(arity(s)));
            keys_[s].clear();
            for (std::size_t i = 0; i < instance_count(s); ++i) {
                auto t = instance(s, i);
                keys_[s].push_back(key(s, t));
                for (int p : t)
                    incidence_[static_cast<std::size_t>(p)].push_back(
                        {static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(i)});
            }
            std::sort(keys_[s].begin(), keys_[s].end());
        }
    }

    SignaturePtr sig_;
    int size_ = 0;
    std::vector<std::vector<int>> flat_;
    std::vector<std::vector<std::uint64_t>> keys_;
    std::vector<std::vector<Incidence>> incidence_;
};

/// Accumulates instances, then builds an immutable RelStructure.
class StructureBuilder
{
public:
    StructureBuilder(SignaturePtr sig, int size) : sig_(std::move(sig)), size_(size), lists_(sig_->size()) {}

    StructureBuilder &add(std::size_t sym, Tuple t)
    {
        lists_.at(sym).push_back(std::move(t));
        return *this;
    }

    StructureBuilder &add(std::string_view name, Tuple t)
    {
        auto s = sig_->find(name);
        if (!s)
            throw PreconditionError("unknown relation symbol '" + std::string(name) + "'");
        return add(*s, std::move(t));
    }

    StructureBuilder &add_all(const RelStructure &s, std::span<const int> point_map)
    {
        for (std::size_t sym = 0; sym < s.symbol_count(); ++sym)
            for (std::size_t i = 0; i < s.instance_count(sym); ++i) {
                Tuple t;
                for (int p : s.instance(sym, i))
                    t.push_back(point_map[static_cast<std::size_t>(p)]);
                add(sym, std::move(t));
            }
        return *this;
    }

    int size() const { return size_; }
    int add_point() { return size_++; }
    RelStructure build() const { return RelStructure(sig_, size_, lists_); }

private:
    SignaturePtr sig_;
    int size_;
    std::vector<std::vector<Tuple>> lists_;
};

/// Induced substructure together with the map back into the parent.
struct Restriction
{
    RelStructure structure;
    std::vector<int> to_parent;
};

/// Restricts S to `subset`, re-indexing it 0..k-1 in increasing order.
inline Restriction induced_substructure(const RelStructure &s, const PointSet &subset)
{
    if (subset.bound() > s.size())
        throw PreconditionError("subset element outside universe of size " + std::to_string(s.size()));
    auto members = subset.members();
    std::vector<int> local(static_cast<std::size_t>(s.size()), -1);
    for (std::size_t i = 0; i < members.size(); ++i)
        local[static_cast<std::size_t>(members[i])] = static_cast<int>(i);
    std::vector<std::vector<Tuple>> lists(s.symbol_count());
    for (std::size_t sym = 0; sym < s.symbol_count(); ++sym)
        for (std::size_t i = 0; i < s.instance_count(sym); ++i) {
            Tuple t;
            bool inside = true;
            for (int p : s.instance(sym, i)) {
                int q = local[static_cast<std::size_t>(p)];
                if (q < 0) {
                    inside = false;
                    break;
                }
                t.push_back(q);
            }
            if (inside)
                lists[sym].push_back(std::move(t));
        }
    return {RelStructure(s.signature_ptr(), static_cast<int>(members.size()), lists), std::move(members)};
}

inline Restriction induced_substructure(const RelStructure &s, const std::vector<int> &subset)
{
    for (int p : subset)
        if (p < 0 || p >= s.size())
            throw PreconditionError("subset element " + std::to_string(p) + " outside universe of size " +
                                    std::to_string(s.size()));
    return induced_substructure(s, PointSet(subset));
}

/// Induced structure on the listed points, with point i standing for
/// points[i] (the listed order, not increasing order).
inline RelStructure induced_on_sequence(const RelStructure &s, const std::vector<int> &points)
{
    std::vector<int> local(static_cast<std::size_t>(s.size()), -1);
    for (std::size_t i = 0; i < points.size(); ++i) {
        int p = points[i];
        if (p < 0 || p >= s.size())
            throw PreconditionError("point " + std::to_string(p) + " outside the universe");
        if (local[static_cast<std::size_t>(p)] >= 0)
            throw PreconditionError("point listed twice");
        local[static_cast<std::size_t>(p)] = static_cast<int>(i);
    }
    StructureBuilder b(s.signature_ptr(), static_cast<int>(points.size()));
    for (std::size_t sym = 0; sym < s.symbol_count(); ++sym)
        for (std::size_t i = 0; i < s.instance_count(sym); ++i) {
            Tuple t;
            for (int p : s.instance(sym, i)) {
                if (local[static_cast<std::size_t>(p)] < 0)
                    break;
                t.push_back(local[static_cast<std::size_t>(p)]);
            }
            if (t.size() == static_cast<std::size_t>(s.arity(sym)))
                b.add(sym, std::move(t));
        }
    return b.build();
}

/// The image of S under a permutation of its universe (perm[old] = new).
inline RelStructure permuted(const RelStructure &s, std::span<const int> perm)
{
    StructureBuilder b(s.signature_ptr(), s.size());
    b.add_all(s, perm);
    return b.build();
}

} // namespace fraisse
