#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace fraisse {

/// A set of universe elements, stored as a bitset. Universes are always the
/// contiguous range 0..n-1 so subsets of them fit this representation.
class PointSet
{
public:
    PointSet() = default;
    PointSet(std::initializer_list<int> points)
    {
        for (int p : points)
            insert(p);
    }
    explicit PointSet(const std::vector<int> &points)
    {
        for (int p : points)
            insert(p);
    }

    static PointSet from_mask(std::uint64_t mask)
    {
        PointSet s;
        if (mask)
            s.words_.push_back(mask);
        return s;
    }

    static PointSet range(int n)
    {
        PointSet s;
        for (int i = 0; i < n; ++i)
            s.insert(i);
        return s;
    }

    void insert(int p)
    {
        auto w = static_cast<std::size_t>(p) / 64;
        if (words_.size() <= w)
            words_.resize(w + 1, 0);
        words_[w] |= std::uint64_t{1} << (p % 64);
    }

    void erase(int p)
    {
        auto w = static_cast<std::size_t>(p) / 64;
        if (w < words_.size()) {
            words_[w] &= ~(std::uint64_t{1} << (p % 64));
            trim();
        }
    }

    bool contains(int p) const
    {
        if (p < 0)
            return false;
        auto w = static_cast<std::size_t>(p) / 64;
        return w < words_.size() && ((words_[w] >> (p % 64)) & 1U);
    }

    std::size_t count() const
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool empty() const { return words_.empty(); }

    /// Largest element plus one, or 0 when empty.
    int bound() const
    {
        if (words_.empty())
            return 0;
        return static_cast<int>((words_.size() - 1) * 64 + 64 - std::countl_zero(words_.back()));
    }

    std::vector<int> members() const
    {
        std::vector<int> out;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            auto bits = words_[w];
            while (bits) {
                int b = std::countr_zero(bits);
                out.push_back(static_cast<int>(w * 64) + b);
                bits &= bits - 1;
            }
        }
        return out;
    }

    /// Low 64 bits; callers check bound() <= 64 first.
    std::uint64_t mask() const { return words_.empty() ? 0 : words_[0]; }

    bool subset_of(const PointSet &o) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w] & ~(w < o.words_.size() ? o.words_[w] : 0))
                return false;
        return true;
    }

    PointSet operator|(const PointSet &o) const
    {
        PointSet r = *this;
        if (r.words_.size() < o.words_.size())
            r.words_.resize(o.words_.size(), 0);
        for (std::size_t w = 0; w < o.words_.size(); ++w)
            r.words_[w] |= o.words_[w];
        return r;
    }

    PointSet operator&(const PointSet &o) const
    {
        PointSet r;
        r.words_.resize(std::min(words_.size(), o.words_.size()), 0);
        for (std::size_t w = 0; w < r.words_.size(); ++w)
            r.words_[w] = words_[w] & o.words_[w];
        r.trim();
        return r;
    }

    PointSet operator-(const PointSet &o) const
    {
        PointSet r = *this;
        for (std::size_t w = 0; w < r.words_.size() && w < o.words_.size(); ++w)
            r.words_[w] &= ~o.words_[w];
        r.trim();
        return r;
    }

    bool operator==(const PointSet &) const = default;

private:
    void trim()
    {
        while (!words_.empty() && words_.back() == 0)
            words_.pop_back();
    }

    std::vector<std::uint64_t> words_;
};

} // namespace fraisse
