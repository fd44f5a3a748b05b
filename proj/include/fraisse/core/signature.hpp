#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fraisse/errors.hpp"

namespace fraisse {

struct Symbol
{
    std::string name;
    int arity = 1;
    bool symmetric = false;

    bool operator==(const Symbol &) const = default;
};

/// A finite relational language. Symbol order is significant: structures
/// address relations by symbol index.
class Signature
{
public:
    explicit Signature(std::vector<Symbol> symbols) : symbols_(std::move(symbols))
    {
        if (symbols_.empty())
            throw PreconditionError("signature must declare at least one relation symbol");
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (symbols_[i].arity < 1)
                throw PreconditionError("relation '" + symbols_[i].name + "' has arity < 1");
            for (std::size_t j = 0; j < i; ++j)
                if (symbols_[j].name == symbols_[i].name)
                    throw PreconditionError("duplicate relation symbol '" + symbols_[i].name + "'");
        }
    }

    std::size_t size() const { return symbols_.size(); }
    const Symbol &operator[](std::size_t i) const { return symbols_[i]; }
    const std::vector<Symbol> &symbols() const { return symbols_; }

    std::optional<std::size_t> find(std::string_view name) const
    {
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i].name == name)
                return i;
        return std::nullopt;
    }

    int max_arity() const
    {
        int m = 0;
        for (const auto &s : symbols_)
            m = std::max(m, s.arity);
        return m;
    }

    bool operator==(const Signature &) const = default;

private:
    std::vector<Symbol> symbols_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

inline SignaturePtr make_signature(std::vector<Symbol> symbols)
{
    return std::make_shared<const Signature>(std::move(symbols));
}

inline bool same_signature(const SignaturePtr &a, const SignaturePtr &b)
{
    return a == b || (a && b && *a == *b);
}

} // namespace fraisse
