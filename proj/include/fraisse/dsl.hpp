#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fraisse/forbidden.hpp"
#include "fraisse/witness.hpp"

// Workspace files: signature, structure, family and pattern declarations.
//
//   signature graph { rel E : 2 symmetric }
//   structure K3 over graph { points 3; E: (0,1) (0,2) (1,2) }
//   family henson3 over graph { forbid K3 }
//   pattern edge over graph { carrier P2; left (0); right (1); base () }
//
// `#` starts a comment; `;` separators are optional.
namespace fraisse::dsl {

struct Diagnostic
{
    std::string code;
    int line = 0;
    int column = 0;
    std::string message;

    std::string str() const
    {
        return std::to_string(line) + ":" + std::to_string(column) + ": error[" + code + "]: " + message;
    }
};

struct NamedSignature
{
    std::string name;
    SignaturePtr signature;
};

struct NamedStructure
{
    std::string name;
    std::string signature;
    RelStructure structure;
};

struct NamedFamily
{
    std::string name;
    std::string signature;
    std::vector<std::string> members;
};

struct NamedPattern
{
    std::string name;
    std::string signature;
    std::string carrier;
    std::vector<int> left, right, base;
};

class LookupError : public PreconditionError
{
public:
    using PreconditionError::PreconditionError;
};

struct Workspace
{
    std::vector<NamedSignature> signatures;
    std::vector<NamedStructure> structures;
    std::vector<NamedFamily> families;
    std::vector<NamedPattern> patterns;

    template <class T>
    static const T *lookup(const std::vector<T> &v, std::string_view name)
    {
        auto it = std::find_if(v.begin(), v.end(), [&](const T &x) { return x.name == name; });
        return it == v.end() ? nullptr : &*it;
    }

    const NamedSignature *find_signature(std::string_view n) const { return lookup(signatures, n); }
    const NamedStructure *find_structure(std::string_view n) const { return lookup(structures, n); }
    const NamedFamily *find_family(std::string_view n) const { return lookup(families, n); }
    const NamedPattern *find_pattern(std::string_view n) const { return lookup(patterns, n); }

    const NamedSignature &signature(std::string_view n) const
    {
        if (auto *s = find_signature(n))
            return *s;
        throw LookupError("no signature named '" + std::string(n) + "'");
    }

    const NamedStructure &structure(std::string_view n) const
    {
        if (auto *s = find_structure(n))
            return *s;
        throw LookupError("no structure named '" + std::string(n) + "'");
    }

    /// The family as declared (not minimalized).
    ForbiddenFamily family(std::string_view n) const
    {
        auto *f = find_family(n);
        if (!f)
            throw LookupError("no family named '" + std::string(n) + "'");
        std::vector<RelStructure> members;
        for (const auto &m : f->members)
            members.push_back(structure(m).structure);
        return ForbiddenFamily(signature(f->signature).signature, members);
    }

    PairPattern pattern(std::string_view n) const
    {
        auto *p = find_pattern(n);
        if (!p)
            throw LookupError("no pattern named '" + std::string(n) + "'");
        return {structure(p->carrier).structure, p->left, p->right, p->base};
    }
};

struct ParseResult
{
    std::optional<Workspace> workspace;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return workspace.has_value(); }
};

namespace detail {

enum class Tok { Ident, Int, Punct, End };

struct Token
{
    Tok kind = Tok::End;
    std::string text;
    int line = 1, column = 1;
};

class Lexer
{
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next()
    {
        skip();
        Token t;
        t.line = line_;
        t.column = col_;
        if (pos_ >= src_.size())
            return t;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Tok::Ident;
            while (pos_ < src_.size() && ident_char(src_[pos_]))
                t.text.push_back(get());
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
            t.kind = Tok::Int;
            t.text.push_back(get());
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                t.text.push_back(get());
        } else {
            t.kind = Tok::Punct;
            t.text.push_back(get());
        }
        return t;
    }

private:
    static bool ident_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '\'';
    }

    char get()
    {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip()
    {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    get();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                get();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

struct SyntaxError
{
};

class Parser
{
public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    ParseResult run()
    {
        try {
            while (cur_.kind != Tok::End)
                declaration();
        } catch (const SyntaxError &) {
        }
        ParseResult r;
        r.diagnostics = std::move(diags_);
        if (r.diagnostics.empty())
            r.workspace = std::move(ws_);
        return r;
    }

private:
    void advance() { cur_ = lex_.next(); }

    void error(const Token &at, const std::string &code, const std::string &msg)
    {
        diags_.push_back({code, at.line, at.column, msg});
    }

    [[noreturn]] void syntax(const std::string &msg)
    {
        error(cur_, "syntax", msg + (cur_.kind == Tok::End ? " at end of input" : ", found '" + cur_.text + "'"));
        throw SyntaxError{};
    }

    bool is(std::string_view text) const { return cur_.kind != Tok::End && cur_.text == text; }

    void expect(std::string_view text)
    {
        if (!is(text))
            syntax("expected '" + std::string(text) + "'");
        advance();
    }

    void optional_semicolon()
    {
        if (is(";"))
            advance();
    }

    Token ident(const char *what)
    {
        if (cur_.kind != Tok::Ident)
            syntax(std::string("expected ") + what);
        Token t = cur_;
        advance();
        return t;
    }

    std::pair<Token, long long> integer(const char *what)
    {
        if (cur_.kind != Tok::Int || cur_.text == "-")
            syntax(std::string("expected ") + what);
        Token t = cur_;
        advance();
        long long v = 0;
        try {
            v = std::stoll(t.text);
        } catch (const std::exception &) {
            error(t, "out-of-range", "integer '" + t.text + "' is too large");
        }
        return {t, v};
    }

    // ( i, j, ... ) or ()
    std::pair<Token, std::vector<long long>> tuple()
    {
        Token open = cur_;
        expect("(");
        std::vector<long long> v;
        if (!is(")")) {
            v.push_back(integer("point index").second);
            while (is(",")) {
                advance();
                v.push_back(integer("point index").second);
            }
        }
        expect(")");
        return {open, v};
    }

    bool duplicate(const Token &name, bool exists, const char *kind)
    {
        if (exists)
            error(name, "duplicate-name", std::string("duplicate ") + kind + " '" + name.text + "'");
        return exists;
    }

    const NamedSignature *signature_ref(const Token &t)
    {
        auto *s = ws_.find_signature(t.text);
        if (!s)
            error(t, "unresolved-name", "unknown signature '" + t.text + "'");
        return s;
    }

    void declaration()
    {
        if (is("signature"))
            signature_decl();
        else if (is("structure"))
            structure_decl();
        else if (is("family"))
            family_decl();
        else if (is("pattern"))
            pattern_decl();
        else
            syntax("expected 'signature', 'structure', 'family' or 'pattern'");
    }

    void signature_decl()
    {
        Token kw = cur_;
        advance();
        Token name = ident("signature name");
        expect("{");
        std::vector<Symbol> syms;
        while (!is("}")) {
            expect("rel");
            Token sym = ident("relation name");
            expect(":");
            auto [at, arity] = integer("arity");
            bool symmetric = false;
            if (is("symmetric")) {
                symmetric = true;
                advance();
            }
            optional_semicolon();
            if (arity < 1) {
                error(at, "arity-mismatch", "arity of '" + sym.text + "' must be at least 1");
                continue;
            }
            if (std::any_of(syms.begin(), syms.end(), [&](const Symbol &s) { return s.name == sym.text; })) {
                error(sym, "duplicate-name", "duplicate relation '" + sym.text + "'");
                continue;
            }
            syms.push_back({sym.text, static_cast<int>(arity), symmetric});
        }
        expect("}");
        if (syms.empty()) {
            error(kw, "empty-signature", "signature '" + name.text + "' has no relations");
            return;
        }
        if (!duplicate(name, ws_.find_signature(name.text) != nullptr, "signature"))
            ws_.signatures.push_back({name.text, make_signature(std::move(syms))});
    }

    void structure_decl()
    {
        advance();
        Token name = ident("structure name");
        expect("over");
        Token sig_tok = ident("signature name");
        const auto *sig = signature_ref(sig_tok);
        expect("{");
        expect("points");
        auto [pt, points] = integer("point count");
        optional_semicolon();
        bool ok = sig != nullptr;
        if (points < 0 || points > 1'000'000) {
            error(pt, "out-of-range", "point count must be between 0 and 1000000");
            ok = false;
        }
        std::vector<std::vector<Tuple>> lists(sig ? sig->signature->size() : 0);
        while (!is("}")) {
            Token sym = ident("relation name");
            expect(":");
            std::optional<std::size_t> idx;
            if (sig) {
                idx = sig->signature->find(sym.text);
                if (!idx) {
                    error(sym, "unresolved-name", "signature '" + sig->name + "' has no relation '" + sym.text + "'");
                    ok = false;
                }
            }
            while (is("(")) {
                auto [at, t] = tuple();
                if (!idx)
                    continue;
                const auto &s = (*sig->signature)[*idx];
                if (static_cast<int>(t.size()) != s.arity) {
                    error(at, "arity-mismatch",
                          "relation '" + s.name + "' has arity " + std::to_string(s.arity) + " but the tuple has " +
                              std::to_string(t.size()) + " coordinate(s)");
                    ok = false;
                    continue;
                }
                bool good = true;
                for (auto v : t)
                    if (v < 0 || v >= points) {
                        error(at, "out-of-range",
                              "point " + std::to_string(v) + " outside 0.." + std::to_string(points - 1));
                        good = false;
                        break;
                    }
                auto sorted = t;
                std::sort(sorted.begin(), sorted.end());
                if (good && std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
                    error(at, "repeated-coordinate",
                          "repeated coordinate violates irreflexivity in relation '" + s.name + "'");
                    good = false;
                }
                if (!good) {
                    ok = false;
                    continue;
                }
                lists[*idx].emplace_back(t.begin(), t.end());
            }
            optional_semicolon();
        }
        expect("}");
        if (!ok || duplicate(name, ws_.find_structure(name.text) != nullptr, "structure"))
            return;
        ws_.structures.push_back(
            {name.text, sig->name, RelStructure(sig->signature, static_cast<int>(points), lists)});
    }

    void family_decl()
    {
        advance();
        Token name = ident("family name");
        expect("over");
        Token sig_tok = ident("signature name");
        const auto *sig = signature_ref(sig_tok);
        expect("{");
        NamedFamily fam{name.text, sig_tok.text, {}};
        bool ok = sig != nullptr;
        while (!is("}")) {
            expect("forbid");
            if (cur_.kind != Tok::Ident)
                syntax("expected structure name");
            while (cur_.kind == Tok::Ident && !is("forbid")) {
                Token m = ident("structure name");
                auto *s = ws_.find_structure(m.text);
                if (!s) {
                    error(m, "unresolved-name", "unknown structure '" + m.text + "'");
                    ok = false;
                } else if (sig && s->signature != sig->name) {
                    error(m, "signature-mismatch",
                          "structure '" + m.text + "' is over '" + s->signature + "', not '" + sig->name + "'");
                    ok = false;
                } else if (s->structure.size() == 0) {
                    error(m, "out-of-range", "forbidden structure '" + m.text + "' is empty");
                    ok = false;
                } else {
                    fam.members.push_back(m.text);
                }
            }
            optional_semicolon();
        }
        expect("}");
        if (ok && !duplicate(name, ws_.find_family(name.text) != nullptr, "family"))
            ws_.families.push_back(std::move(fam));
    }

    void pattern_decl()
    {
        Token kw = cur_;
        advance();
        Token name = ident("pattern name");
        expect("over");
        Token sig_tok = ident("signature name");
        const auto *sig = signature_ref(sig_tok);
        expect("{");
        NamedPattern pat{name.text, sig_tok.text, {}, {}, {}, {}};
        const NamedStructure *carrier = nullptr;
        bool ok = sig != nullptr, seen_left = false, seen_right = false;
        std::vector<std::pair<Token, std::vector<long long>>> lists;
        while (!is("}")) {
            if (is("carrier")) {
                advance();
                Token c = ident("structure name");
                carrier = ws_.find_structure(c.text);
                if (!carrier) {
                    error(c, "unresolved-name", "unknown structure '" + c.text + "'");
                    ok = false;
                } else if (sig && carrier->signature != sig->name) {
                    error(c, "signature-mismatch", "carrier '" + c.text + "' is over '" + carrier->signature + "'");
                    ok = false;
                }
                pat.carrier = c.text;
            } else if (is("left") || is("right") || is("base")) {
                std::string which = cur_.text;
                advance();
                auto tup = tuple();
                std::vector<int> pts(tup.second.begin(), tup.second.end());
                (which == "left" ? pat.left : which == "right" ? pat.right : pat.base) = pts;
                seen_left = seen_left || which == "left";
                seen_right = seen_right || which == "right";
                lists.push_back(std::move(tup));
            } else {
                syntax("expected 'carrier', 'left', 'right' or 'base'");
            }
            optional_semicolon();
        }
        expect("}");
        if (pat.carrier.empty() || !seen_left || !seen_right) {
            error(kw, "invalid-pattern", "pattern '" + name.text + "' needs carrier, left and right");
            return;
        }
        if (!ok)
            return;
        for (const auto &[at, v] : lists)
            for (auto p : v)
                if (p < 0 || p >= carrier->structure.size()) {
                    error(at, "out-of-range", "point " + std::to_string(p) + " outside the carrier");
                    ok = false;
                }
        if (ok) {
            try {
                validate_pattern({carrier->structure, pat.left, pat.right, pat.base});
            } catch (const PreconditionError &e) {
                error(kw, "invalid-pattern", e.what());
                ok = false;
            }
        }
        if (ok && !duplicate(name, ws_.find_pattern(name.text) != nullptr, "pattern"))
            ws_.patterns.push_back(std::move(pat));
    }

    Lexer lex_;
    Token cur_;
    Workspace ws_;
    std::vector<Diagnostic> diags_;
};

inline void print_tuple(std::ostream &os, const std::vector<int> &t)
{
    os << '(';
    for (std::size_t i = 0; i < t.size(); ++i)
        os << (i ? "," : "") << t[i];
    os << ')';
}

} // namespace detail

inline ParseResult parse_workspace(std::string_view text) { return detail::Parser(text).run(); }

inline std::string print_signature(const std::string &name, const Signature &sig)
{
    std::ostringstream os;
    os << "signature " << name << " {\n";
    for (const auto &s : sig.symbols())
        os << "  rel " << s.name << " : " << s.arity << (s.symmetric ? " symmetric" : "") << "\n";
    os << "}\n";
    return os.str();
}

inline std::string print_structure(const std::string &name, const std::string &sig_name, const RelStructure &s)
{
    std::ostringstream os;
    os << "structure " << name << " over " << sig_name << " {\n  points " << s.size() << "\n";
    for (std::size_t sym = 0; sym < s.symbol_count(); ++sym) {
        if (s.instance_count(sym) == 0)
            continue;
        os << "  " << s.signature()[sym].name << ":";
        for (std::size_t i = 0; i < s.instance_count(sym); ++i) {
            auto t = s.instance(sym, i);
            os << ' ';
            detail::print_tuple(os, std::vector<int>(t.begin(), t.end()));
        }
        os << "\n";
    }
    os << "}\n";
    return os.str();
}

inline std::string print_family(const NamedFamily &f)
{
    std::ostringstream os;
    os << "family " << f.name << " over " << f.signature << " {\n";
    for (const auto &m : f.members)
        os << "  forbid " << m << "\n";
    os << "}\n";
    return os.str();
}

inline std::string print_pattern(const NamedPattern &p)
{
    std::ostringstream os;
    os << "pattern " << p.name << " over " << p.signature << " {\n  carrier " << p.carrier << "\n  left ";
    detail::print_tuple(os, p.left);
    os << "\n  right ";
    detail::print_tuple(os, p.right);
    os << "\n  base ";
    detail::print_tuple(os, p.base);
    os << "\n}\n";
    return os.str();
}

inline std::string print_workspace(const Workspace &ws)
{
    std::string out;
    for (const auto &s : ws.signatures)
        out += print_signature(s.name, *s.signature) + "\n";
    for (const auto &s : ws.structures)
        out += print_structure(s.name, s.signature, s.structure) + "\n";
    for (const auto &f : ws.families)
        out += print_family(f) + "\n";
    for (const auto &p : ws.patterns)
        out += print_pattern(p) + "\n";
    return out;
}

} // namespace fraisse::dsl
