#pragma once

// Parsing, structural linting and evaluation for the emitted constraint-model
// text. This deliberately re-parses the emitted bytes (rather than sharing
// the emitter's structures) so replay checks exercise the actual artifact.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tricons/catalog.hpp"
#include "tricons/planner.hpp"

namespace tricons::mzn {

struct MznError : std::runtime_error {
    explicit MznError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Lexer.

enum class Tok {
    Ident, Int, LParen, RParen, LBracket, RBracket, LBrace, RBrace,
    Comma, Semi, Colon, Eq, Ne, Le, Ge, Lt, Gt, Plus, Minus, Star,
    DotDot, And, Or, Imply, Iff, End,
};

struct Token {
    Tok type;
    std::string text;
    long long value = 0;
    int line = 1, col = 1;
};

inline std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Tok t, std::string s, long long v = 0) {
        out.push_back(Token{t, std::move(s), v, line, col});
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') { ++line; col = 1; ++i; continue; }
        if (c == ' ' || c == '\t' || c == '\r') { ++col; ++i; continue; }
        if (c == '%') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        auto two = i + 1 < text.size() ? text.substr(i, 2) : std::string();
        auto three = i + 2 < text.size() ? text.substr(i, 3) : std::string();
        if (three == "<->") { push(Tok::Iff, three); i += 3; col += 3; continue; }
        if (two == "/\\") { push(Tok::And, two); i += 2; col += 2; continue; }
        if (two == "\\/") { push(Tok::Or, two); i += 2; col += 2; continue; }
        if (two == "->") { push(Tok::Imply, two); i += 2; col += 2; continue; }
        if (two == "..") { push(Tok::DotDot, two); i += 2; col += 2; continue; }
        if (two == "!=") { push(Tok::Ne, two); i += 2; col += 2; continue; }
        if (two == "<=") { push(Tok::Le, two); i += 2; col += 2; continue; }
        if (two == ">=") { push(Tok::Ge, two); i += 2; col += 2; continue; }
        if (two == "==") { push(Tok::Eq, two); i += 2; col += 2; continue; }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            push(Tok::Ident, text.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            push(Tok::Int, text.substr(i, j - i), std::stoll(text.substr(i, j - i)));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        Tok t;
        switch (c) {
            case '(': t = Tok::LParen; break;
            case ')': t = Tok::RParen; break;
            case '[': t = Tok::LBracket; break;
            case ']': t = Tok::RBracket; break;
            case '{': t = Tok::LBrace; break;
            case '}': t = Tok::RBrace; break;
            case ',': t = Tok::Comma; break;
            case ';': t = Tok::Semi; break;
            case ':': t = Tok::Colon; break;
            case '=': t = Tok::Eq; break;
            case '<': t = Tok::Lt; break;
            case '>': t = Tok::Gt; break;
            case '+': t = Tok::Plus; break;
            case '-': t = Tok::Minus; break;
            case '*': t = Tok::Star; break;
            default:
                throw MznError("unexpected character '" + std::string(1, c) + "' at line " +
                               std::to_string(line) + ", column " + std::to_string(col));
        }
        push(t, std::string(1, c));
        ++i;
        ++col;
    }
    push(Tok::End, "");
    return out;
}

// ---------------------------------------------------------------------------
// AST.

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    enum class K { Int, Ident, Set, Binary, Not, Neg, Access, Call, Quant } k;
    long long ival = 0;
    std::string name;   // Ident / Binary op / Call or Quant head
    std::string var;    // Quant loop variable
    std::vector<ExprPtr> args;
    int line = 1, col = 1;
};

struct Decl {
    enum class K { EnumDef, EnumDecl, Param, Var, Constraint, Solve } k;
    std::string name;                 // declared identifier (when any)
    std::vector<std::string> members; // enum members
    std::string index_enum;           // 1-D array over an enum, when used
    std::vector<ExprPtr> indexes;     // array index range expressions
    ExprPtr value;                    // definition / constraint body
    bool is_array = false;
    bool is_var = false;
};

struct ParsedModel {
    std::vector<Decl> items;
};

struct ParsedData {
    std::vector<std::pair<std::string, ExprPtr>> assignments;
};

namespace detail {

struct Parser {
    const std::vector<Token>& toks;
    size_t at = 0;

    const Token& peek(int ahead = 0) const {
        size_t i = at + static_cast<size_t>(ahead);
        return i < toks.size() ? toks[i] : toks.back();
    }
    const Token& get() { return toks[std::min(at++, toks.size() - 1)]; }
    bool accept(Tok t) {
        if (peek().type == t) { ++at; return true; }
        return false;
    }
    bool accept_kw(const char* kw) {
        if (peek().type == Tok::Ident && peek().text == kw) { ++at; return true; }
        return false;
    }
    void expect(Tok t, const char* what) {
        if (!accept(t)) fail(std::string("expected ") + what);
    }
    void expect_kw(const char* kw) {
        if (!accept_kw(kw)) fail(std::string("expected keyword ") + kw);
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        throw MznError(msg + " near '" + t.text + "' at line " + std::to_string(t.line) +
                       ", column " + std::to_string(t.col));
    }

    ExprPtr make(Expr::K k) {
        auto e = std::make_unique<Expr>();
        e->k = k;
        e->line = peek().line;
        e->col = peek().col;
        return e;
    }

    // Precedence climbing. Level 0 is the loosest.
    ExprPtr expr(int level = 0) {
        switch (level) {
            case 0: return binary_r(level, {"<->"});
            case 1: return binary_r(level, {"->"});
            case 2: return binary_l(level, {"\\/", "xor"});
            case 3: return binary_l(level, {"/\\"});
            case 4: return comparison(level);
            case 5: return binary_l(level, {".."});
            case 6: return binary_l(level, {"union", "diff", "symdiff"});
            case 7: return binary_l(level, {"intersect"});
            case 8: return binary_l(level, {"+", "-"});
            case 9: return binary_l(level, {"*", "div", "mod"});
            default: return unary();
        }
    }

    bool match_op(const std::vector<const char*>& ops, std::string& out) {
        const Token& t = peek();
        std::string text = t.text;
        if (t.type != Tok::Ident && t.type != Tok::And && t.type != Tok::Or &&
            t.type != Tok::Imply && t.type != Tok::Iff && t.type != Tok::DotDot &&
            t.type != Tok::Plus && t.type != Tok::Minus && t.type != Tok::Star)
            return false;
        for (const char* op : ops) {
            if (text == op) {
                out = text;
                ++at;
                return true;
            }
        }
        return false;
    }

    ExprPtr binary_l(int level, std::vector<const char*> ops) {
        ExprPtr lhs = expr(level + 1);
        std::string op;
        while (match_op(ops, op)) {
            auto e = make(Expr::K::Binary);
            e->name = op;
            e->args.push_back(std::move(lhs));
            e->args.push_back(expr(level + 1));
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr binary_r(int level, std::vector<const char*> ops) {
        ExprPtr lhs = expr(level + 1);
        std::string op;
        if (match_op(ops, op)) {
            auto e = make(Expr::K::Binary);
            e->name = op;
            e->args.push_back(std::move(lhs));
            e->args.push_back(expr(level)); // right associative
            return e;
        }
        return lhs;
    }

    ExprPtr comparison(int level) {
        ExprPtr lhs = expr(level + 1);
        std::string op;
        const Token& t = peek();
        switch (t.type) {
            case Tok::Eq: op = "="; break;
            case Tok::Ne: op = "!="; break;
            case Tok::Le: op = "<="; break;
            case Tok::Ge: op = ">="; break;
            case Tok::Lt: op = "<"; break;
            case Tok::Gt: op = ">"; break;
            case Tok::Ident:
                if (t.text == "in" || t.text == "subset" || t.text == "superset") op = t.text;
                break;
            default: break;
        }
        if (op.empty()) return lhs;
        ++at;
        auto e = make(Expr::K::Binary);
        e->name = op;
        e->args.push_back(std::move(lhs));
        e->args.push_back(expr(level + 1));
        return e;
    }

    ExprPtr unary() {
        if (accept_kw("not")) {
            auto e = make(Expr::K::Not);
            e->args.push_back(unary());
            return e;
        }
        if (accept(Tok::Minus)) {
            auto e = make(Expr::K::Neg);
            e->args.push_back(unary());
            return e;
        }
        return atom();
    }

    ExprPtr atom() {
        const Token& t = peek();
        if (t.type == Tok::Int) {
            auto e = make(Expr::K::Int);
            e->ival = get().value;
            return e;
        }
        if (t.type == Tok::LParen) {
            get();
            ExprPtr e = expr();
            expect(Tok::RParen, ")");
            return e;
        }
        if (t.type == Tok::LBrace) {
            get();
            auto e = make(Expr::K::Set);
            if (!accept(Tok::RBrace)) {
                do {
                    e->args.push_back(expr());
                } while (accept(Tok::Comma));
                expect(Tok::RBrace, "}");
            }
            return e;
        }
        if (t.type == Tok::LBracket) {
            get();
            auto e = make(Expr::K::Call);
            e->name = "[]"; // array literal
            if (!accept(Tok::RBracket)) {
                do {
                    e->args.push_back(expr());
                } while (accept(Tok::Comma));
                expect(Tok::RBracket, "]");
            }
            return e;
        }
        if (t.type == Tok::Ident) {
            std::string name = get().text;
            if ((name == "forall" || name == "exists") && peek().type == Tok::LParen) {
                auto e = make(Expr::K::Quant);
                e->name = name;
                get(); // (
                if (peek().type != Tok::Ident) fail("expected generator variable");
                e->var = get().text;
                expect_kw("in");
                e->args.push_back(expr(5)); // the range a..b
                expect(Tok::RParen, ")");
                expect(Tok::LParen, "(");
                e->args.push_back(expr());
                expect(Tok::RParen, ")");
                return e;
            }
            if (peek().type == Tok::LParen) {
                auto e = make(Expr::K::Call);
                e->name = name;
                get();
                if (!accept(Tok::RParen)) {
                    do {
                        e->args.push_back(expr());
                    } while (accept(Tok::Comma));
                    expect(Tok::RParen, ")");
                }
                return e;
            }
            if (peek().type == Tok::LBracket) {
                auto e = make(Expr::K::Access);
                e->name = name;
                get();
                do {
                    e->args.push_back(expr());
                } while (accept(Tok::Comma));
                expect(Tok::RBracket, "]");
                return e;
            }
            auto e = make(Expr::K::Ident);
            e->name = name;
            return e;
        }
        fail("expected expression");
    }

    // ----- items -----

    void skip_type() {
        // var? (set of)? (int | IDENT | range)
        accept_kw("var");
        if (accept_kw("set")) expect_kw("of");
        if (accept_kw("int")) return;
        ExprPtr t = expr(5); // IDENT or a..b
        (void)t;
    }

    Decl declaration() {
        Decl d{};
        if (accept_kw("enum")) {
            d.k = Decl::K::EnumDecl;
            if (peek().type != Tok::Ident) fail("expected enum name");
            d.name = get().text;
            if (accept(Tok::Eq)) {
                d.k = Decl::K::EnumDef;
                expect(Tok::LBrace, "{");
                if (!accept(Tok::RBrace)) {
                    do {
                        if (peek().type != Tok::Ident) fail("expected enum member");
                        d.members.push_back(get().text);
                    } while (accept(Tok::Comma));
                    expect(Tok::RBrace, "}");
                }
            }
            expect(Tok::Semi, ";");
            return d;
        }
        if (accept_kw("constraint")) {
            d.k = Decl::K::Constraint;
            d.value = expr();
            expect(Tok::Semi, ";");
            return d;
        }
        if (accept_kw("solve")) {
            d.k = Decl::K::Solve;
            if (!accept_kw("satisfy")) {
                expect_kw("minimize");
                d.value = expr();
            }
            expect(Tok::Semi, ";");
            return d;
        }
        if (accept_kw("array")) {
            d.is_array = true;
            expect(Tok::LBracket, "[");
            do {
                d.indexes.push_back(expr(5));
            } while (accept(Tok::Comma));
            expect(Tok::RBracket, "]");
            expect_kw("of");
            size_t before = at;
            d.is_var = peek().type == Tok::Ident && peek().text == "var";
            skip_type();
            (void)before;
            expect(Tok::Colon, ":");
            if (peek().type != Tok::Ident) fail("expected declared name");
            d.name = get().text;
            d.k = d.is_var ? Decl::K::Var : Decl::K::Param;
            if (accept(Tok::Eq)) d.value = expr();
            expect(Tok::Semi, ";");
            return d;
        }
        // scalar declaration: var? type : name (= expr)? ;
        d.is_var = peek().type == Tok::Ident && peek().text == "var";
        skip_type();
        expect(Tok::Colon, ":");
        if (peek().type != Tok::Ident) fail("expected declared name");
        d.name = get().text;
        d.k = d.is_var ? Decl::K::Var : Decl::K::Param;
        if (accept(Tok::Eq)) d.value = expr();
        expect(Tok::Semi, ";");
        return d;
    }
};

} // namespace detail

inline ParsedModel parse_model(const std::string& text) {
    auto toks = lex(text);
    detail::Parser p{toks};
    ParsedModel model;
    while (p.peek().type != Tok::End) model.items.push_back(p.declaration());
    return model;
}

inline ParsedData parse_data(const std::string& text) {
    auto toks = lex(text);
    detail::Parser p{toks};
    ParsedData data;
    while (p.peek().type != Tok::End) {
        if (p.peek().type != Tok::Ident) p.fail("expected assignment");
        std::string name = p.get().text;
        p.expect(Tok::Eq, "=");
        data.assignments.emplace_back(name, p.expr());
        p.expect(Tok::Semi, ";");
    }
    return data;
}

// ---------------------------------------------------------------------------
// Values and evaluation.

struct Value {
    bool is_set = false;
    long long i = 0;
    std::vector<long long> set; // sorted

    static Value integer(long long v) { return Value{false, v, {}}; }
    static Value of_set(std::vector<long long> s) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return Value{true, 0, std::move(s)};
    }
    bool truthy() const { return !is_set && i != 0; }
    friend bool operator==(const Value& a, const Value& b) {
        if (a.is_set != b.is_set) return false;
        return a.is_set ? a.set == b.set : a.i == b.i;
    }
};

struct ArrayVal {
    std::vector<std::pair<long long, long long>> dims; // inclusive ranges
    std::vector<Value> cells;

    long long size() const {
        long long s = 1;
        for (auto& d : dims) s *= std::max<long long>(0, d.second - d.first + 1);
        return s;
    }
    const Value& at(const std::vector<long long>& idx) const {
        if (idx.size() != dims.size()) throw MznError("array access arity mismatch");
        long long off = 0;
        for (size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] < dims[k].first || idx[k] > dims[k].second)
                throw MznError("array index out of bounds");
            off = off * (dims[k].second - dims[k].first + 1) + (idx[k] - dims[k].first);
        }
        return cells[static_cast<size_t>(off)];
    }
};

struct Env {
    std::map<std::string, std::vector<std::string>> enums; // type -> members
    std::map<std::string, long long> enum_member_ids;
    std::map<std::string, Value> scalars;
    std::map<std::string, ArrayVal> arrays;
    std::map<std::string, long long> locals; // quantifier variables

    bool has_ident(const std::string& n) const {
        return enum_member_ids.count(n) || scalars.count(n) || arrays.count(n) ||
               enums.count(n) || locals.count(n);
    }
};

namespace detail {

inline Value eval(const Expr& e, Env& env);

inline std::pair<long long, long long> eval_range(const Expr& e, Env& env) {
    if (e.k != Expr::K::Binary || e.name != "..") throw MznError("expected a range");
    return {eval(*e.args[0], env).i, eval(*e.args[1], env).i};
}

inline Value eval(const Expr& e, Env& env) {
    switch (e.k) {
        case Expr::K::Int: return Value::integer(e.ival);
        case Expr::K::Ident: {
            auto l = env.locals.find(e.name);
            if (l != env.locals.end()) return Value::integer(l->second);
            auto m = env.enum_member_ids.find(e.name);
            if (m != env.enum_member_ids.end()) return Value::integer(m->second);
            auto s = env.scalars.find(e.name);
            if (s != env.scalars.end()) return s->second;
            throw MznError("undefined identifier " + e.name + " at line " +
                           std::to_string(e.line));
        }
        case Expr::K::Set: {
            std::vector<long long> vals;
            for (const auto& a : e.args) vals.push_back(eval(*a, env).i);
            return Value::of_set(std::move(vals));
        }
        case Expr::K::Not: {
            Value v = eval(*e.args[0], env);
            return Value::integer(v.truthy() ? 0 : 1);
        }
        case Expr::K::Neg: {
            Value v = eval(*e.args[0], env);
            return Value::integer(-v.i);
        }
        case Expr::K::Access: {
            auto a = env.arrays.find(e.name);
            if (a == env.arrays.end())
                throw MznError("undefined array " + e.name + " at line " +
                               std::to_string(e.line));
            std::vector<long long> idx;
            for (const auto& arg : e.args) idx.push_back(eval(*arg, env).i);
            return a->second.at(idx);
        }
        case Expr::K::Quant: {
            auto [lo, hi] = eval_range(*e.args[0], env);
            bool is_forall = e.name == "forall";
            bool result = is_forall;
            for (long long v = lo; v <= hi; ++v) {
                env.locals[e.var] = v;
                bool b = eval(*e.args[1], env).truthy();
                if (is_forall && !b) { result = false; break; }
                if (!is_forall && b) { result = true; break; }
            }
            env.locals.erase(e.var);
            return Value::integer(result ? 1 : 0);
        }
        case Expr::K::Call:
            throw MznError("call " + e.name + " not valid in constraint context at line " +
                           std::to_string(e.line));
        case Expr::K::Binary: {
            const std::string& op = e.name;
            if (op == "->") {
                Value a = eval(*e.args[0], env);
                if (!a.truthy()) return Value::integer(1);
                return Value::integer(eval(*e.args[1], env).truthy() ? 1 : 0);
            }
            if (op == "<->") {
                Value a = eval(*e.args[0], env);
                Value b = eval(*e.args[1], env);
                return Value::integer(a.truthy() == b.truthy() ? 1 : 0);
            }
            if (op == "/\\") {
                Value a = eval(*e.args[0], env);
                if (!a.truthy()) return Value::integer(0);
                return Value::integer(eval(*e.args[1], env).truthy() ? 1 : 0);
            }
            if (op == "\\/") {
                Value a = eval(*e.args[0], env);
                if (a.truthy()) return Value::integer(1);
                return Value::integer(eval(*e.args[1], env).truthy() ? 1 : 0);
            }
            Value a = eval(*e.args[0], env);
            Value b = eval(*e.args[1], env);
            if (op == "=") return Value::integer(a == b ? 1 : 0);
            if (op == "!=") return Value::integer(a == b ? 0 : 1);
            if (op == "<") return Value::integer(a.i < b.i ? 1 : 0);
            if (op == "<=") return Value::integer(a.i <= b.i ? 1 : 0);
            if (op == ">") return Value::integer(a.i > b.i ? 1 : 0);
            if (op == ">=") return Value::integer(a.i >= b.i ? 1 : 0);
            if (op == "+") return Value::integer(a.i + b.i);
            if (op == "-") return Value::integer(a.i - b.i);
            if (op == "*") return Value::integer(a.i * b.i);
            if (op == "div") return Value::integer(a.i / b.i);
            if (op == "mod") return Value::integer(a.i % b.i);
            if (op == "in")
                return Value::integer(
                    std::binary_search(b.set.begin(), b.set.end(), a.i) ? 1 : 0);
            if (op == "subset")
                return Value::integer(
                    std::includes(b.set.begin(), b.set.end(), a.set.begin(), a.set.end()) ? 1
                                                                                          : 0);
            if (op == "superset")
                return Value::integer(
                    std::includes(a.set.begin(), a.set.end(), b.set.begin(), b.set.end()) ? 1
                                                                                          : 0);
            if (op == "union") {
                std::vector<long long> u = a.set;
                u.insert(u.end(), b.set.begin(), b.set.end());
                return Value::of_set(std::move(u));
            }
            if (op == "intersect") {
                std::vector<long long> u;
                std::set_intersection(a.set.begin(), a.set.end(), b.set.begin(), b.set.end(),
                                      std::back_inserter(u));
                return Value::of_set(std::move(u));
            }
            if (op == "diff") {
                std::vector<long long> u;
                std::set_difference(a.set.begin(), a.set.end(), b.set.begin(), b.set.end(),
                                    std::back_inserter(u));
                return Value::of_set(std::move(u));
            }
            if (op == "..") {
                std::vector<long long> u;
                for (long long v = a.i; v <= b.i; ++v) u.push_back(v);
                return Value::of_set(std::move(u));
            }
            throw MznError("unsupported operator " + op);
        }
    }
    throw MznError("unreachable expression kind");
}

/// Evaluates a data-file literal: plain expression, [..] literal, or an
/// array1d/array2d coercion call.
inline void bind_data_value(Env& env, const std::string& name, const Expr& e) {
    if (e.k == Expr::K::Call && (e.name == "array1d" || e.name == "array2d")) {
        ArrayVal arr;
        size_t nidx = e.name == "array1d" ? 1 : 2;
        if (e.args.size() != nidx + 1) throw MznError(e.name + " arity");
        for (size_t k = 0; k < nidx; ++k) {
            const Expr& ix = *e.args[k];
            if (ix.k == Expr::K::Ident) {
                auto en = env.enums.find(ix.name);
                if (en == env.enums.end()) throw MznError("unknown index enum " + ix.name);
                arr.dims.push_back({1, static_cast<long long>(en->second.size())});
            } else {
                arr.dims.push_back(eval_range(ix, env));
            }
        }
        const Expr& lit = *e.args[nidx];
        if (!(lit.k == Expr::K::Call && lit.name == "[]"))
            throw MznError(e.name + " expects an array literal");
        for (const auto& cell : lit.args) arr.cells.push_back(eval(*cell, env));
        if (static_cast<long long>(arr.cells.size()) != arr.size())
            throw MznError("array literal size mismatch for " + name);
        env.arrays[name] = std::move(arr);
        return;
    }
    if (e.k == Expr::K::Call && e.name == "[]") {
        ArrayVal arr;
        arr.dims.push_back({1, static_cast<long long>(e.args.size())});
        for (const auto& cell : e.args) arr.cells.push_back(eval(*cell, env));
        env.arrays[name] = std::move(arr);
        return;
    }
    env.scalars[name] = eval(e, env);
}

} // namespace detail

/// Builds the evaluation environment from the model's enums and parameter
/// definitions plus the data file's assignments.
inline Env build_env(const ParsedModel& model, const ParsedData& data) {
    Env env;
    long long next_id = 1;
    for (const auto& d : model.items) {
        if (d.k == Decl::K::EnumDef) {
            env.enums[d.name] = d.members;
            for (const auto& m : d.members) {
                if (!env.enum_member_ids.emplace(m, next_id++).second)
                    throw MznError("duplicate enum member " + m);
            }
        }
    }
    for (const auto& [name, expr] : data.assignments) detail::bind_data_value(env, name, *expr);
    for (const auto& d : model.items) {
        if (d.k == Decl::K::Param && d.value && !d.is_array)
            env.scalars[d.name] = detail::eval(*d.value, env);
    }
    return env;
}

/// Decision-variable assignment for replaying a plan against the model.
struct Assignment {
    std::map<std::string, ArrayVal> arrays;
};

/// Evaluates every constraint item under env + assignment; returns the
/// 1-based indices of violated constraints (empty means satisfied).
inline std::vector<int> violated_constraints(const ParsedModel& model, Env env,
                                             const Assignment& assignment) {
    for (const auto& [name, arr] : assignment.arrays) env.arrays[name] = arr;
    std::vector<int> bad;
    int index = 0;
    for (const auto& d : model.items) {
        if (d.k != Decl::K::Constraint) continue;
        ++index;
        if (!detail::eval(*d.value, env).truthy()) bad.push_back(index);
    }
    return bad;
}

// ---------------------------------------------------------------------------
// Structural linter.

inline void collect_idents(const Expr& e, std::set<std::string>& locals,
                           const Env& env, std::vector<std::string>& diags) {
    switch (e.k) {
        case Expr::K::Ident:
            if (!env.has_ident(e.name) && !locals.count(e.name))
                diags.push_back("undeclared identifier " + e.name + " at line " +
                                std::to_string(e.line));
            break;
        case Expr::K::Access:
            if (!env.has_ident(e.name) && !locals.count(e.name))
                diags.push_back("undeclared array " + e.name + " at line " +
                                std::to_string(e.line));
            for (const auto& a : e.args) collect_idents(*a, locals, env, diags);
            break;
        case Expr::K::Quant: {
            collect_idents(*e.args[0], locals, env, diags);
            bool fresh = locals.insert(e.var).second;
            collect_idents(*e.args[1], locals, env, diags);
            if (fresh) locals.erase(e.var);
            break;
        }
        default:
            for (const auto& a : e.args) collect_idents(*a, locals, env, diags);
    }
}

/// Structural lint of an emitted model/data pair: balanced delimiters, every
/// referenced identifier declared, exactly one transition block per step
/// kind, and the goal constraint present.
inline std::vector<std::string> lint_model(const std::string& model_text,
                                           const std::string& data_text) {
    std::vector<std::string> diags;

    for (const auto& [label, text] : {std::pair<const char*, const std::string&>{"model", model_text},
                                      {"data", data_text}}) {
        std::vector<char> stack;
        int line = 1;
        bool comment = false;
        for (char c : text) {
            if (c == '\n') { ++line; comment = false; continue; }
            if (comment) continue;
            if (c == '%') { comment = true; continue; }
            if (c == '(' || c == '[' || c == '{') stack.push_back(c);
            if (c == ')' || c == ']' || c == '}') {
                char open = c == ')' ? '(' : (c == ']' ? '[' : '{');
                if (stack.empty() || stack.back() != open) {
                    diags.push_back(std::string(label) + ": unbalanced '" + c + "' at line " +
                                    std::to_string(line));
                    return diags;
                }
                stack.pop_back();
            }
        }
        if (!stack.empty())
            diags.push_back(std::string(label) + ": unclosed '" + std::string(1, stack.back()) +
                            "'");
    }
    if (!diags.empty()) return diags;

    ParsedModel model;
    ParsedData data;
    try {
        model = parse_model(model_text);
        data = parse_data(data_text);
    } catch (const MznError& e) {
        diags.push_back(e.what());
        return diags;
    }

    Env env;
    long long next_id = 1;
    std::set<std::string> declared_params;
    for (const auto& d : model.items) {
        if (d.k == Decl::K::EnumDef) {
            env.enums[d.name] = d.members;
            for (const auto& m : d.members) env.enum_member_ids.emplace(m, next_id++);
        } else if (d.k == Decl::K::EnumDecl) {
            env.enums[d.name] = {};
        } else if (d.k == Decl::K::Param || d.k == Decl::K::Var) {
            if (d.is_array)
                env.arrays.emplace(d.name, ArrayVal{});
            else
                env.scalars.emplace(d.name, Value::integer(0));
            declared_params.insert(d.name);
        }
    }
    for (const auto& [name, expr] : data.assignments) {
        if (!declared_params.count(name))
            diags.push_back("data assigns undeclared parameter " + name);
        std::set<std::string> locals;
        collect_idents(*expr, locals, env, diags);
    }
    for (const auto& d : model.items) {
        std::set<std::string> locals;
        if (d.value) collect_idents(*d.value, locals, env, diags);
        for (const auto& ix : d.indexes) collect_idents(*ix, locals, env, diags);
    }

    for (int i = 0; i < kNumStepKinds; ++i) {
        std::string needle =
            std::string("construct[i] = ") + step_kind_name(static_cast<StepKind>(i)) + " ->";
        size_t count = 0, pos = 0;
        while ((pos = model_text.find(needle, pos)) != std::string::npos) {
            ++count;
            pos += needle.size();
        }
        if (count != 1)
            diags.push_back("expected exactly one transition block for " +
                            std::string(step_kind_name(static_cast<StepKind>(i))) + ", found " +
                            std::to_string(count));
    }
    if (model_text.find("{ A, B, C } subset known_points[n];") == std::string::npos)
        diags.push_back("goal constraint line missing");
    return diags;
}

// ---------------------------------------------------------------------------
// Plan replay against an emitted fixed-length model.

/// Builds the decision-variable assignment corresponding to a native plan:
/// state arrays from the replayed states, construct/argument slots from the
/// steps. Unused slots get the first enumerator of their type.
inline Assignment assignment_from_plan(const Plan& plan, const Problem& problem,
                                       const Catalog& catalog, const Env& env) {
    const int n = plan.length();
    Assignment asg;

    auto member_id = [&](const std::string& name) {
        auto it = env.enum_member_ids.find(name);
        if (it == env.enum_member_ids.end()) throw MznError("enum member " + name + " missing");
        return it->second;
    };
    auto object_value = [&](ObjectId id) { return member_id(catalog.name(id)); };

    const char* kind_enum[] = {"Point", "Line", "Circle", "Angle"};
    const char* state_names[] = {"known_points", "known_lines", "known_circles", "known_angles"};
    const char* slot_names[] = {"points", "lines", "circles", "angles"};
    const int slot_width[] = {4, 2, 2, 1};

    // State arrays by replay.
    State state = problem.initial_state();
    std::vector<State> states{state};
    for (const auto& step : plan.steps) {
        state.add(step.produced);
        states.push_back(state);
    }
    for (int k = 0; k < kNumKinds; ++k) {
        ArrayVal arr;
        arr.dims.push_back({0, n});
        for (const State& s : states) {
            std::vector<long long> members;
            for (int b = 0; b < catalog.count(static_cast<Kind>(k)); ++b) {
                if (s.bits[k] & (1ULL << b))
                    members.push_back(object_value(ObjectId{static_cast<Kind>(k), b}));
            }
            arr.cells.push_back(Value::of_set(std::move(members)));
        }
        asg.arrays[state_names[k]] = std::move(arr);
    }

    // construct[i].
    {
        ArrayVal arr;
        arr.dims.push_back({1, n});
        for (const auto& step : plan.steps)
            arr.cells.push_back(Value::integer(member_id(step_kind_name(step.kind))));
        asg.arrays["construct"] = std::move(arr);
    }

    // Argument slots: consumed arguments in order, produced in the next slot
    // of its kind, remaining slots defaulted to the first enumerator.
    for (int k = 0; k < kNumKinds; ++k) {
        ArrayVal arr;
        arr.dims.push_back({1, n});
        arr.dims.push_back({1, slot_width[k]});
        long long first_member = member_id(env.enums.at(kind_enum[k]).front());
        for (const auto& step : plan.steps) {
            std::vector<long long> slots(static_cast<size_t>(slot_width[k]), first_member);
            size_t used = 0;
            for (int a : step.args_of(static_cast<Kind>(k)))
                slots[used++] = object_value(ObjectId{static_cast<Kind>(k), a});
            if (static_cast<int>(step.produced.kind) == k) slots[used++] = object_value(step.produced);
            for (long long v : slots) arr.cells.push_back(Value::integer(v));
        }
        asg.arrays[slot_names[k]] = std::move(arr);
    }
    return asg;
}

/// Replays a native plan against emitted fixed-length model/data text:
/// returns the violated constraint indices (empty = the plan satisfies every
/// emitted constraint).
inline std::vector<int> replay_plan(const std::string& model_text, const std::string& data_text,
                                    const Plan& plan, const Problem& problem,
                                    const Catalog& catalog) {
    ParsedModel model = parse_model(model_text);
    ParsedData data = parse_data(data_text);
    Env env = build_env(model, data);
    Assignment asg = assignment_from_plan(plan, problem, catalog, env);
    return violated_constraints(model, std::move(env), asg);
}

} // namespace tricons::mzn
