#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "datacheck/errors.hpp"
#include "datacheck/formula.hpp"

namespace datacheck {

// Recursive-descent parser for the query language:
//
//   formula    := iff
//   iff        := imp ("<->" imp)*          right-associative
//   imp        := or ("->" imp)?            right-associative
//   or         := and ("|" and)*            left-associative
//   and        := unary ("&" unary)*        left-associative
//   unary      := "!" unary | atom | "(" formula ")"
//   timed      := formula "@" integer
//   item       := timed ("&" timed)*        all at one time; joined with &
//              |  "OBS" group "=" bits "@" integer
//   condition  := item ("," item)*
//   query      := "P(" [target] "|" [condition] ")"
//   target     := pattern "@" integer | condition
//
// "OBS NESW=0011 @2" expands to the four timed literals !N@2, E@2, S@2, !W@2
// (each group letter is a single-character atom). A target pattern containing
// '*' selects an atom family and asks for the distribution over it.

namespace detail {

enum class token_kind {
    ident,
    integer,
    bang,
    amp,
    pipe,
    arrow,
    darrow,
    lparen,
    rparen,
    at,
    comma,
    eq,
    end,
};

struct token {
    token_kind kind;
    std::string text;
    std::size_t offset;
};

inline std::vector<token> tokenize(std::string_view text) {
    std::vector<token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c))) {
            ++i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                             text[i] == '_' || text[i] == '*')) {
                ++i;
            }
            out.push_back({token_kind::ident, std::string(text.substr(start, i - start)), start});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            ++i;
            while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            out.push_back({token_kind::integer, std::string(text.substr(start, i - start)), start});
            continue;
        }
        switch (c) {
        case '!': out.push_back({token_kind::bang, "!", start}); ++i; break;
        case '&': out.push_back({token_kind::amp, "&", start}); ++i; break;
        case '|': out.push_back({token_kind::pipe, "|", start}); ++i; break;
        case '(': out.push_back({token_kind::lparen, "(", start}); ++i; break;
        case ')': out.push_back({token_kind::rparen, ")", start}); ++i; break;
        case '@': out.push_back({token_kind::at, "@", start}); ++i; break;
        case ',': out.push_back({token_kind::comma, ",", start}); ++i; break;
        case '=': out.push_back({token_kind::eq, "=", start}); ++i; break;
        case '-':
            if (i + 1 < n && text[i + 1] == '>') {
                out.push_back({token_kind::arrow, "->", start});
                i += 2;
            } else {
                throw unknown_token_error('-', start);
            }
            break;
        case '<':
            if (i + 2 < n && text[i + 1] == '-' && text[i + 2] == '>') {
                out.push_back({token_kind::darrow, "<->", start});
                i += 3;
            } else {
                throw unknown_token_error('<', start);
            }
            break;
        default:
            throw unknown_token_error(c, start);
        }
    }
    out.push_back({token_kind::end, "", n});
    return out;
}

class token_stream {
public:
    explicit token_stream(std::string_view text) : tokens_(tokenize(text)) {}

    const token& peek(std::size_t ahead = 0) const {
        const std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    const token& next() {
        const token& t = peek();
        if (t.kind != token_kind::end) ++pos_;
        return t;
    }
    bool accept(token_kind k) {
        if (peek().kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }
    token expect(token_kind k, const std::string& what) {
        if (peek().kind != k) {
            throw syntax_error("expected " + what + ", got '" +
                                   (peek().kind == token_kind::end ? "end of input" : peek().text) + "'",
                               peek().offset);
        }
        return tokens_[pos_++];
    }

private:
    std::vector<token> tokens_;
    std::size_t pos_ = 0;
};

class grammar {
public:
    explicit grammar(std::string_view text) : ts_(text) {}

    formula_ptr parse_formula_only() {
        formula_ptr f = parse_iff();
        const token& t = ts_.peek();
        if (t.kind != token_kind::end) {
            throw syntax_error("unexpected trailing input '" + t.text + "'", t.offset);
        }
        return f;
    }

    condition parse_condition_only() {
        condition items;
        if (ts_.peek().kind != token_kind::end) {
            parse_condition_into(items);
        }
        const token& t = ts_.peek();
        if (t.kind != token_kind::end) {
            throw syntax_error("unexpected trailing input '" + t.text + "'", t.offset);
        }
        return items;
    }

    formula_ptr parse_iff() {
        std::vector<formula_ptr> parts{parse_imp()};
        while (ts_.accept(token_kind::darrow)) {
            parts.push_back(parse_imp());
        }
        formula_ptr f = parts.back();
        for (std::size_t i = parts.size() - 1; i-- > 0;) {
            f = formula::make_iff(parts[i], f);
        }
        return f;
    }

    formula_ptr parse_imp() {
        formula_ptr lhs = parse_or();
        if (ts_.accept(token_kind::arrow)) {
            return formula::make_implies(std::move(lhs), parse_imp());
        }
        return lhs;
    }

    formula_ptr parse_or() {
        formula_ptr f = parse_and();
        while (ts_.accept(token_kind::pipe)) {
            f = formula::make_or(std::move(f), parse_and());
        }
        return f;
    }

    formula_ptr parse_and() {
        formula_ptr f = parse_unary();
        while (ts_.accept(token_kind::amp)) {
            f = formula::make_and(std::move(f), parse_unary());
        }
        return f;
    }

    formula_ptr parse_unary() {
        if (ts_.accept(token_kind::bang)) {
            return formula::make_not(parse_unary());
        }
        if (ts_.peek().kind == token_kind::lparen) {
            ts_.next();
            formula_ptr f = parse_iff();
            ts_.expect(token_kind::rparen, "')'");
            return f;
        }
        const token t = ts_.expect(token_kind::ident, "an atom");
        if (t.text.find('*') != std::string::npos) {
            throw syntax_error("'*' is only valid in a distribution target", t.offset);
        }
        return formula::make_atom(t.text);
    }

    int parse_time() {
        const token t = ts_.expect(token_kind::integer, "a time step");
        const long v = std::stol(t.text);
        if (v < 1) {
            throw syntax_error("time steps start at 1", t.offset);
        }
        return static_cast<int>(v);
    }

    timed_formula parse_timed() {
        formula_ptr f = parse_iff();
        ts_.expect(token_kind::at, "'@'");
        return {std::move(f), parse_time()};
    }

    // One condition item: either the OBS shorthand (expands to several
    // literal items) or '&'-joined timed formulas sharing a single time
    // (kept as one conjunction item).
    void parse_item_into(condition& items) {
        if (ts_.peek().kind == token_kind::ident && ts_.peek().text == "OBS" &&
            ts_.peek(1).kind == token_kind::ident && ts_.peek(2).kind == token_kind::eq) {
            parse_obs_into(items);
            return;
        }
        const std::size_t item_offset = ts_.peek().offset;
        timed_formula first = parse_timed();
        if (ts_.peek().kind != token_kind::amp) {
            items.push_back(std::move(first));
            return;
        }
        formula_ptr conj = first.f;
        while (ts_.accept(token_kind::amp)) {
            timed_formula next = parse_timed();
            if (next.time != first.time) {
                throw syntax_error(
                    "condition items may not mix times; separate with ','", item_offset);
            }
            conj = formula::make_and(std::move(conj), next.f);
        }
        items.push_back({std::move(conj), first.time});
    }

    void parse_obs_into(condition& items) {
        ts_.next(); // OBS
        const token group = ts_.expect(token_kind::ident, "an atom group");
        ts_.expect(token_kind::eq, "'='");
        const token bits = ts_.expect(token_kind::integer, "a bit string");
        if (bits.text.size() != group.text.size()) {
            throw syntax_error("bit string length must match the atom group", bits.offset);
        }
        ts_.expect(token_kind::at, "'@'");
        const int time = parse_time();
        for (std::size_t i = 0; i < group.text.size(); ++i) {
            formula_ptr atom = formula::make_atom(std::string(1, group.text[i]));
            if (bits.text[i] == '1') {
                items.push_back({std::move(atom), time});
            } else if (bits.text[i] == '0') {
                items.push_back({formula::make_not(std::move(atom)), time});
            } else {
                throw syntax_error("bit string must be 0s and 1s", bits.offset);
            }
        }
    }

    void parse_condition_into(condition& items) {
        parse_item_into(items);
        while (ts_.accept(token_kind::comma)) {
            parse_item_into(items);
        }
    }

    token_stream& ts() { return ts_; }

private:
    token_stream ts_;
};

} // namespace detail

inline formula_ptr parse_formula(std::string_view text) {
    return detail::grammar(text).parse_formula_only();
}

inline condition parse_condition(std::string_view text) {
    return detail::grammar(text).parse_condition_only();
}

// A full "P( target | condition )" query. The target is either a multiset of
// timed formulas or, when the single target atom contains '*', a family
// pattern asking for the distribution over all matching atoms.
struct parsed_query {
    std::string text;
    bool has_family = false;
    std::string family_pattern;
    int family_time = 1;
    condition target;
    condition given;
};

// '*' matches any (possibly empty) run of characters; everything else is
// literal. Used to select atom families like "L_*".
inline bool glob_match(std::string_view pattern, std::string_view text) {
    if (pattern.empty()) return text.empty();
    if (pattern.front() == '*') {
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (glob_match(pattern.substr(1), text.substr(i))) return true;
        }
        return false;
    }
    return !text.empty() && pattern.front() == text.front() &&
           glob_match(pattern.substr(1), text.substr(1));
}

inline parsed_query parse_query(std::string_view text) {
    using detail::token_kind;
    parsed_query q;
    q.text = std::string(text);
    detail::grammar g(text);
    auto& ts = g.ts();

    const detail::token head = ts.expect(token_kind::ident, "'P('");
    if (head.text != "P") {
        throw syntax_error("queries start with 'P('", head.offset);
    }
    ts.expect(token_kind::lparen, "'('");

    if (ts.peek().kind == token_kind::ident &&
        ts.peek().text.find('*') != std::string::npos) {
        q.has_family = true;
        q.family_pattern = ts.next().text;
        ts.expect(token_kind::at, "'@'");
        q.family_time = g.parse_time();
    } else if (ts.peek().kind != token_kind::pipe) {
        g.parse_condition_into(q.target);
    }

    ts.expect(token_kind::pipe, "'|'");
    if (ts.peek().kind != token_kind::rparen) {
        g.parse_condition_into(q.given);
    }
    ts.expect(token_kind::rparen, "')'");
    const detail::token& tail = ts.peek();
    if (tail.kind != token_kind::end) {
        throw syntax_error("unexpected trailing input '" + tail.text + "'", tail.offset);
    }
    return q;
}

} // namespace datacheck
