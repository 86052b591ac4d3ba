#pragma once

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "datacheck/errors.hpp"

namespace datacheck {

class formula;
using formula_ptr = std::shared_ptr<const formula>;

// Immutable propositional AST node. Atoms are plain identifiers; there is no
// normalization anywhere — conditions are matched structurally, as given.
class formula {
public:
    enum class connective {
        atom,
        negation,
        conjunction,
        disjunction,
        implication,
        biconditional,
    };

    static formula_ptr make_atom(std::string name) {
        return std::shared_ptr<const formula>(
            new formula(connective::atom, std::move(name), nullptr, nullptr));
    }
    static formula_ptr make_not(formula_ptr f) {
        return std::shared_ptr<const formula>(
            new formula(connective::negation, {}, std::move(f), nullptr));
    }
    static formula_ptr make_and(formula_ptr a, formula_ptr b) {
        return std::shared_ptr<const formula>(
            new formula(connective::conjunction, {}, std::move(a), std::move(b)));
    }
    static formula_ptr make_or(formula_ptr a, formula_ptr b) {
        return std::shared_ptr<const formula>(
            new formula(connective::disjunction, {}, std::move(a), std::move(b)));
    }
    static formula_ptr make_implies(formula_ptr a, formula_ptr b) {
        return std::shared_ptr<const formula>(
            new formula(connective::implication, {}, std::move(a), std::move(b)));
    }
    static formula_ptr make_iff(formula_ptr a, formula_ptr b) {
        return std::shared_ptr<const formula>(
            new formula(connective::biconditional, {}, std::move(a), std::move(b)));
    }

    connective kind() const { return kind_; }
    const std::string& atom_name() const { return atom_; }
    const formula_ptr& lhs() const { return lhs_; }
    const formula_ptr& rhs() const { return rhs_; }

    // Classical two-valued semantics. `lookup` maps an atom name to its truth
    // value and throws unbound_atom_error when the atom is not assigned.
    template <class Lookup>
    bool eval(Lookup&& lookup) const {
        switch (kind_) {
        case connective::atom: return lookup(atom_);
        case connective::negation: return !lhs_->eval(lookup);
        case connective::conjunction: return lhs_->eval(lookup) && rhs_->eval(lookup);
        case connective::disjunction: return lhs_->eval(lookup) || rhs_->eval(lookup);
        case connective::implication: return !lhs_->eval(lookup) || rhs_->eval(lookup);
        case connective::biconditional: return lhs_->eval(lookup) == rhs_->eval(lookup);
        }
        return false; // unreachable
    }

    void collect_atoms(std::set<std::string>& out) const {
        if (kind_ == connective::atom) {
            out.insert(atom_);
            return;
        }
        if (lhs_) lhs_->collect_atoms(out);
        if (rhs_) rhs_->collect_atoms(out);
    }

    std::set<std::string> atoms() const {
        std::set<std::string> out;
        collect_atoms(out);
        return out;
    }

    // Canonical rendering: minimal parentheses under the precedence
    // ! > & > | > -> > <-> with -> and <-> right-associative, & and |
    // left-associative. parse(str()) reproduces the tree.
    std::string str() const {
        std::string out;
        print(out, 0);
        return out;
    }

    friend bool structurally_equal(const formula& a, const formula& b) {
        if (a.kind_ != b.kind_) return false;
        if (a.kind_ == connective::atom) return a.atom_ == b.atom_;
        if (bool(a.lhs_) != bool(b.lhs_) || bool(a.rhs_) != bool(b.rhs_)) return false;
        if (a.lhs_ && !structurally_equal(*a.lhs_, *b.lhs_)) return false;
        if (a.rhs_ && !structurally_equal(*a.rhs_, *b.rhs_)) return false;
        return true;
    }

private:
    formula(connective kind, std::string atom, formula_ptr lhs, formula_ptr rhs)
        : kind_(kind), atom_(std::move(atom)), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}

    // Binding strength; higher binds tighter.
    static int level(connective c) {
        switch (c) {
        case connective::atom: return 5;
        case connective::negation: return 4;
        case connective::conjunction: return 3;
        case connective::disjunction: return 2;
        case connective::implication: return 1;
        case connective::biconditional: return 0;
        }
        return 0;
    }

    void print(std::string& out, int parent_level) const {
        const int self = level(kind_);
        const bool parens = self < parent_level;
        if (parens) out += '(';
        switch (kind_) {
        case connective::atom:
            out += atom_;
            break;
        case connective::negation:
            out += '!';
            lhs_->print(out, self);
            break;
        case connective::conjunction:
        case connective::disjunction: {
            // left-associative: the right child needs parens on a tie
            lhs_->print(out, self);
            out += kind_ == connective::conjunction ? " & " : " | ";
            rhs_->print(out, self + 1);
            break;
        }
        case connective::implication:
        case connective::biconditional: {
            // right-associative: the left child needs parens on a tie
            lhs_->print(out, self + 1);
            out += kind_ == connective::implication ? " -> " : " <-> ";
            rhs_->print(out, self);
            break;
        }
        }
        if (parens) out += ')';
    }

    connective kind_;
    std::string atom_;
    formula_ptr lhs_;
    formula_ptr rhs_;
};

inline bool structurally_equal(const formula_ptr& a, const formula_ptr& b) {
    return structurally_equal(*a, *b);
}

// A formula observed at a discrete time step. Times are one-based; whether a
// time fits the dataset horizon is checked by the engine, not here.
struct timed_formula {
    formula_ptr f;
    int time = 1;

    std::string str() const { return f->str() + "@" + std::to_string(time); }
};

inline bool operator==(const timed_formula& a, const timed_formula& b) {
    return a.time == b.time && structurally_equal(a.f, b.f);
}

// Multiset of timed formulas; duplicates are significant and order is kept
// as given (a formula listed twice counts twice).
using condition = std::vector<timed_formula>;

inline bool is_literal(const formula& f) {
    if (f.kind() == formula::connective::atom) return true;
    return f.kind() == formula::connective::negation &&
           f.lhs()->kind() == formula::connective::atom;
}

// Rewrites every item whose formula is a pure conjunction of literals into
// one item per literal at the same time. Anything else passes through
// unchanged; granularity is semantics, so this is only ever explicit.
inline condition split_literals(const condition& items) {
    condition out;
    for (const auto& item : items) {
        std::vector<formula_ptr> stack{item.f};
        std::vector<formula_ptr> literals;
        bool splittable = true;
        while (!stack.empty() && splittable) {
            formula_ptr f = stack.back();
            stack.pop_back();
            if (f->kind() == formula::connective::conjunction) {
                stack.push_back(f->rhs());
                stack.push_back(f->lhs());
            } else if (is_literal(*f)) {
                literals.push_back(f);
            } else {
                splittable = false;
            }
        }
        if (splittable && literals.size() > 1) {
            for (auto& lit : literals) {
                out.push_back({std::move(lit), item.time});
            }
        } else {
            out.push_back(item);
        }
    }
    return out;
}

} // namespace datacheck
