#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace opsem::fo {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// First-order term: a variable or a symbol applied to arguments.
/// Constants are applications with zero arguments.
struct Term {
    bool var;
    std::string name;
    std::vector<TermPtr> args;

    static TermPtr mk_var(std::string n);
    static TermPtr mk_app(std::string f, std::vector<TermPtr> as = {});
};

bool term_eq(const TermPtr& a, const TermPtr& b);
std::size_t term_size(const TermPtr& t);
void collect_vars(const TermPtr& t, std::set<std::string>& out);
std::set<std::string> vars(const TermPtr& t);
bool occurs(const std::string& x, const TermPtr& t);
std::string to_string(const TermPtr& t);

struct Signature {
    std::map<std::string, int> symbols;  // name -> arity

    bool well_formed(const TermPtr& t) const;
};

/// Finite map from variable names to terms; identity elsewhere.
/// No x -> x bindings are stored.
using Subst = std::map<std::string, TermPtr>;

TermPtr apply_subst(const Subst& s, const TermPtr& t);

/// compose_subst(t, s)(x) = t(s(x)) for every variable x.
Subst compose_subst(const Subst& t, const Subst& s);

using EqSystem = std::vector<std::pair<TermPtr, TermPtr>>;

/// Most general unifier in idempotent (triangular-solved) form, or
/// nullopt when the system has no unifier (occurs check / symbol clash).
std::optional<Subst> unify(const EqSystem& e);

/// Renames variables to v0, v1, ... in first-occurrence (preorder) order.
TermPtr canonical_rename(const TermPtr& t);
/// Same renaming applied consistently across a list of terms.
std::vector<TermPtr> canonical_rename_all(const std::vector<TermPtr>& ts);
/// True iff a and b are equal up to a bijective variable renaming.
bool eq_up_to_renaming(const TermPtr& a, const TermPtr& b);

struct ParseError {
    std::size_t pos;
    std::string message;
};

/// Parses `f(x, g(a))` style syntax. Identifiers present in the signature
/// are symbols (arity checked); all other identifiers are variables.
std::optional<TermPtr> parse_term(const Signature& sig, const std::string& src,
                                  ParseError* err = nullptr);

}  // namespace opsem::fo
