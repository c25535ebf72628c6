#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace opsem::lam {

struct LamTerm;
using LamPtr = std::shared_ptr<const LamTerm>;

struct LamTerm {
    enum Kind { Var, Abs, App } kind;
    std::string name;  // Var / Abs binder
    LamPtr body;       // Abs
    LamPtr fn, arg;    // App

    static LamPtr var(std::string x);
    static LamPtr abs(std::string x, LamPtr m);
    static LamPtr app(LamPtr m, LamPtr n);
};

std::set<std::string> free_vars(const LamPtr& m);
bool alpha_eq(const LamPtr& a, const LamPtr& b);

/// Capture-avoiding substitution [m/x]n with deterministic fresh names.
LamPtr substitute(const LamPtr& n, const std::string& x, const LamPtr& m);

enum class RuleSet { Beta, BetaEta };

/// All one-step reducts at all positions, deduplicated up to α.
std::vector<LamPtr> reducts(const LamPtr& t, RuleSet rules);

struct NormalForm {
    LamPtr term;
    std::size_t steps;
};
struct FuelExhausted {};
using NormalizeResult = std::variant<NormalForm, FuelExhausted>;

/// Leftmost-outermost (normal order) β-normalization.
NormalizeResult normalize_no(const LamPtr& t, std::size_t fuel);

/// Complete development: simultaneously contracts every redex present in t.
LamPtr develop(const LamPtr& t);

/// One parallel step contracting the subset of present redexes chosen by
/// `pick` (called once per candidate redex, preorder). Test support for
/// sampling arbitrary instances of the parallel reduction.
LamPtr develop_subset(const LamPtr& t, const std::function<bool()>& pick);

enum class EvalStrategy { CBN, CBV };

struct Value {
    LamPtr term;
};
using EvalResult = std::variant<Value, FuelExhausted>;

/// Big-step weak evaluation on closed terms.
/// Throws std::invalid_argument on open input.
EvalResult eval_big(const LamPtr& t, EvalStrategy strategy, std::size_t fuel);

// ------------------------------------------------------------ de Bruijn form

struct DbTerm;
using DbPtr = std::shared_ptr<const DbTerm>;
struct DbTerm {
    enum Kind { Var, Abs, App } kind;
    std::size_t index;  // Var
    DbPtr body;         // Abs
    DbPtr fn, arg;      // App

    static DbPtr var(std::size_t i);
    static DbPtr abs(DbPtr m);
    static DbPtr app(DbPtr m, DbPtr n);
};

/// Conversion of a closed named term; nullopt when the term is open.
std::optional<DbPtr> to_debruijn(const LamPtr& t);
bool db_eq(const DbPtr& a, const DbPtr& b);

/// Closure-machine run (environment machine on de Bruijn terms), per
/// strategy; the value closure is read back to a named term by forcing
/// environments recursively. Throws std::invalid_argument on open input.
EvalResult machine_run(const LamPtr& t, EvalStrategy strategy, std::size_t fuel);

// ------------------------------------------------------------ Church numerals

LamPtr church(unsigned n);
std::optional<unsigned> church_decode(const LamPtr& t, std::size_t fuel);

// ----------------------------------------------------------------------- text

std::string to_string(const LamPtr& t);

struct LamParseResult {
    std::optional<LamPtr> term;
    std::string error;
    std::size_t pos = 0;
};

/// `\x. M` or `\x y. M` abstraction, juxtaposition application,
/// `let x = M in N` sugar for (\x.N) M, parentheses, line comments with #.
LamParseResult parse_lam(const std::string& src);

}  // namespace opsem::lam
