#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "opsem/term.hpp"

namespace opsem::trs {

using fo::Signature;
using fo::Subst;
using fo::Term;
using fo::TermPtr;

struct Rule {
    TermPtr lhs;
    TermPtr rhs;
};

struct Trs {
    Signature sig;
    std::vector<Rule> rules;
};

/// lhs not a bare variable and vars(rhs) ⊆ vars(lhs).
bool rule_well_formed(const Rule& r);

/// Matches pattern against subject; binds pattern variables only.
std::optional<Subst> match(const TermPtr& pattern, const TermPtr& subject);

/// All one-step reducts of t: every position, every rule.
std::vector<TermPtr> rewrite_all(const Trs& r, const TermPtr& t);

enum class Strategy { LeftmostInnermost, LeftmostOutermost };

struct NormalizeResult {
    bool normal_form;  // false = fuel exhausted
    TermPtr term;      // normal form, or last term reached
    std::size_t steps;
};

NormalizeResult normalize(const Trs& r, const TermPtr& t, Strategy strategy,
                          std::size_t fuel);

// ---------------------------------------------------------------- RPO

enum class Status { LexLeftRight, LexRightLeft, Multiset };

struct RpoParams {
    /// Higher rank = greater in the precedence; symbols absent from the map
    /// are incomparable with everything (including each other).
    std::map<std::string, int> precedence;
    std::map<std::string, Status> status;  // default LexLeftRight

    bool prec_greater(const std::string& f, const std::string& g) const;
    Status status_of(const std::string& f) const;
};

bool rpo_greater(const RpoParams& p, const TermPtr& s, const TermPtr& t);

/// Dershowitz-Manna multiset extension of a strict order: remove the common
/// part; m-residue nonempty and every n-residue element dominated by some
/// m-residue element.
template <typename T, typename Less>
bool multiset_greater_impl(std::vector<T> m, std::vector<T> n, Less base_greater,
                           std::function<bool(const T&, const T&)> eq) {
    for (auto it = m.begin(); it != m.end();) {
        bool removed = false;
        for (auto jt = n.begin(); jt != n.end(); ++jt) {
            if (eq(*it, *jt)) {
                n.erase(jt);
                it = m.erase(it);
                removed = true;
                break;
            }
        }
        if (!removed) ++it;
    }
    if (m.empty()) return false;
    for (const auto& y : n) {
        bool dominated = false;
        for (const auto& x : m)
            if (base_greater(x, y)) {
                dominated = true;
                break;
            }
        if (!dominated) return false;
    }
    return true;
}

bool multiset_greater(const std::function<bool(const TermPtr&, const TermPtr&)>& base,
                      const std::vector<TermPtr>& m, const std::vector<TermPtr>& n);
bool multiset_greater_nat(const std::vector<long>& m, const std::vector<long>& n);

// ------------------------------------------------- polynomial interpretations

/// Multivariate polynomial with integer coefficients; monomials keyed by
/// exponent vectors over variables x0..x(k-1).
struct Poly {
    std::map<std::vector<unsigned>, std::int64_t> monos;

    static Poly constant(std::int64_t c);
    static Poly variable(std::size_t index, std::size_t nvars);
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    /// Substitute polynomials for the variables.
    Poly compose(const std::vector<Poly>& args) const;
    /// Substitute x_i := x_i + a for every variable.
    Poly shift(std::int64_t a) const;
    std::int64_t eval(const std::vector<std::int64_t>& xs) const;
    std::string str(const std::vector<std::string>& names) const;
};

struct PolyInterp {
    std::map<std::string, Poly> interp;  // symbol -> polynomial in arity vars
    std::int64_t min_value = 1;          // domain bound a >= 1
};

/// Checks the strict-monotonicity invariants of the interpretation.
bool poly_interp_valid(const PolyInterp& i, const Signature& sig);

struct PolyCertified {};
struct PolyUnknown {
    Rule rule;
};
using PolyOutcome = std::variant<PolyCertified, PolyUnknown>;

/// Certified iff for every rule the shifted difference p_l - p_r has only
/// nonnegative coefficients and a strictly positive constant term.
/// Throws std::invalid_argument on a malformed interpretation.
PolyOutcome poly_certifies(const PolyInterp& i, const Trs& r);

/// Evaluates a term under the interpretation with the given variable values.
std::int64_t poly_eval_term(const PolyInterp& i, const TermPtr& t,
                            const std::map<std::string, std::int64_t>& env);

// ------------------------------------------------------------ critical pairs

struct CriticalPair {
    TermPtr peak;
    TermPtr left;   // root rewrite by the first rule
    TermPtr right;  // inner rewrite by the second rule
};

std::vector<CriticalPair> critical_pairs(const Trs& r);

/// True iff the fuel-bounded reduction sets of a and b intersect
/// (breadth-first levels; fuel bounds the level count).
bool joinable(const Trs& r, const TermPtr& a, const TermPtr& b, std::size_t fuel);

struct LocallyConfluent {};
struct NotJoinable {
    CriticalPair pair;
};
struct Inconclusive {
    CriticalPair pair;
};
using ConfluenceOutcome = std::variant<LocallyConfluent, NotJoinable, Inconclusive>;

ConfluenceOutcome check_local_confluence(const Trs& r, std::size_t fuel);

// ---------------------------------------------------------------- completion

struct Completed {
    Trs system;
};
struct FailedToOrient {
    CriticalPair pair;
};
struct BudgetExceeded {};
using CompletionOutcome = std::variant<Completed, FailedToOrient, BudgetExceeded>;

struct CompletionBudget {
    std::size_t max_rules = 100;
    std::size_t fuel = 1000000;  // total rewrite steps across the run
};

/// Naive Knuth-Bendix completion with FIFO pair queue and inter-reduction.
/// Throws std::invalid_argument if an initial rule is not oriented by p.
CompletionOutcome complete(const Trs& r, const RpoParams& p, const CompletionBudget& budget);

// --------------------------------------------------------------------- files

struct TrsParseResult {
    std::optional<Trs> trs;
    std::string error;
    std::size_t error_line = 0;
};

/// `.trs` format: a `sig: f/2 g/1 a/0` header line, then one `l -> r` rule
/// per line; `#` starts a comment.
TrsParseResult parse_trs(const std::string& text);
std::string to_string(const Rule& r);
std::string to_string(const Trs& r);

}  // namespace opsem::trs
