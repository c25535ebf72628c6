#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace opsem::xf {

// ------------------------------------------------------------------- types

struct XType;
using XTypePtr = std::shared_ptr<const XType>;

/// Types of the polyadic calculi: type variables (doubling as base types),
/// n-ary functions, tuples, the distinguished result type R, and
/// existentials (closure-converted function types).
struct XType {
    enum Kind { TVar, Fn, Tuple, Res, Exists } kind;
    std::string name;              // TVar / Exists binder
    std::vector<XTypePtr> params;  // Fn params / Tuple items
    XTypePtr ret;                  // Fn return / Exists body

    static XTypePtr tvar(std::string t);
    static XTypePtr fn(std::vector<XTypePtr> params, XTypePtr ret);
    static XTypePtr tuple(std::vector<XTypePtr> items);
    static XTypePtr res();
    static XTypePtr exists(std::string t, XTypePtr body);
};

bool type_eq(const XTypePtr& a, const XTypePtr& b);  // up to α on Exists
std::string to_string(const XTypePtr& t);
std::set<std::string> free_tvars(const XTypePtr& t);

// ------------------------------------------------------------------- terms

struct XTerm;
using XPtr = std::shared_ptr<const XTerm>;

/// One AST for the whole pipeline; each stage is a syntactic restriction.
struct XTerm {
    enum Kind { Var, Lam, Tuple, App, Let, Proj } kind;
    std::string name;                        // Var / Let binder
    std::vector<std::string> params;         // Lam
    std::vector<XTypePtr> param_types;       // Lam annotations (may be empty)
    XPtr body;                               // Lam / Let body
    std::vector<XPtr> items;                 // Tuple items / App (items[0] = fn)
    XPtr def;                                // Let definiens / Proj subject
    std::size_t index = 0;                   // Proj (1-based)
    XTypePtr bind_type;                      // Let annotation (may be null)

    static XPtr var(std::string x);
    static XPtr lam(std::vector<std::string> params, XPtr body,
                    std::vector<XTypePtr> ptypes = {});
    static XPtr tuple(std::vector<XPtr> items);
    static XPtr app(std::vector<XPtr> items);
    static XPtr let(std::string x, XPtr def, XPtr body, XTypePtr bind_type = nullptr);
    static XPtr proj(std::size_t i, XPtr of);
};

enum class Stage { Src, Cps, Vn, Cc, Hoisted };

bool is_value(const XPtr& t);                 // Src values
bool wellformed(Stage stage, const XPtr& t);  // stage grammar check
std::set<std::string> free_names(const XPtr& t);
bool alpha_eq(const XPtr& a, const XPtr& b);
/// Capture-avoiding substitution of terms for names.
XPtr substitute(const XPtr& t, const std::string& x, const XPtr& by);
std::string to_sexp(const XPtr& t);  // stable s-expression form

// ------------------------------------------------------------------- passes

inline const std::string kHalt = "halt";

/// CPS transformation; `halt` is a reserved free name in the output.
XPtr cps(const XPtr& m);
XPtr value_name(const XPtr& m);
XPtr readback(const XPtr& m);
/// Modified (existential-style) closure conversion with the optimized halt
/// convention: @(halt, x) is left un-unpacked.
XPtr closure_convert(const XPtr& m);
XPtr hoist(const XPtr& m);
XPtr pipeline(const XPtr& m);

/// cps / value_name / closure_convert applied to a term whose lambdas carry
/// full parameter annotations; output annotations (including let bind types
/// and pack existentials) are filled in. ctx types the free names.
struct TypedCtx {
    std::vector<std::pair<std::string, XTypePtr>> vars;

    XTypePtr lookup(const std::string& x) const;
    TypedCtx extended(const std::string& x, XTypePtr t) const;
};

XPtr cps_typed(const XPtr& m, const TypedCtx& ctx);
/// Annotated variants: free_types gives the (stage-input) types of the free
/// names; every lambda of m must carry parameter annotations.
XPtr value_name_typed(const XPtr& m, const std::map<std::string, XTypePtr>& free_types);
XPtr closure_convert_typed(const XPtr& m, const std::map<std::string, XTypePtr>& free_types);

/// CPS type compilation: cps(A+ -> B) = ((cps A)+, ¬cps B) -> R.
XTypePtr cps_type(const XTypePtr& a);
/// Closure-conversion type compilation:
/// cc(A+ -> R) = ∃t.×((t, cc A+ -> R), t).
XTypePtr cc_type(const XTypePtr& a);

// ------------------------------------------------------------ step semantics

/// One-step successors in the given stage's reduction semantics.
/// Src/Cps/Vn/Cc/Hoisted are all deterministic; the result has size <= 1.
std::vector<XPtr> step(Stage stage, const XPtr& t);

// --------------------------------------------------------------------- text

struct XParseResult {
    std::optional<XPtr> term;
    std::string error;
    std::size_t pos = 0;
};

/// Polyadic source syntax: `\x y. M`, `@(M, N, ...)`, `let x = M in N`,
/// tuples `(M, N)` / `()` / `(M,)`, projections `pi1(M)`, `(M)` grouping.
XParseResult parse_src(const std::string& src);

}  // namespace opsem::xf
