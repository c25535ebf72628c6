#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace opsem::imp {

/// Total store: default 0 outside the finite map.
struct State {
    std::map<std::string, std::int64_t> mem;

    std::int64_t get(const std::string& x) const {
        auto it = mem.find(x);
        return it == mem.end() ? 0 : it->second;
    }
    void set(const std::string& x, std::int64_t v) { mem[x] = v; }
    bool operator==(const State&) const = default;
};

// ------------------------------------------------------------------- syntax

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct Expr {
    enum Kind { Var, Num, Add } kind;
    std::string name;   // Var
    std::int64_t num;   // Num
    ExprPtr lhs, rhs;   // Add

    static ExprPtr var(std::string x);
    static ExprPtr lit(std::int64_t n);
    static ExprPtr add(ExprPtr a, ExprPtr b);
};

struct Cond {  // b ::= e < e
    ExprPtr lhs, rhs;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
struct Stmt {
    enum Kind { Skip, Assign, Seq, If, While } kind;
    std::string var;     // Assign
    ExprPtr expr;        // Assign
    Cond cond;           // If, While
    StmtPtr s1, s2;      // Seq, If (then/else), While (body in s1)

    static StmtPtr skip();
    static StmtPtr assign(std::string x, ExprPtr e);
    static StmtPtr seq(StmtPtr a, StmtPtr b);
    static StmtPtr ifte(Cond b, StmtPtr t, StmtPtr e);
    static StmtPtr wh(Cond b, StmtPtr body);
};

struct ImpProg {
    StmtPtr body;
};

std::int64_t eval_expr(const ExprPtr& e, const State& s);
bool eval_cond(const Cond& b, const State& s);

// ----------------------------------------------------------------- big step

struct Done {
    State state;
};
struct Stuck {};
struct FuelExhausted {};
using BigResult = std::variant<Done, Stuck, FuelExhausted>;

BigResult eval_big(const ImpProg& p, const State& s, std::size_t fuel);

// --------------------------------------------------------------- small step

/// Continuation: list of statements to run, terminated by halt.
using Continuation = std::vector<StmtPtr>;

struct Config {
    StmtPtr stmt;
    Continuation cont;  // front = next statement
    State state;
};

std::optional<Config> step_small(const Config& c);

struct SmallDone {
    State state;
};
struct SmallFuel {};
using SmallResult = std::variant<SmallDone, SmallFuel>;

SmallResult run_small(const ImpProg& p, const State& s, std::size_t fuel);

// ----------------------------------------------------------------------- vm

struct Instr {
    enum Op { Cnst, VarLoad, SetVar, Add, Branch, Bge, Halt } op;
    std::int64_t n = 0;     // Cnst immediate
    std::string x;          // VarLoad / SetVar
    std::int64_t k = 0;     // Branch / Bge offset
};

using VmCode = std::vector<Instr>;

VmCode compile(const ImpProg& p);
VmCode compile_stmt(const StmtPtr& s);  // without trailing halt

struct VmDone {
    State state;
};
struct VmStuck {
    std::size_t pc;
};
struct VmFuel {};
using VmResult = std::variant<VmDone, VmStuck, VmFuel>;

/// Runs the machine; Done requires halting at a halt instruction with an
/// empty stack. The observer, when given, sees (pc, stack height) before
/// every step and at the final configuration.
VmResult vm_run(const VmCode& c, const State& s, std::size_t fuel,
                const std::function<void(std::size_t, std::size_t)>& observer = {});

/// Unique height function with h(0)=0 satisfying the well-formedness rows,
/// or nullopt when none exists. h has length |C|+1.
std::optional<std::vector<std::size_t>> check_stack_wf(const VmCode& c);

// ---------------------------------------------------------------- assertions

struct Assertion;
using AssertPtr = std::shared_ptr<const Assertion>;
struct Assertion {
    enum Kind { True, False, Less, Equal, Not, And, Or } kind;
    ExprPtr e1, e2;   // Less / Equal
    AssertPtr a1, a2; // Not (a1), And, Or

    static AssertPtr tru();
    static AssertPtr fls();
    static AssertPtr less(ExprPtr a, ExprPtr b);
    static AssertPtr equal(ExprPtr a, ExprPtr b);
    static AssertPtr neg(AssertPtr a);
    static AssertPtr con(AssertPtr a, AssertPtr b);
    static AssertPtr dis(AssertPtr a, AssertPtr b);
};

bool assert_holds(const AssertPtr& a, const State& s);

/// Weakest precondition of a loop-free statement.
/// Throws std::invalid_argument if the statement contains a while loop.
AssertPtr wp(const StmtPtr& s, const AssertPtr& post);

ExprPtr subst_expr(const ExprPtr& e, const std::string& x, const ExprPtr& by);
AssertPtr subst_assert(const AssertPtr& a, const std::string& x, const ExprPtr& by);

// -------------------------------------------------------------------- text

std::string to_string(const ExprPtr& e);
std::string to_string(const Cond& b);
std::string to_string(const StmtPtr& s);
std::string to_string(const ImpProg& p);
std::string to_string(const Instr& i);
std::string to_string(const VmCode& c);
std::string to_string(const AssertPtr& a);

struct ImpParseResult {
    std::optional<ImpProg> prog;
    std::string error;
    std::size_t line = 0, col = 0;
};

/// Concrete syntax with the paper's keywords:
///   skip, x := e, S ; S, if b then S else S, while b do S, parentheses.
ImpParseResult parse_imp(const std::string& src);
std::optional<AssertPtr> parse_assertion(const std::string& src, std::string* err = nullptr);

}  // namespace opsem::imp
