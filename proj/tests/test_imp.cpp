#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "opsem/imp.hpp"

using namespace opsem::imp;

namespace {

ImpProg P(const std::string& src) {
    auto r = parse_imp(src);
    REQUIRE_MESSAGE(r.prog, r.error);
    return *r.prog;
}

const std::vector<std::string> kVars = {"x", "y", "z"};

ExprPtr random_expr(std::mt19937& rng, int depth) {
    switch (rng() % (depth <= 0 ? 2 : 3)) {
        case 0: return Expr::var(kVars[rng() % kVars.size()]);
        case 1: return Expr::lit(static_cast<std::int64_t>(rng() % 9) - 4);
        default: return Expr::add(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    }
}

// Random programs whose loops decrement a dedicated counter, so they
// terminate within modest fuel.
StmtPtr random_stmt(std::mt19937& rng, int depth, int* loop_id) {
    switch (rng() % (depth <= 0 ? 3 : 5)) {
        case 0: return Stmt::skip();
        case 1:
        case 2:
            return Stmt::assign(kVars[rng() % kVars.size()], random_expr(rng, 2));
        case 3:
            if (depth > 0 && rng() % 2) {
                Cond b{random_expr(rng, 1), random_expr(rng, 1)};
                return Stmt::ifte(b, random_stmt(rng, depth - 1, loop_id),
                                  random_stmt(rng, depth - 1, loop_id));
            }
            return Stmt::seq(random_stmt(rng, depth - 1, loop_id),
                             random_stmt(rng, depth - 1, loop_id));
        default: {
            std::string c = "c" + std::to_string((*loop_id)++);
            StmtPtr body = Stmt::seq(random_stmt(rng, depth - 1, loop_id),
                                     Stmt::assign(c, Expr::add(Expr::var(c), Expr::lit(-1))));
            StmtPtr init = Stmt::assign(c, Expr::lit(static_cast<std::int64_t>(rng() % 4)));
            return Stmt::seq(init, Stmt::wh(Cond{Expr::lit(0), Expr::var(c)}, body));
        }
    }
}

State random_state(std::mt19937& rng) {
    State s;
    for (const auto& v : kVars) s.set(v, static_cast<std::int64_t>(rng() % 11) - 5);
    return s;
}

std::set<std::string> mentioned(const StmtPtr& s);

void mentioned_expr(const ExprPtr& e, std::set<std::string>& out) {
    if (e->kind == Expr::Var) out.insert(e->name);
    if (e->kind == Expr::Add) {
        mentioned_expr(e->lhs, out);
        mentioned_expr(e->rhs, out);
    }
}

void mentioned_walk(const StmtPtr& s, std::set<std::string>& out) {
    switch (s->kind) {
        case Stmt::Skip: return;
        case Stmt::Assign:
            out.insert(s->var);
            mentioned_expr(s->expr, out);
            return;
        case Stmt::Seq:
            mentioned_walk(s->s1, out);
            mentioned_walk(s->s2, out);
            return;
        case Stmt::If:
            mentioned_expr(s->cond.lhs, out);
            mentioned_expr(s->cond.rhs, out);
            mentioned_walk(s->s1, out);
            mentioned_walk(s->s2, out);
            return;
        case Stmt::While:
            mentioned_expr(s->cond.lhs, out);
            mentioned_expr(s->cond.rhs, out);
            mentioned_walk(s->s1, out);
            return;
    }
}

std::set<std::string> mentioned(const StmtPtr& s) {
    std::set<std::string> out;
    mentioned_walk(s, out);
    return out;
}

}  // namespace

TEST_CASE("eval_big examples") {
    State s;
    auto r = eval_big(P("x := 1; x := x + 1"), s, 100);
    REQUIRE(std::holds_alternative<Done>(r));
    CHECK(std::get<Done>(r).state.get("x") == 2);

    auto r2 = eval_big(P("skip"), s, 100);
    REQUIRE(std::holds_alternative<Done>(r2));
    CHECK(std::get<Done>(r2).state == s);

    auto r3 = eval_big(P("while 0 < 1 do skip"), s, 1000);
    CHECK(std::holds_alternative<FuelExhausted>(r3));
}

TEST_CASE("step_small examples") {
    State s;
    // (S;S', K, s) -> (S, S'·K, s)
    ImpProg p = P("skip; x := 1");
    Config c{p.body, {}, s};
    auto n = step_small(c);
    REQUIRE(n);
    CHECK(n->stmt->kind == Stmt::Skip);
    REQUIRE(n->cont.size() == 1);
    CHECK(n->cont[0]->kind == Stmt::Assign);

    // terminal configuration
    Config done{Stmt::skip(), {}, s};
    CHECK(!step_small(done));

    // assignment
    Config a{Stmt::assign("x", Expr::lit(3)), {}, s};
    auto na = step_small(a);
    REQUIRE(na);
    CHECK(na->stmt->kind == Stmt::Skip);
    CHECK(na->state.get("x") == 3);
}

TEST_CASE("run_small examples") {
    State s;
    auto r = run_small(P("x := 1; x := x + 1"), s, 100);
    REQUIRE(std::holds_alternative<SmallDone>(r));
    CHECK(std::get<SmallDone>(r).state.get("x") == 2);

    CHECK(std::holds_alternative<SmallDone>(run_small(P("skip"), s, 10)));
    CHECK(std::holds_alternative<SmallFuel>(run_small(P("while 0 < 1 do skip"), s, 100)));
}

TEST_CASE("compile goldens") {
    // while (0<1) do skip -> cnst(0) cnst(1) bge(1) branch(-4), plus halt
    VmCode c = compile(P("while 0 < 1 do skip"));
    CHECK(to_string(c) == "cnst(0) cnst(1) bge(1) branch(-4) halt");

    CHECK(to_string(compile(P("skip"))) == "halt");
    CHECK(to_string(compile(P("x := y + 1"))) == "var(y) cnst(1) add setvar(x) halt");
}

TEST_CASE("vm_run examples") {
    State s;
    auto r = vm_run(compile(P("x := 2")), s, 100);
    REQUIRE(std::holds_alternative<VmDone>(r));
    CHECK(std::get<VmDone>(r).state.get("x") == 2);

    VmCode halt_only{Instr{Instr::Halt, 0, "", 0}};
    CHECK(std::holds_alternative<VmDone>(vm_run(halt_only, s, 10)));

    VmCode add_only{Instr{Instr::Add, 0, "", 0}};
    auto st = vm_run(add_only, s, 10);
    REQUIRE(std::holds_alternative<VmStuck>(st));
    CHECK(std::get<VmStuck>(st).pc == 0);

    // diverging compiled loop really diverges on the vm
    CHECK(std::holds_alternative<VmFuel>(vm_run(compile(P("while 0 < 1 do skip")), s, 1000)));
}

TEST_CASE("check_stack_wf examples") {
    CHECK(check_stack_wf(VmCode{}).has_value());

    VmCode bad{Instr{Instr::Cnst, 1, "", 0}, Instr{Instr::Halt, 0, "", 0}};
    CHECK(!check_stack_wf(bad));

    auto h = check_stack_wf(compile(P("if x < 1 then x := 1 else (while y < x do y := y + 1)")));
    REQUIRE(h);
    CHECK((*h)[0] == 0);
}

TEST_CASE("big-step, small-step, vm agree; stack height predicted") {
    std::mt19937 rng(2024);
    int done_count = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        int loop_id = 0;
        StmtPtr body = random_stmt(rng, 3, &loop_id);
        ImpProg p{body};
        State s0 = random_state(rng);
        auto big = eval_big(p, s0, 10000);
        auto small = run_small(p, s0, 100000);
        VmCode code = compile(p);
        auto hf = check_stack_wf(code);
        REQUIRE_MESSAGE(hf, "compiled code must admit a height function: " << to_string(code));

        bool height_ok = true;
        auto vm = vm_run(code, s0, 1000000, [&](std::size_t pc, std::size_t height) {
            if ((*hf)[pc] != height) height_ok = false;
        });
        CHECK(height_ok);

        if (std::holds_alternative<Done>(big)) {
            ++done_count;
            const State& sb = std::get<Done>(big).state;
            REQUIRE(std::holds_alternative<SmallDone>(small));
            REQUIRE_MESSAGE(std::holds_alternative<VmDone>(vm), to_string(p));
            const State& ss = std::get<SmallDone>(small).state;
            const State& sv = std::get<VmDone>(vm).state;
            for (const auto& v : mentioned(body)) {
                CHECK(sb.get(v) == ss.get(v));
                CHECK(sb.get(v) == sv.get(v));
            }
        }
    }
    CHECK(done_count > 900);  // bounded loops: nearly everything terminates
}

TEST_CASE("wp examples and assert_holds") {
    // wp(x:=e, A) = [e/x]A
    auto post = *parse_assertion("x < 3");
    auto w = wp(Stmt::assign("x", Expr::add(Expr::var("x"), Expr::lit(1))), post);
    CHECK(to_string(w) == "((x + 1) < 3)");

    CHECK(to_string(wp(Stmt::skip(), post)) == to_string(post));

    State s;
    s.set("x", 3);
    CHECK(assert_holds(*parse_assertion("x = 3"), s));
    CHECK(assert_holds(*parse_assertion("~(x < 0)"), State{}));
    State s2;
    s2.set("x", 2);
    CHECK(!assert_holds(w, s2));

    CHECK_THROWS_AS(wp(P("while 0 < 1 do skip").body, post), std::invalid_argument);
}

TEST_CASE("wp soundness and weakness on samples") {
    std::mt19937 rng(7);
    for (int iter = 0; iter < 300; ++iter) {
        // loop-free random statement
        StmtPtr s;
        do {
            int loop_id = 0;
            s = random_stmt(rng, 2, &loop_id);
            if (loop_id == 0) break;
        } while (true);
        AssertPtr post = Assertion::less(random_expr(rng, 1), random_expr(rng, 1));
        AssertPtr pre = wp(s, post);
        for (int k = 0; k < 10; ++k) {
            State st = random_state(rng);
            auto big = eval_big(ImpProg{s}, st, 10000);
            REQUIRE(std::holds_alternative<Done>(big));
            const State& out = std::get<Done>(big).state;
            // soundness: pre holds => post holds after
            // weakness: post holds after => pre held before
            CHECK(assert_holds(pre, st) == assert_holds(post, out));
        }
    }
}

TEST_CASE("imp parser errors carry position") {
    auto r = parse_imp("x := ");
    CHECK(!r.prog);
    CHECK(!r.error.empty());
    CHECK(r.line >= 1);

    CHECK(!parse_imp("while 0 < 1 skip").prog);
    CHECK(parse_imp("x := 1; # trailing comment\n y := x").prog);
}

TEST_CASE("parse/print round trip") {
    std::mt19937 rng(55);
    for (int i = 0; i < 200; ++i) {
        int loop_id = 0;
        StmtPtr s = random_stmt(rng, 3, &loop_id);
        std::string printed = to_string(ImpProg{s});
        auto back = parse_imp(printed);
        REQUIRE_MESSAGE(back.prog, printed << " :: " << back.error);
        CHECK(to_string(*back.prog) == printed);
    }
}
